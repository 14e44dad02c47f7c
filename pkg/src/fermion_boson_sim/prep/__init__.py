# Preparation module initialization
