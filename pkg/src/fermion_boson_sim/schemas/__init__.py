# Schemas module initialization
