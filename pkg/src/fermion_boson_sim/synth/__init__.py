# Synth module initialization
