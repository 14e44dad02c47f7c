# Engine module initialization
