# Oracle module initialization
