# Workers module initialization
