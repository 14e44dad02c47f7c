# CLI module initialization
