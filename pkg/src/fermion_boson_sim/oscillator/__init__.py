# Oscillator grid module initialization
