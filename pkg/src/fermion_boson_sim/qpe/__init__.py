# Phase estimation module initialization
