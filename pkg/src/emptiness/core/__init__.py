"""Configuration, logging, errors and the orchestrating engine."""
