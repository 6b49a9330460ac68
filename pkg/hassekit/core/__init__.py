"""Core arithmetic and decision modules for the hassekit package."""
