"""Command-line interface modules for the hassekit package."""
