"""Command-line front end for the slowlight simulator."""
