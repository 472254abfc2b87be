"""Témoin de dimension quantique par codes à accès aléatoire binaires."""

__version__ = "1.0.0"
