"""Corpus preprocessing and word-embedding evaluation toolkit."""

__version__ = "0.1.0"
