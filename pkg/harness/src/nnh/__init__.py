"""Neural NER tagger and embedding provider for the embeval toolkit."""

__version__ = "0.1.0"
