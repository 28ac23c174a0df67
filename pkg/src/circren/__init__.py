"""circren: a numerical laboratory for renormalization of bi-cubic circle maps."""

__version__ = "0.1.0"
