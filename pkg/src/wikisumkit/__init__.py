"""Cross-lingual Wikipedia summarisation corpus toolkit."""

__version__ = "0.1.0"
