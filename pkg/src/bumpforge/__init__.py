"""Bumping almost h-extendible model domains."""

__version__ = "0.1.0"
