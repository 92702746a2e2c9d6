"""Temporal alignment of timestamped match commentaries to video key frames."""

__version__ = "0.1.0"
