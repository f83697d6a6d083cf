"""Detect and analyse net-zero and emission-reduction targets in text."""

__version__ = "0.1.0"
