"""Contextual embedding extraction into the laserkit interchange format."""

__version__ = "0.1.0"

from .extract import ExtractionSpec, ExtractionStats, Pooling, extract

__all__ = ["ExtractionSpec", "ExtractionStats", "Pooling", "extract"]
