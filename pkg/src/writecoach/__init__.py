"""Sentence-by-sentence writing tutor with graduated feedback."""

__version__ = "0.1.0"
