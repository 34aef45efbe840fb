"""Processor-event based energy models for video decoding."""

__version__ = "0.1.0"
