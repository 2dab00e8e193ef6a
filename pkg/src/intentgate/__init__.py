"""Confidence-gated multilingual intent routing with human analyst escalation."""

__version__ = "0.1.0"
