"""Toolkit for turning small C-like programs plus inputs into execution
traces, quantized program-state and coverage labels, model-ready token
sequences, and evaluation reports."""

__version__ = "0.1.0"
