"""Comparison geometry in the model surfaces and in sampled geodesic spaces."""

__version__ = "0.1.0"
