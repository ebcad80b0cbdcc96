"""Toolkit for building, annotating, and diagnosing parallel-passage span QA datasets."""

__version__ = "0.1.0"
