"""Predict the classes a new requirement will impact, from issue-linked commit history."""

__version__ = "0.1.0"
