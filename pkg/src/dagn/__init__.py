"""Discourse-aware graph network (DAGN) for multiple-choice logical reasoning QA."""

__version__ = "0.1.0"
