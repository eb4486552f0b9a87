"""Discourse-aware sentence splitting over constituency trees."""

__version__ = "0.1.0"
