"""Workbench for finding enterprise-architecture smells in business documents."""

__version__ = "0.1.0"
