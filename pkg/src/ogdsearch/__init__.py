"""Spatial search engine and evaluation workbench for open-government dataset metadata."""

__version__ = "0.1.0"
