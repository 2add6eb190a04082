"""Deterministic figure rendering for code-construction experiment CSVs."""

__version__ = "0.1.0"

from .render import KINDS, SchemaError, render

__all__ = ["KINDS", "SchemaError", "render", "__version__"]
