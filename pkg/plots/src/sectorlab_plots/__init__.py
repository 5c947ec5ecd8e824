"""Figures from sectorlab harness artifacts; consumes files only, never physics."""

from .formats import SchemaError
from .render import KINDS, render

__version__ = "0.1.0"
