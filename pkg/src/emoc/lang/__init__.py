"""MiniAlg subject language: parsing, rendering, lowering."""

from . import ast
from .lower import lower
from .parser import parse, validate
from .render import render, render_expr
from .source import SourceUnit

__all__ = ["ast", "parse", "validate", "render", "render_expr", "lower", "SourceUnit"]
