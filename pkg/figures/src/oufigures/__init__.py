"""Figure rendering for the lab's CSV/JSON artifacts (read-only consumer)."""

__version__ = "0.1.0"

from .render import render
from .spec import FigureSpec, SpecError, load_spec

__all__ = ["FigureSpec", "SpecError", "load_spec", "render", "__version__"]
