"""Step-protocol runner for Python reference models."""

from .runner import load_model, serve

__all__ = ["load_model", "serve"]
__version__ = "0.1.0"
