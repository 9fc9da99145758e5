"""Click-through ranking with source-to-target domain adaptation."""

__version__ = "0.1.0"

from .backend import backend_name  # noqa: F401
