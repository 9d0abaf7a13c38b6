"""HTTP service layer: FastAPI app factory and wire models."""

from .app import create_app
from .models import PackedArray

__all__ = ["create_app", "PackedArray"]
