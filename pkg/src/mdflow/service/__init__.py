"""Service layer: pydantic scenario/report schemas, handlers, FastAPI app."""

from . import handlers, schemas

__all__ = ["handlers", "schemas"]
