"""Middleware for fracground."""
from .error_middleware import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, ErrorMiddleware

__all__ = ['ErrorMiddleware', 'EXIT_OK', 'EXIT_FAILURE', 'EXIT_CONFIG']
