"""Utility functions for fracground."""
from .helpers import canonical_json, content_hash, format_cell, format_float, parse_cell, plain
from .validators import validate_experiment, validate_kernel_profile, validate_threads

__all__ = ['format_float', 'format_cell', 'parse_cell', 'plain', 'canonical_json', 'content_hash',
           'validate_experiment', 'validate_kernel_profile', 'validate_threads']
