"""Helper utility functions for fracground."""
import hashlib
import json
from enum import Enum
from typing import Any

import numpy as np


def format_float(value: float) -> str:
    """Round-trip float text with 17 significant digits."""
    return format(float(value), '.17g')


def format_cell(value: Any) -> str:
    """CSV cell text: floats at full precision, None as empty."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def parse_cell(text: str) -> Any:
    """Inverse of format_cell for numbers, flags and blanks."""
    if text == '':
        return None
    if text in ('true', 'false'):
        return text == 'true'
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def plain(value: Any) -> Any:
    """Convert numpy scalars, arrays, tuples and enums into JSON-ready values."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, Enum):
        return value.value
    return value


def canonical_json(data: Any) -> str:
    """Sorted-key compact JSON used for hashing."""
    return json.dumps(plain(data), sort_keys=True, separators=(',', ':'))


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def content_hash(data: Any) -> str:
    """SHA-256 of the canonical JSON of data."""
    return sha256_hex(canonical_json(data))


def format_seconds(seconds: float) -> str:
    """Format time in seconds to human-readable string."""
    if seconds < 60:
        return f"{seconds:.1f} seconds"
    elif seconds < 3600:
        return f"{seconds / 60:.1f} minutes"
    return f"{seconds / 3600:.1f} hours"


def format_check(passed: bool) -> str:
    return "PASS" if passed else "FAIL"
