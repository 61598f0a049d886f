"""Configuration management for fracground."""
import os

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

class Config:
    """Environment configuration class."""

    # Output
    OUT_DIR = os.getenv('FRACGROUND_OUT', 'runs')

    # Execution
    THREADS = int(os.getenv('FRACGROUND_THREADS', '1'))
    SEED = int(os.getenv('FRACGROUND_SEED', '0'))

    # Numerics
    TAIL_TOL = float(os.getenv('FRACGROUND_TAIL_TOL', '1e-8'))  # dilation support guard

    # Error Handling
    LOG_LEVEL = os.getenv('FRACGROUND_LOG_LEVEL', 'INFO')

    @classmethod
    def validate(cls):
        """Validate the environment settings."""
        if cls.THREADS < 1:
            raise ValueError(f"FRACGROUND_THREADS must be positive, got {cls.THREADS}")
        if not 0.0 < cls.TAIL_TOL < 1.0:
            raise ValueError(f"FRACGROUND_TAIL_TOL must lie in (0, 1), got {cls.TAIL_TOL}")
        return True
