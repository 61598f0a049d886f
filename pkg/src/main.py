"""Main entry point for fracground."""
import logging
import os
import sys

# Add the src directory to the Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from app import FracGroundApp
from config import Config

# Configure logging
logging.basicConfig(
    level=getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

def main(argv=None) -> int:
    """Run one CLI command and return its exit code."""
    app = FracGroundApp()
    return app.run(argv)

if __name__ == "__main__":
    sys.exit(main())
