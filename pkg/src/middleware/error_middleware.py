"""Error handling middleware for fracground."""
import logging
import traceback

from errors import (ConfigError, ContinuationAborted, FracGroundError, PathConstructionError,
                    ProjectionError, PropertyFailure)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

class ErrorMiddleware:
    """Maps errors to exit codes and readable log lines."""

    @staticmethod
    def exit_code_for(error: BaseException) -> int:
        if isinstance(error, ConfigError):
            return EXIT_CONFIG
        return EXIT_FAILURE

    @staticmethod
    def handle_command_error(error: BaseException, command: str = "") -> int:
        """Log the error for the command and return its exit code."""
        if isinstance(error, ConfigError):
            logger.error(f"Configuration error in {command}: {error}")
            for failure in error.failures:
                logger.error(f"  - {failure}")
            return ErrorMiddleware.exit_code_for(error)

        if isinstance(error, PropertyFailure):
            logger.error(f"{command}: {len(error.failed)} properties failed: {', '.join(error.failed)}")
            return EXIT_FAILURE

        if isinstance(error, ContinuationAborted):
            done = len(error.trace.records) if error.trace is not None else 0
            logger.error(f"{command}: {error} ({done} lambda steps completed)")
            return EXIT_FAILURE

        if isinstance(error, (ProjectionError, PathConstructionError)):
            logger.error(f"{command}: {error}")
            if error.profile:
                logger.error(f"  theta profile: {error.profile}")
            return EXIT_FAILURE

        if isinstance(error, FracGroundError):
            logger.error(f"{command}: {error}")
            return EXIT_FAILURE

        # Log unexpected errors
        logger.error(f"Unexpected error in command {command}: {error}")
        logger.error(traceback.format_exc())
        return EXIT_FAILURE

    @staticmethod
    def handle_general_error(error: Exception, context: str = ""):
        """Handle general errors with logging."""
        logger.error(f"Error in {context}: {error}")
        logger.error(traceback.format_exc())
