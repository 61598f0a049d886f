"""Commands package for the fracground CLI."""
from .experiment_commands import setup_experiment_commands
from .verify_commands import setup_verify_commands


def setup_commands(subparsers, app):
    """Setup all CLI commands."""
    setup_verify_commands(subparsers, app)
    setup_experiment_commands(subparsers, app)
