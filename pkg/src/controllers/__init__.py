"""Controllers for fracground commands."""
from .experiment_controller import ExperimentController
from .verify_controller import VerifyController

__all__ = ['ExperimentController', 'VerifyController']
