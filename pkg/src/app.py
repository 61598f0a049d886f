"""Main application class and setup."""
import argparse
import logging
import os
from typing import List, Optional

from commands import setup_commands
from config import Config
from controllers import ExperimentController, VerifyController
from errors import ConfigError
from middleware.error_middleware import EXIT_FAILURE, EXIT_OK, ErrorMiddleware
from models import ExperimentConfig, RunRecord
from services import (EnergyService, KernelService, ModelService, RunService, SolverService,
                      SpectralService)
from services.run_service import SUMMARY_FILE
from utils.helpers import format_seconds
from utils.validators import validate_experiment, validate_threads

logger = logging.getLogger(__name__)

class FracGroundApp:
    """Command-line application for the fractional Schrodinger lab."""

    def __init__(self):
        """Build the parser with the shared options and every subcommand."""
        self.common = argparse.ArgumentParser(add_help=False)
        self.common.add_argument('--config', default=None,
                                 help='experiment file ([model], [grid], [solver], [experiment])')
        self.common.add_argument('--out', default=None,
                                 help=f'output directory (default: $FRACGROUND_OUT or {Config.OUT_DIR})')
        self.common.add_argument('--threads', type=int, default=None,
                                 help='FFT workers and fan-out pool size')
        self.common.add_argument('--seed', type=int, default=None,
                                 help='seed for randomized property sampling')

        self.parser = argparse.ArgumentParser(
            prog='fracground',
            description='Ground states of fractional Schrodinger equations on a periodic box'
        )
        subparsers = self.parser.add_subparsers(dest='command', metavar='command')
        subparsers.required = True
        setup_commands(subparsers, self)

    def _resolve(self, args: argparse.Namespace):
        """Fill unset shared options from the environment."""
        if args.out is None:
            args.out = Config.OUT_DIR
        if args.threads is None:
            args.threads = Config.THREADS
        if args.seed is None:
            args.seed = Config.SEED
        ok, message = validate_threads(args.threads)
        if not ok:
            raise ConfigError(message, [message])

    def load_config(self, args: argparse.Namespace, command: str) -> ExperimentConfig:
        """Parse the experiment file and run the command's validators."""
        config = RunService(args.out).load_config(args.config)
        failures = validate_experiment(config, command)
        if failures:
            raise ConfigError(f"{len(failures)} validation checks failed", failures)
        return config

    def _services(self, args: argparse.Namespace):
        spectral = SpectralService(workers=args.threads, tail_tol=Config.TAIL_TOL)
        models = ModelService()
        energy = EnergyService(spectral)
        kernel = KernelService(spectral, workers=args.threads)
        return spectral, models, energy, kernel

    def experiment_controller(self, args: argparse.Namespace) -> ExperimentController:
        spectral, models, energy, kernel = self._services(args)
        solver = SolverService(spectral, energy, kernel, models, workers=args.threads)
        return ExperimentController(spectral, energy, kernel, solver, RunService(args.out))

    def verify_controller(self, args: argparse.Namespace) -> VerifyController:
        spectral, models, energy, kernel = self._services(args)
        return VerifyController(spectral, models, energy, kernel, RunService(args.out),
                                workers=args.threads)

    def report(self, record: RunRecord) -> int:
        """Log where the run landed and turn its verdict into an exit code."""
        summary = os.path.join(record.run_dir, SUMMARY_FILE)
        elapsed = format_seconds((record.finished_at - record.started_at).total_seconds())
        if record.passed:
            logger.info(f"{record.command}: passed in {elapsed}, summary at {summary}")
            return EXIT_OK
        logger.warning(f"{record.command}: checks failed, summary at {summary}")
        return EXIT_FAILURE

    def run(self, argv: Optional[List[str]] = None) -> int:
        """Parse argv, run the selected command and return its exit code."""
        args = self.parser.parse_args(argv)
        try:
            Config.validate()
        except ValueError as e:
            return ErrorMiddleware.handle_command_error(ConfigError(str(e)), args.command)
        try:
            self._resolve(args)
            return args.handler(args)
        except Exception as e:
            return ErrorMiddleware.handle_command_error(e, args.command)
