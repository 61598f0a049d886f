"""Experiment verbs: solve, sweep, noncrit and kernel."""
import logging

logger = logging.getLogger(__name__)

def setup_experiment_commands(subparsers, app):
    """Setup the experiment subcommands."""

    def solve(args):
        """Fixed-point and mountain-pass solutions at lambda = 1."""
        config = app.load_config(args, 'solve')
        record = app.experiment_controller(args).solve(config)
        return app.report(record)

    def sweep(args):
        """Lambda continuation on [delta_bar, 1]."""
        config = app.load_config(args, 'sweep')
        record = app.experiment_controller(args).sweep(config)
        return app.report(record)

    def noncrit(args):
        """Pohozaev-constrained descent and the theta_y experiment."""
        config = app.load_config(args, 'noncrit')
        record = app.experiment_controller(args).noncrit(config)
        return app.report(record)

    def kernel(args):
        """Resolvent kernel profile and decay report."""
        config = app.load_config(args, 'kernel')
        record = app.experiment_controller(args).kernel_run(config)
        return app.report(record)

    for name, handler, text in (
        ('solve', solve, 'Solve the configured model at lambda = 1'),
        ('sweep', sweep, 'Run the lambda continuation to lambda = 1'),
        ('noncrit', noncrit, 'Run the non-attainment experiment'),
        ('kernel', kernel, 'Compute the resolvent kernel and its decay report'),
    ):
        parser = subparsers.add_parser(name, parents=[app.common], help=text, description=text)
        parser.set_defaults(handler=handler)
