"""The verify verb."""
import logging

from errors import PropertyFailure
from middleware.error_middleware import EXIT_OK

logger = logging.getLogger(__name__)

def setup_verify_commands(subparsers, app):
    """Setup the verify subcommand."""

    def verify(args):
        """Run the property suites that need no solver run."""
        controller = app.verify_controller(args)
        if args.list:
            for name in controller.list_properties():
                print(name)
            return EXIT_OK

        config = app.load_config(args, 'verify')
        record = controller.verify(config, args.seed)
        if not record.passed:
            failed = record.summary['failed']
            raise PropertyFailure(f"{len(failed)} of {record.summary['total']} properties failed",
                                  failed)
        return app.report(record)

    parser = subparsers.add_parser('verify', parents=[app.common],
                                   help='Run the property suites',
                                   description='Run the property suites and write a JSON report')
    parser.add_argument('--list', action='store_true', help='print property names and exit')
    parser.set_defaults(handler=verify)
