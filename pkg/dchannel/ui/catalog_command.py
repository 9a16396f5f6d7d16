import sys

from dchannel.core.catalog import format_row
from dchannel.core.catalog import load_catalog_path
from dchannel.core.catalog import save_catalog
from dchannel.ui.misc import echo


class CatalogCommand(object):
    """Shows, dumps and validates campaign catalogs."""

    help = 'inspect or validate a catalog'

    def __init__(self, parser):
        super(CatalogCommand, self).__init__()
        self.parser = parser
        self._init_arguments()

    def update(self, app):
        self.app = app

    def _init_arguments(self):
        actions = self.parser.add_subparsers(dest='action', metavar='ACTION')
        actions.required = True
        show = actions.add_parser('show', help='describe one cell')
        show.add_argument('location')
        show.add_argument('scenario')
        actions.add_parser('dump', help='print the catalog as canonical JSON')
        validate = actions.add_parser('validate',
                                      help='check a catalog file')
        validate.add_argument('file')

    def run(self, args):
        if args.action == 'validate':
            catalog = load_catalog_path(args.file)
            echo('%s: ok, %d locations, %d cells'
                 % (args.file, len(catalog.locations),
                    len(list(catalog.cells()))))
        elif args.action == 'dump':
            sys.stdout.write(save_catalog(self.app.catalog).decode('utf-8'))
        else:
            profile, stats = self.app.catalog.lookup(args.location,
                                                     args.scenario)
            echo(format_row(profile, stats))
        return 0
