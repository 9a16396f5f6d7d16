import os

from dchannel import globals
from dchannel.core import plotdata
from dchannel.core import settings
from dchannel.core.pipeline import best_family
from dchannel.core.pipeline import emit_report
from dchannel.core.pipeline import ingest
from dchannel.core.pipeline import run_fit_pipeline
from dchannel.errors import NotAvailableError
from dchannel.ui.misc import echo
from dchannel.ui.misc import read_bytes
from dchannel.ui.misc import write_output


class FitCommand(object):
    """
    Fits every candidate family to the power, delay and path-count data
    of a measurement file and writes the goodness-of-fit report.
    """

    help = 'fit and score distributions for measured data'

    def __init__(self, parser):
        super(FitCommand, self).__init__()
        self.parser = parser
        self._init_arguments()

    def update(self, app):
        self.app = app

    def _init_arguments(self):
        p = self.parser
        p.add_argument('--data', required=True, help='measurement CSV')
        p.add_argument('--families', nargs='+', default=None,
                       help='candidate families for every quantity')
        p.add_argument('--allow-unknown', action='store_true',
                       help='keep rows of locations missing from the '
                            'catalog')
        p.add_argument('--min-points', type=int,
                       default=settings.MIN_FIT_POINTS)
        p.add_argument('--format', choices=('csv', 'json'), default='csv')
        p.add_argument('--out', default='.')
        p.add_argument('--plots', action='store_true',
                       help='also write plot data under OUT/plots')
        p.add_argument('--workers', type=int, default=1)

    def run(self, args):
        catalog = self.app.catalog
        dataset = ingest(read_bytes(args.data), catalog,
                         allow_unknown=args.allow_unknown)
        report = run_fit_pipeline(dataset, catalog, families=args.families,
                                  min_points=args.min_points,
                                  workers=args.workers)
        write_output(args.out, 'fits.%s' % args.format,
                     emit_report(report, args.format))
        if args.plots:
            plotdata.emit_fit_plots(dataset, report, catalog,
                                    os.path.join(args.out, 'plots'))

        echo('%d records, %d links, %d fit rows'
             % (len(dataset), len(dataset.links), len(report.rows)))
        for location, scenario in dataset.cells():
            best = []
            for quantity in globals.QUANTITIES:
                try:
                    family = best_family(report, location, scenario,
                                         quantity).value
                except NotAvailableError:
                    family = '-'
                best.append('%s=%s' % (quantity, family))
            echo('%s %s: %s' % (location, scenario.value, ' '.join(best)))
        return 0
