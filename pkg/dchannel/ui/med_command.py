import json

import numpy as np
import pandas as pd

from dchannel.core import metrics
from dchannel.core import settings
from dchannel.core.catalog import med_reference
from dchannel.core.pipeline import ingest
from dchannel.core.synth import SynthesisConfig
from dchannel.errors import NotAvailableError
from dchannel.errors import UsageError
from dchannel.ui.misc import echo
from dchannel.ui.misc import read_bytes
from dchannel.ui.misc import write_output


class MedCommand(object):
    """
    Monte Carlo maximum excess delay of a cell, printed beside the
    tabulated (empirical, model) pair.
    """

    help = 'model mean maximum excess delay of a cell'

    def __init__(self, parser):
        super(MedCommand, self).__init__()
        self.parser = parser
        self._init_arguments()

    def update(self, app):
        self.app = app

    def _init_arguments(self):
        p = self.parser
        p.add_argument('--location', required=True)
        p.add_argument('--scenario', required=True)
        p.add_argument('--draws', type=int, default=settings.DEFAULT_DRAWS)
        p.add_argument('--seed', type=int, default=settings.DEFAULT_SEED)
        p.add_argument('--links', type=int, default=None,
                       help='number of evenly spaced links (default: one '
                            'per measurement)')
        p.add_argument('--noise-margin', type=float, default=None,
                       help='dB above the noise floor (default: the '
                            'threshold the cell is calibrated at)')
        p.add_argument('--no-rx-gain', action='store_true',
                       help='leave the Rx antenna gain out of path powers')
        p.add_argument('--dynamic-range', type=float, default=None,
                       metavar='DB',
                       help='also drop paths this far below the strongest')
        p.add_argument('--data', default=None,
                       help='measurement CSV giving link distances and '
                            'path counts')
        p.add_argument('--workers', type=int, default=1)
        p.add_argument('--out', default=None)
        p.add_argument('--format', choices=('json', 'csv'), default='json')

    def _links(self, args, profile, stats):
        if args.data:
            dataset = ingest(read_bytes(args.data), self.app.catalog)
            links = dataset.links_in(profile.name, stats.scenario)
            if not links:
                raise UsageError('%s has no %s links for %s'
                                 % (args.data, stats.scenario.value,
                                    profile.name))
            return ([info.distance_m for info in links],
                    [info.path_count for info in links])
        if args.links is not None:
            if args.links < 1:
                raise UsageError('--links must be >= 1')
            dmin, dmax = profile.link_distance_range_m
            return list(np.linspace(dmin, dmax, args.links)), None
        return list(metrics.default_link_distances(profile, stats)), None

    def run(self, args):
        catalog = self.app.catalog
        profile, stats = catalog.lookup(args.location, args.scenario)
        distances, counts = self._links(args, profile, stats)
        cfg = SynthesisConfig(profile.name, stats.scenario, seed=args.seed)
        threshold = metrics.med_threshold(profile, stats, args.noise_margin)
        summary = metrics.monte_carlo_med(
            profile, stats, cfg, distances, args.draws,
            threshold_dbm=threshold,
            include_rx_gain=not args.no_rx_gain,
            dynamic_range_db=args.dynamic_range,
            nop_per_link=counts, workers=args.workers)
        try:
            reference = med_reference(profile.name, stats.scenario, catalog)
        except NotAvailableError:
            reference = None

        echo('%s %s: model mean MED %.2f ns (%d links x %d draws, '
             'threshold %g dBm)' % (profile.name, stats.scenario.value,
                                    summary.mean_med_ns, len(distances),
                                    summary.n_draws, summary.threshold_dbm))
        if reference is None:
            echo('reference: not tabulated')
        else:
            echo('reference: empirical %.2f ns, model %.2f ns'
                 % (reference.empirical_ns, reference.model_ns))

        if args.out:
            if args.format == 'json':
                obj = summary.to_json()
                obj.update(location=profile.name,
                           scenario=stats.scenario.value,
                           reference=None if reference is None
                           else reference._asdict())
                write_output(args.out, 'med.json',
                             json.dumps(obj, sort_keys=True, indent=2) + '\n')
            else:
                frame = pd.DataFrame({'link': range(len(distances)),
                                      'distance_m': summary.link_distances_m,
                                      'med_ns': summary.per_link_med_ns})
                write_output(args.out, 'med.csv',
                             frame.to_csv(index=False, lineterminator='\n'))
        return 0
