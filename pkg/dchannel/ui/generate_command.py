import io
import json

import pandas as pd

from dchannel.core import settings
from dchannel.core import synth
from dchannel.core.synth import AngleModel
from dchannel.core.synth import ArrayConfig
from dchannel.core.synth import NopSource
from dchannel.core.synth import SynthesisConfig
from dchannel.ui.misc import echo
from dchannel.ui.misc import parse_triple
from dchannel.ui.misc import write_output


class GenerateCommand(object):
    """
    Draws one realization for a link and writes its path set, MIMO
    frequency response and tap-delay line.
    """

    help = 'synthesize a channel realization'

    def __init__(self, parser):
        super(GenerateCommand, self).__init__()
        self.parser = parser
        self._init_arguments()

    def update(self, app):
        self.app = app

    def _init_arguments(self):
        p = self.parser
        p.add_argument('--location', required=True)
        p.add_argument('--scenario', required=True)
        p.add_argument('--distance', type=float, required=True,
                       help='Tx-Rx distance in metres')
        p.add_argument('--ntx', type=int, default=1)
        p.add_argument('--nrx', type=int, default=1)
        p.add_argument('--nfreq', type=int, default=settings.DEFAULT_N_FREQ)
        p.add_argument('--bandwidth', type=float,
                       default=settings.DEFAULT_BANDWIDTH_HZ,
                       help='Hz, centred on the site carrier')
        p.add_argument('--spacing', type=float, default=0.5,
                       help='element spacing in wavelengths')
        p.add_argument('--seed', type=int, default=settings.DEFAULT_SEED)
        p.add_argument('--nop', type=int, default=None,
                       help='fixed number of paths (default: catalog mean)')
        p.add_argument('--narrowband', action='store_true',
                       help='evaluate path loss at the carrier only')
        p.add_argument('--no-los-pin', action='store_true',
                       help='do not force a direct path in LOS cells')
        p.add_argument('--angle-spread', default=None,
                       metavar='SHAPE,LOC,SCALE',
                       help='log-normal azimuth spread in degrees '
                            '(default: uniform azimuths)')
        p.add_argument('--format', choices=('bin', 'json'), default='bin')
        p.add_argument('--out', default='.')

    def _config(self, args, profile):
        if args.angle_spread:
            angles = AngleModel.lognormal(*parse_triple(args.angle_spread,
                                                        '--angle-spread'))
        else:
            angles = AngleModel.uniform()
        nop = NopSource.empirical_mean() if args.nop is None \
            else NopSource.fixed(args.nop)
        return SynthesisConfig(profile.name, args.scenario, nop_source=nop,
                               angle_model=angles, seed=args.seed,
                               los_pinning=not args.no_los_pin)

    def run(self, args):
        profile, stats = self.app.catalog.lookup(args.location, args.scenario)
        cfg = self._config(args, profile)
        ps = synth.draw_paths(profile, stats, cfg, args.distance)
        arr = ArrayConfig(args.ntx, args.nrx, args.spacing)
        grid = synth.frequency_grid(profile.center_freq_hz, args.bandwidth,
                                    args.nfreq)
        H = synth.frequency_response(ps, arr, grid,
                                     wideband_fspl=not args.narrowband)

        write_output(args.out, 'pathset.json',
                     json.dumps(ps.to_json(), sort_keys=True, indent=2) +
                     '\n')
        if args.format == 'json':
            write_output(args.out, 'channel.json',
                         synth.channel_to_json(H, grid) + '\n')
        else:
            buf = io.BytesIO()
            synth.save_channel(H, buf)
            write_output(args.out, 'channel.bin', buf.getvalue())
        taps = synth.tap_delay_line(ps, profile.center_freq_hz)
        frame = pd.DataFrame({'delay_s': [t.delay_s for t in taps],
                              'real': [t.amplitude.real for t in taps],
                              'imag': [t.amplitude.imag for t in taps]})
        write_output(args.out, 'taps.csv',
                     frame.to_csv(index=False, lineterminator='\n'))
        echo('%s %s at %g m: %d paths, H[%d, %d, %d]'
             % (profile.name, stats.scenario.value, args.distance, len(ps),
                H.shape[0], H.shape[1], H.shape[2]))
        return 0
