from dchannel.core.pipeline import convert_native
from dchannel.core.pipeline import load_mapping
from dchannel.ui.misc import echo
from dchannel.ui.misc import read_bytes
from dchannel.ui.misc import write_output


class ConvertCommand(object):
    """Rewrites a native measurement export as a measurement CSV."""

    help = 'convert a native export with a mapping file'

    def __init__(self, parser):
        super(ConvertCommand, self).__init__()
        self.parser = parser
        self._init_arguments()

    def update(self, app):
        self.app = app

    def _init_arguments(self):
        p = self.parser
        p.add_argument('--mapping', required=True,
                       help='JSON mapping file, see '
                            'dchannel/data/native_mapping.example.json')
        p.add_argument('--data', required=True, help='native CSV export')
        p.add_argument('--out', default='.')

    def run(self, args):
        mapping = load_mapping(read_bytes(args.mapping))
        data = convert_native(read_bytes(args.data), mapping)
        path = write_output(args.out, 'measurements.csv', data)
        echo('wrote %s (%d rows)' % (path, data.count(b'\n') - 1))
        return 0
