# Copyright (C) The DChannel Authors
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program; if not, write to the Free Software
# Foundation, Inc., 51 Franklin St, Fifth Floor, Boston, MA  02110-1301  USA

"""DChannel: a D-band MIMO channel simulator built on measured statistics."""

import argparse
import logging
import sys

from dchannel import __version__
from dchannel.core import settings
from dchannel.core.catalog import default_catalog
from dchannel.core.catalog import load_catalog_path
from dchannel.errors import DChannelError
from dchannel.errors import UsageError
from dchannel.ui.catalog_command import CatalogCommand
from dchannel.ui.convert_command import ConvertCommand
from dchannel.ui.fit_command import FitCommand
from dchannel.ui.generate_command import GenerateCommand
from dchannel.ui.med_command import MedCommand

"""
This Dictionary contains all the class types for the subcommands with the
name (eg. "med") under which the command line exposes them
"""

COMMAND = {'fit': FitCommand,
           'generate': GenerateCommand,
           'med': MedCommand,
           'catalog': CatalogCommand,
           'convert': ConvertCommand}


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage mistakes as :class:`UsageError` instead of exiting."""

    def error(self, message):
        raise UsageError('%s: %s' % (self.prog, message))


class DChannel(object):

    """Run-time state shared by the commands of one invocation."""

    def __init__(self, args):
        self.args = args
        self._catalog = None

    @property
    def catalog(self):
        # loaded on first use so `catalog validate` works without one
        if self._catalog is None:
            if self.args.catalog:
                self._catalog = load_catalog_path(self.args.catalog)
            else:
                self._catalog = default_catalog()
        return self._catalog


def build_parser():
    parser = ArgumentParser(prog='dchannel',
                            description='D-band MIMO channel simulator')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    parser.add_argument('--catalog', default=None,
                        help='catalog JSON (default: $DCHANNEL_CATALOG or '
                             'the packaged catalog)')
    parser.add_argument('--log-level', default=settings.LOG_LEVEL,
                        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'))
    parser.add_argument('--log-file', default=None)
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands = {}
    for name, command_class in COMMAND.items():
        sub = subparsers.add_parser(name, help=command_class.help)
        commands[name] = command_class(sub)
    return parser, commands


def _configure_logging(args):
    if args.log_file:
        logging.basicConfig(level=args.log_level,
                            format=settings.LOG_FORMAT,
                            filename=args.log_file,
                            filemode='w')
    else:
        logging.basicConfig(level=args.log_level,
                            format=settings.LOG_FORMAT)


def cli_dispatch(argv=None):
    """
    Run one command line and return its exit code: 0 on success, 1 for
    usage mistakes, 2 when the data or catalog are at fault.
    """
    parser, commands = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        parser.print_usage(sys.stderr)
        sys.stderr.write('%s\n' % err)
        return err.exit_code
    except SystemExit as err:
        # --help and --version
        return err.code or 0

    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1

    _configure_logging(args)
    logging.debug("running %s", args.command)
    command = commands[args.command]
    try:
        command.update(DChannel(args))
        return command.run(args) or 0
    except DChannelError as err:
        logging.error("%s failed: %s", args.command, err)
        sys.stderr.write('dchannel %s: error: %s\n' % (args.command, err))
        return err.exit_code
    except OSError as err:
        logging.error("%s failed: %s", args.command, err)
        sys.stderr.write('dchannel %s: error: %s\n' % (args.command, err))
        return 2


def main():
    sys.exit(cli_dispatch())


if __name__ == '__main__':
    main()
