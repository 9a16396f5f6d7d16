"""Helpers shared by the command classes."""

import logging
import os
import sys

from dchannel.errors import UsageError


def write_output(out_dir, name, data):
    """Write ``data`` (bytes or text) to ``out_dir/name``; return the path."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    if isinstance(data, str):
        data = data.encode('utf-8')
    with open(path, 'wb') as stream:
        stream.write(data)
    logging.debug("wrote %s (%d bytes)", path, len(data))
    return path


def echo(text=''):
    sys.stdout.write(text + '\n')


def parse_triple(text, what):
    """``'a,b,c'`` as three floats."""
    try:
        values = tuple(float(v) for v in text.split(','))
    except ValueError:
        values = ()
    if len(values) != 3:
        raise UsageError('%s needs three comma-separated numbers, got %r'
                         % (what, text))
    return values


def read_bytes(path):
    try:
        with open(path, 'rb') as stream:
            return stream.read()
    except OSError as err:
        raise UsageError('cannot read %s: %s' % (path, err.strerror))
