"""Run-time defaults and the lookups that resolve them."""

import os

from dchannel import globals

_defaultNpdFamilies = \
    ["Normal", "Exponential", "LogNormal", "Rayleigh", "Rician", "Nakagami",
     "Gamma", "Beta", "LogLogistic"]

_defaultNddFamilies = ["Exponential", "Weibull"]

_defaultNopFamilies = \
    ["Normal", "Exponential", "LogNormal", "Rayleigh", "Rician", "Nakagami",
     "Gamma", "Beta", "LogLogistic"]

# cells with fewer points (or links, for NoP) are reported, not fitted
MIN_FIT_POINTS = 3

# 30 dB below the strongest path, off unless asked for
DYNAMIC_RANGE_DB = 30.0

# sounder bandwidth used when no grid is given
DEFAULT_BANDWIDTH_HZ = 4e9
DEFAULT_N_FREQ = 256

DEFAULT_DRAWS = 10000
DEFAULT_SEED = 7

LOG_FORMAT = '%(asctime)s %(levelname)s %(message)s'
LOG_LEVEL = 'WARNING'


def get_default_catalog_path():
    """
    Path of the catalog used when none is given on the command line.

    ``$DCHANNEL_CATALOG`` wins over the copy shipped in ``dchannel/data``.
    """
    path = os.environ.get(globals.CATALOG_ENV_VAR)
    if path:
        return path
    return os.path.join(os.path.dirname(os.path.dirname(__file__)),
                        'data', 'catalog.json')


def get_default_families(quantity):
    if quantity == 'npd':
        return list(_defaultNpdFamilies)
    if quantity == 'ndd':
        return list(_defaultNddFamilies)
    if quantity == 'nop':
        return list(_defaultNopFamilies)
    raise KeyError(quantity)
