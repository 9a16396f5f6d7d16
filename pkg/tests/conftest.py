"""Shared fixtures."""

import pytest

from dchannel.core import catalog as catalog_module


def pytest_configure(config):
    config.addinivalue_line('markers',
                            'slow: draws 10^5 samples or more')


@pytest.fixture(scope='session')
def catalog():
    return catalog_module.default_catalog()


@pytest.fixture
def sello_los(catalog):
    return catalog.lookup('Sello', 'LOS')


@pytest.fixture
def mpc_csv():
    """Two links of one cell plus one placeholder link with no paths."""
    return (
        'location,link_id,scenario,distance_m,delay_ns,power_dbm,aoa_deg,'
        'aod_deg\n'
        'Sello,L1,LOS,10,33.4,-88.49,0,0\n'
        'Sello,L1,LOS,10,80.0,-101.2,35,12\n'
        'Sello,L1,LOS,10,61.5,-97.0,,\n'
        'Sello,L2,LOS,20,66.9,-94.5,180,0\n'
        'Sello,L2,LOS,20,120.3,-108.0,90,45\n'
        'Sello,L3,LOS,30,,,,\n'
    ).encode('utf-8')
