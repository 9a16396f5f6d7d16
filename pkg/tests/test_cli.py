"""Tests for the command line."""

import io
import json

import pytest

from DChannel import COMMAND
from DChannel import cli_dispatch
from dchannel.core import catalog as catalog_module
from dchannel.core import pipeline
from dchannel.core import synth


@pytest.fixture
def mpc_file(tmp_path, mpc_csv):
    path = tmp_path / 'mpc.csv'
    path.write_bytes(mpc_csv)
    return str(path)


def test_commands():
    assert sorted(COMMAND) == ['catalog', 'convert', 'fit', 'generate',
                               'med']


def test_no_subcommand(capsys):
    assert cli_dispatch([]) == 1
    assert 'usage' in capsys.readouterr().err


def test_unknown_subcommand(capsys):
    assert cli_dispatch(['plot']) == 1
    assert 'usage' in capsys.readouterr().err


def test_missing_required_flag():
    assert cli_dispatch(['generate', '--location', 'Sello']) == 1


def test_help_exits_cleanly(capsys):
    assert cli_dispatch(['--help']) == 0
    assert 'generate' in capsys.readouterr().out


# #######
# catalog
# #######

def test_catalog_show(capsys):
    assert cli_dispatch(['catalog', 'show', 'Sello', 'los']) == 0
    out = capsys.readouterr().out
    assert 'LogNormal(shape=0.37, loc=-35.5, scale=17.4)' in out


def test_catalog_show_unknown_location(capsys):
    assert cli_dispatch(['catalog', 'show', 'Atlantis', 'LOS']) == 2
    assert 'Atlantis' in capsys.readouterr().err


def test_catalog_dump(capsys, catalog):
    assert cli_dispatch(['catalog', 'dump']) == 0
    out = capsys.readouterr().out
    assert out.encode('utf-8') == catalog_module.save_catalog(catalog)


def test_catalog_validate(tmp_path, catalog, capsys):
    good = tmp_path / 'good.json'
    good.write_bytes(catalog_module.save_catalog(catalog))
    assert cli_dispatch(['catalog', 'validate', str(good)]) == 0
    assert 'ok, 7 locations, 14 cells' in capsys.readouterr().out

    bad = tmp_path / 'bad.json'
    obj = json.loads(good.read_text())
    obj['locations'][0]['eirp_dbm'] = 'loud'
    bad.write_text(json.dumps(obj))
    assert cli_dispatch(['catalog', 'validate', str(bad)]) == 2
    assert 'locations.0.eirp_dbm' in capsys.readouterr().err


def test_bad_catalog_flag(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{')
    assert cli_dispatch(['--catalog', str(path), 'catalog', 'show',
                         'Sello', 'LOS']) == 2


# ########
# generate
# ########

GENERATE = ['generate', '--location', 'Sello', '--scenario', 'LOS',
            '--distance', '30', '--ntx', '2', '--nrx', '4', '--nfreq', '16',
            '--seed', '7']


def test_generate_is_byte_reproducible(tmp_path):
    first, second = tmp_path / 'a', tmp_path / 'b'
    assert cli_dispatch(GENERATE + ['--out', str(first)]) == 0
    assert cli_dispatch(GENERATE + ['--out', str(second)]) == 0
    for name in ('pathset.json', 'channel.bin', 'taps.csv'):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_generate_outputs(tmp_path, capsys):
    assert cli_dispatch(GENERATE + ['--out', str(tmp_path)]) == 0
    assert '19 paths, H[16, 4, 2]' in capsys.readouterr().out
    with open(tmp_path / 'channel.bin', 'rb') as stream:
        H = synth.load_channel(stream)
    assert H.shape == (16, 4, 2)
    ps = synth.PathSet.from_json(
        json.loads((tmp_path / 'pathset.json').read_text()))
    assert len(ps) == 19
    taps = (tmp_path / 'taps.csv').read_text().splitlines()
    assert taps[0] == 'delay_s,real,imag'
    assert len(taps) == 20


def test_generate_json_and_options(tmp_path):
    argv = ['generate', '--location', 'Campus', '--scenario', 'NLOS',
            '--distance', '50', '--nfreq', '4', '--nop', '5',
            '--narrowband', '--angle-spread', '0.5,0,20', '--format', 'json',
            '--out', str(tmp_path)]
    assert cli_dispatch(argv) == 0
    obj = json.loads((tmp_path / 'channel.json').read_text())
    assert obj['shape'] == [4, 1, 1]


def test_generate_bad_angle_spread(tmp_path):
    argv = GENERATE + ['--angle-spread', '1,2', '--out', str(tmp_path)]
    assert cli_dispatch(argv) == 1


# ###
# med
# ###

def test_med_prints_reference_pair(capsys):
    argv = ['med', '--location', 'Campus', '--scenario', 'los', '--draws',
            '200', '--seed', '7']
    assert cli_dispatch(argv) == 0
    out = capsys.readouterr().out
    assert 'Campus LOS: model mean MED' in out
    assert 'reference: empirical 542.25 ns, model 562.04 ns' in out


def test_med_defaults_to_the_calibrated_threshold(tmp_path, capsys):
    argv = ['med', '--location', 'Campus', '--scenario', 'los', '--draws',
            '200', '--out', str(tmp_path)]
    assert cli_dispatch(argv) == 0
    assert 'threshold -140 dBm' in capsys.readouterr().out
    obj = json.loads((tmp_path / 'med.json').read_text())
    assert obj['threshold_dbm'] == -140.0
    assert obj['mean_med_ns'] == pytest.approx(562.04, rel=0.3)


def test_med_without_reference(capsys):
    argv = ['med', '--location', 'Sello', '--scenario', 'NLOS', '--draws',
            '50']
    assert cli_dispatch(argv) == 0
    assert 'reference: not tabulated' in capsys.readouterr().out


def test_med_writes_summary(tmp_path):
    argv = ['med', '--location', 'Sello', '--scenario', 'LOS', '--draws',
            '100', '--links', '4', '--noise-margin', '0', '--workers', '2',
            '--out', str(tmp_path)]
    assert cli_dispatch(argv) == 0
    obj = json.loads((tmp_path / 'med.json').read_text())
    assert obj['threshold_dbm'] == -128.0
    assert len(obj['per_link_med_ns']) == 4
    assert obj['reference'] == {'empirical_ns': 155.2, 'model_ns': 113.2}


def test_med_from_measured_links(tmp_path, mpc_file):
    argv = ['med', '--location', 'Sello', '--scenario', 'LOS', '--draws',
            '50', '--data', mpc_file, '--format', 'csv', '--out',
            str(tmp_path)]
    assert cli_dispatch(argv) == 0
    lines = (tmp_path / 'med.csv').read_text().splitlines()
    assert lines[0] == 'link,distance_m,med_ns'
    assert len(lines) == 4


def test_med_is_reproducible(tmp_path):
    argv = ['med', '--location', 'TUAS', '--scenario', 'LOS', '--draws',
            '100', '--seed', '3']
    assert cli_dispatch(argv + ['--out', str(tmp_path / 'a')]) == 0
    assert cli_dispatch(argv + ['--out', str(tmp_path / 'b')]) == 0
    assert (tmp_path / 'a' / 'med.json').read_bytes() == \
        (tmp_path / 'b' / 'med.json').read_bytes()


# ###
# fit
# ###

def test_fit_writes_report(tmp_path, mpc_file, capsys):
    argv = ['fit', '--data', mpc_file, '--families', 'Normal',
            'Exponential', '--out', str(tmp_path), '--plots']
    assert cli_dispatch(argv) == 0
    report = pipeline.parse_report((tmp_path / 'fits.csv').read_bytes())
    assert {r.family for r in report.rows} == {'Normal', 'Exponential'}
    assert (tmp_path / 'plots' / 'pdp.csv').exists()
    assert (tmp_path / 'plots' / 'Sello_LOS_ndd_model.csv').exists()
    assert 'Sello LOS: npd=' in capsys.readouterr().out


def test_fit_bad_data(tmp_path, capsys):
    path = tmp_path / 'bad.csv'
    path.write_text('location,link_id,scenario,distance_m,delay_ns,'
                    'power_dbm,aoa_deg,aod_deg\n'
                    'Sello,L1,LOS,10,soon,-90,,\n')
    assert cli_dispatch(['fit', '--data', str(path), '--out',
                         str(tmp_path)]) == 2
    assert 'line 2' in capsys.readouterr().err


def test_fit_missing_file(tmp_path):
    assert cli_dispatch(['fit', '--data', str(tmp_path / 'none.csv')]) == 1


# #######
# convert
# #######

def test_convert(tmp_path):
    native = tmp_path / 'native.csv'
    native.write_text('Site,Link,Cond,Dist,Delay_s,P\n'
                      'Sello,7,LOS,10,4.0e-08,-90.5\n')
    mapping = tmp_path / 'mapping.json'
    mapping.write_text(json.dumps({
        'columns': {'Site': 'location', 'Link': 'link_id',
                    'Cond': 'scenario', 'Dist': 'distance_m',
                    'Delay_s': 'delay_ns', 'P': 'power_dbm'},
        'constants': {'aoa_deg': '', 'aod_deg': ''},
        'scale': {'delay_ns': 1e9}}))
    out = tmp_path / 'out'
    assert cli_dispatch(['convert', '--mapping', str(mapping), '--data',
                         str(native), '--out', str(out)]) == 0
    dataset = pipeline.ingest(io.BytesIO(
        (out / 'measurements.csv').read_bytes()))
    assert len(dataset) == 1
