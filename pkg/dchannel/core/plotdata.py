"""
Plot-ready data files.

Nothing here draws: every function returns a :class:`pandas.DataFrame`
(or writes one as CSV) holding the points of a figure, so any plotting
tool can render it.
"""

import logging
import os

import numpy as np
import pandas as pd

from dchannel.core import metrics
from dchannel.core import pipeline
from dchannel.core import statdist
from dchannel.errors import CatalogLookupError
from dchannel.errors import NotAvailableError
from dchannel.errors import UsageError

CURVE_POINTS = 200


def _values(values):
    x = np.sort(np.asarray(values, dtype=float).ravel())
    if x.size == 0:
        raise UsageError('no data to plot')
    return x


def cdf_curves(values, specs, n_points=CURVE_POINTS):
    """
    Empirical CDF of ``values`` and the CDF of each named spec on a
    common grid spanning the data.
    """
    x = _values(values)
    grid = np.linspace(x[0], x[-1], n_points)
    frame = pd.DataFrame({'x': grid,
                          'empirical': np.searchsorted(x, grid,
                                                       side='right') / x.size})
    for name, spec in specs.items():
        frame[name] = statdist.cdf(spec, grid)
    return frame


def qq_pairs(values, spec):
    """Sorted data against the fitted law's quantiles at ``(i - 0.5) / m``."""
    x = _values(values)
    probs = (np.arange(1, x.size + 1) - 0.5) / x.size
    return pd.DataFrame({'empirical': x,
                         'theoretical': statdist.quantile(spec, probs)})


def pdp_scatter(dataset, catalog):
    """Normalized PDP points of every link with a catalog profile."""
    rows = []
    for (location, link_id), records in dataset.groups.items():
        if not records:
            continue
        try:
            profile = catalog.profile(location)
        except CatalogLookupError:
            continue
        scenario = dataset.links[(location, link_id)].scenario.value
        for point in metrics.pdp(records, profile):
            rows.append({'location': location, 'scenario': scenario,
                         'link_id': link_id, 'delay_ns': point.delay_ns,
                         'power_db': point.power_db})
    return pd.DataFrame(rows, columns=['location', 'scenario', 'link_id',
                                       'delay_ns', 'power_db'])


def delay_cdfs(empirical_ns, model_spec, n_points=CURVE_POINTS):
    """Measured against modelled normalized-delay CDF."""
    return cdf_curves(empirical_ns, {'model': model_spec}, n_points)


def write_csv(frame, path):
    frame.to_csv(path, index=False, lineterminator='\n')
    logging.debug("wrote %s (%d rows)", path, len(frame))
    return path


def _fitted_specs(report, location, scenario, quantity):
    specs = {}
    for row in report.select(location, scenario, quantity):
        if row.status == pipeline.STATUS_OK:
            specs[row.family] = row.to_spec()
    return specs


def emit_fit_plots(dataset, report, catalog, out_dir):
    """
    Write the figure data of a fit run into ``out_dir``: per cell the
    power and delay CDFs with every fitted family and the Q-Q pairs of the
    best family, the measured delays against the catalog's delay law, plus
    the PDP scatter and path count against distance.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for location, scenario in dataset.cells():
        sc = scenario.value
        stem = os.path.join(out_dir, '%s_%s' % (location, sc))
        groups = dataset.cell_groups(location, scenario)
        records = [r for recs in groups.values() for r in recs]
        delays = metrics.normalize_delays_by_link(groups)
        series = {'ndd': np.concatenate(list(delays.values()))
                  if delays else np.zeros(0)}
        try:
            profile, stats = catalog.lookup(location, scenario)
        except CatalogLookupError:
            stats = None
        else:
            series['npd'] = [metrics.normalize_power(r, profile)
                             for r in records]
        if stats is not None and len(series['ndd']):
            written.append(write_csv(delay_cdfs(series['ndd'], stats.ndd),
                                     '%s_ndd_model.csv' % stem))
        for quantity, values in series.items():
            specs = _fitted_specs(report, location, sc, quantity)
            if not specs or len(values) == 0:
                continue
            written.append(write_csv(cdf_curves(values, specs),
                                     '%s_%s_cdf.csv' % (stem, quantity)))
            try:
                best = pipeline.best_family(report, location, sc, quantity)
            except NotAvailableError:
                continue
            written.append(write_csv(qq_pairs(values, specs[best.value]),
                                     '%s_%s_qq.csv' % (stem, quantity)))
    written.append(write_csv(pdp_scatter(dataset, catalog),
                             os.path.join(out_dir, 'pdp.csv')))
    written.append(write_csv(pipeline.nop_vs_distance(dataset),
                             os.path.join(out_dir, 'nop_distance.csv')))
    return written
