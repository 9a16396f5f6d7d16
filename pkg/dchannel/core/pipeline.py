"""
Batch workflows over measurement data.

## Usage

```
with open('sello.csv', 'rb') as stream:
    dataset = ingest(stream, catalog)
report = run_fit_pipeline(dataset, catalog)
open('fits.csv', 'wb').write(emit_report(report, 'csv'))
```

A measurement file is a CSV with the header given by
:data:`dchannel.globals.MPC_COLUMNS`. A row whose ``delay_ns`` and
``power_dbm`` are both empty declares a measured link on which no path was
detected; it counts towards the number-of-paths statistics only.
"""

import io
import json
import logging
import re
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Dict
from typing import Optional
from typing import Tuple
from typing import Union

import numpy as np
import pandas as pd
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import ValidationError

from dchannel import globals
from dchannel.core import metrics
from dchannel.core import settings
from dchannel.core import statdist
from dchannel.core.catalog import Scenario
from dchannel.core.catalog import default_catalog
from dchannel.core.metrics import MpcRecord
from dchannel.errors import CatalogLookupError
from dchannel.errors import DChannelError
from dchannel.errors import IngestError
from dchannel.errors import NotAvailableError
from dchannel.errors import UsageError

LinkInfo = namedtuple('LinkInfo', ['location', 'link_id', 'scenario',
                                   'distance_m', 'path_count'])

STATUS_OK = 'ok'
STATUS_INSUFFICIENT = 'insufficient'
STATUS_FAILED = 'failed'
STATUS_SKIPPED = 'skipped'


def _as_stream(source):
    if isinstance(source, bytes):
        return io.BytesIO(source)
    if isinstance(source, str):
        return io.StringIO(source)
    return source


# ######
# Ingest
# ######

@dataclass
class MpcDataset:
    """
    Ingested measurements.

    ``groups`` maps ``(location, link_id)`` to the link's records sorted
    by delay; links declared by placeholder rows map to an empty list.
    """

    groups: Dict[Tuple[str, str], list] = field(default_factory=dict)
    links: Dict[Tuple[str, str], LinkInfo] = field(default_factory=dict)

    @classmethod
    def from_records(cls, records, empty_links=()):
        """Build a dataset from records plus ``(location, link_id,
        scenario, distance_m)`` tuples of links without paths."""
        dataset = cls()
        for rec in records:
            dataset._register(rec.location, rec.link_id, rec.scenario,
                              rec.distance_m)
            dataset.groups[(rec.location, rec.link_id)].append(rec)
        for location, link_id, scenario, distance in empty_links:
            dataset._register(location, link_id, Scenario.parse(scenario),
                              float(distance))
        for key in dataset.groups:
            dataset.groups[key].sort(key=lambda r: r.delay_ns)
        return dataset

    def _register(self, location, link_id, scenario, distance_m):
        key = (location, link_id)
        known = self.links.get(key)
        if known is None:
            self.links[key] = LinkInfo(location, link_id, scenario,
                                       distance_m, 0)
            self.groups[key] = []
        elif known.scenario is not scenario or \
                known.distance_m != distance_m:
            raise UsageError('link %s/%s changes scenario or distance'
                             % key)

    @property
    def records(self):
        return [rec for key in self.groups for rec in self.groups[key]]

    def __len__(self):
        return sum(len(v) for v in self.groups.values())

    def cells(self):
        """``(location, Scenario)`` pairs present, in first-seen order."""
        seen = []
        for info in self.links.values():
            cell = (info.location, info.scenario)
            if cell not in seen:
                seen.append(cell)
        return seen

    def links_in(self, location, scenario):
        """Links of a cell with their detected path counts."""
        scenario = Scenario.parse(scenario)
        return [info._replace(path_count=len(self.groups[key]))
                for key, info in self.links.items()
                if info.location == location and info.scenario is scenario]

    def cell_groups(self, location, scenario):
        scenario = Scenario.parse(scenario)
        return {key: self.groups[key] for key, info in self.links.items()
                if info.location == location and info.scenario is scenario}


def _canonical_location(name, catalog, allow_unknown, line):
    try:
        return catalog.profile(name).name
    except CatalogLookupError:
        if not allow_unknown:
            raise IngestError('unknown location %r' % name, line=line)
        logging.warning("line %d: location %r is not in the catalog",
                        line, name)
        return name


def _first_error(err):
    first = err.errors()[0]
    where = '.'.join(str(p) for p in first['loc'])
    return '%s: %s' % (where, first['msg']) if where else first['msg']


def _parser_line(err):
    match = re.search(r'line (\d+)', str(err))
    return int(match.group(1)) if match else None


def ingest(source, catalog=None, allow_unknown=False):
    """
    Read a measurement CSV into an :class:`MpcDataset`.

    Raises :class:`IngestError` carrying the 1-based line number of the
    first bad row.
    """
    catalog = catalog or default_catalog()
    # the header is read as a plain row so that no row can widen the table
    # into an implicit index column
    try:
        frame = pd.read_csv(_as_stream(source), header=None, dtype=str,
                            keep_default_na=False).fillna('')
    except pd.errors.EmptyDataError:
        raise IngestError('empty file', line=1)
    except pd.errors.ParserError as err:
        raise IngestError('malformed CSV (%s)' % str(err).strip(),
                          line=_parser_line(err))
    header = [c.strip() for c in frame.iloc[0]]
    if header != list(globals.MPC_COLUMNS):
        raise IngestError('header must be %s' % ','.join(globals.MPC_COLUMNS),
                          line=1)
    frame = frame.iloc[1:].set_axis(header, axis=1)

    records = []
    empty_links = []
    for idx, row in enumerate(frame.itertuples(index=False)):
        line = idx + 2
        values = {k: v.strip() for k, v in row._asdict().items()}
        location = _canonical_location(values['location'], catalog,
                                       allow_unknown, line)
        values['location'] = location
        if not values['delay_ns'] and not values['power_dbm']:
            try:
                scenario = Scenario.parse(values['scenario'])
                distance = float(values['distance_m'])
            except (LookupError, ValueError) as err:
                raise IngestError(str(err), line=line)
            if not distance > 0:
                raise IngestError('distance must be > 0', line=line)
            empty_links.append((location, values['link_id'], scenario,
                                distance))
            continue
        for name in ('aoa_deg', 'aod_deg'):
            if not values[name]:
                values[name] = None
        try:
            records.append(MpcRecord.model_validate(values))
        except ValidationError as err:
            raise IngestError(_first_error(err), line=line)
    try:
        dataset = MpcDataset.from_records(records, empty_links)
    except UsageError as err:
        raise IngestError(str(err))
    logging.debug("ingested %d records on %d links", len(dataset),
                  len(dataset.links))
    return dataset


# ############
# Fit Pipeline
# ############

def _opt_float(value):
    return None if value is None else float(value)


class FitRow(BaseModel):
    """One attempted fit: a row of an appendix-style table."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    location: str
    scenario: str
    quantity: str
    family: str
    status: str
    n: int
    ks_statistic: Optional[float] = None
    p_value: Optional[float] = None
    qq_correlation: Optional[float] = None
    loc: Optional[float] = None
    scale: Optional[float] = None
    shape: Tuple[float, ...] = ()
    message: str = ''

    def to_spec(self):
        if self.status != STATUS_OK:
            raise NotAvailableError('%s %s %s %s was not fitted'
                                    % (self.location, self.scenario,
                                       self.quantity, self.family))
        return statdist.DistSpec(statdist.DistFamily.parse(self.family),
                                 self.shape, self.loc, self.scale)


class FitReport(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    rows: Tuple[FitRow, ...] = ()
    metadata: Dict[str, Any] = {}

    def select(self, location=None, scenario=None, quantity=None):
        return [r for r in self.rows
                if (location is None or r.location == location) and
                (scenario is None or r.scenario == scenario) and
                (quantity is None or r.quantity == quantity)]


def fit_values(location, scenario, quantity, values, families,
               fix_loc=None, min_points=settings.MIN_FIT_POINTS):
    """Fit every family to ``values``; one :class:`FitRow` per family."""
    values = np.asarray(values, dtype=float)
    base = {'location': location, 'scenario': scenario,
            'quantity': quantity, 'n': int(values.size)}
    rows = []
    for name in families:
        family = statdist.DistFamily.parse(name).value
        if values.size < min_points:
            rows.append(FitRow(family=family, status=STATUS_INSUFFICIENT,
                               message='insufficient data: %d < %d'
                               % (values.size, min_points), **base))
            continue
        logging.debug("fitting %s %s %s %s", location, scenario, quantity,
                      family)
        try:
            gof = statdist.goodness_of_fit(family, values, fix_loc=fix_loc)
        except DChannelError as err:
            rows.append(FitRow(family=family, status=STATUS_FAILED,
                               message=str(err), **base))
            continue
        scores = (gof.ks_statistic, gof.p_value, gof.qq_correlation)
        if not np.all(np.isfinite(scores)):
            rows.append(FitRow(family=family, status=STATUS_FAILED,
                               message='fit scores are not finite', **base))
            continue
        rows.append(FitRow(family=family, status=STATUS_OK,
                           ks_statistic=float(gof.ks_statistic),
                           p_value=float(gof.p_value),
                           qq_correlation=float(gof.qq_correlation),
                           loc=float(gof.fitted.loc),
                           scale=float(gof.fitted.scale),
                           shape=tuple(float(s) for s in gof.fitted.shape),
                           **base))
    return rows


def _families(families):
    if families is None:
        return {q: settings.get_default_families(q)
                for q in globals.QUANTITIES}
    if isinstance(families, dict):
        out = {q: settings.get_default_families(q)
               for q in globals.QUANTITIES}
        out.update({q: list(v) for q, v in families.items()})
        return out
    return {q: list(families) for q in globals.QUANTITIES}


def _fit_cell(dataset, catalog, location, scenario, families, min_points):
    sc = scenario.value
    groups = dataset.cell_groups(location, scenario)
    records = [rec for recs in groups.values() for rec in recs]
    rows = []

    try:
        profile = catalog.profile(location)
    except CatalogLookupError:
        profile = None
    if profile is None:
        rows += [FitRow(location=location, scenario=sc, quantity='npd',
                        family=statdist.DistFamily.parse(f).value,
                        status=STATUS_SKIPPED, n=len(records),
                        message='no catalog profile to normalize power')
                 for f in families['npd']]
    else:
        powers = [metrics.normalize_power(r, profile) for r in records]
        rows += fit_values(location, sc, 'npd', powers, families['npd'],
                           min_points=min_points)

    delays = metrics.normalize_delays_by_link(groups)
    pooled = np.concatenate(list(delays.values())) if delays else []
    rows += fit_values(location, sc, 'ndd', pooled, families['ndd'],
                       fix_loc=0.0, min_points=min_points)

    counts = [info.path_count for info in dataset.links_in(location,
                                                           scenario)]
    rows += fit_values(location, sc, 'nop', counts, families['nop'],
                       min_points=min_points)
    nop = {'links': len(counts), 'min': int(min(counts)),
           'max': int(max(counts)), 'mean': float(np.mean(counts))}
    return rows, nop


def _cell_order(dataset, catalog):
    known = {name: i for i, name in enumerate(catalog.names)}
    scenarios = list(Scenario)

    def key(cell):
        location, scenario = cell
        return (known.get(location, len(known)), location,
                scenarios.index(scenario))

    return sorted(dataset.cells(), key=key)


def run_fit_pipeline(dataset, catalog=None, families=None,
                     min_points=settings.MIN_FIT_POINTS, workers=1):
    """
    Fit and score every candidate family for every cell of ``dataset``.

    Normalized power is fitted with a free location, normalized delay with
    the location held at zero, path counts on the per-link counts. Failed
    or undersized fits become rows with a status instead of errors. Row
    order depends only on the data and the catalog.
    """
    catalog = catalog or default_catalog()
    families = _families(families)
    cells = _cell_order(dataset, catalog)

    def run(cell):
        return _fit_cell(dataset, catalog, cell[0], cell[1], families,
                         min_points)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, cells))
    else:
        results = [run(cell) for cell in cells]

    rows = []
    nop = {}
    for (location, scenario), (cell_rows, cell_nop) in zip(cells, results):
        rows += cell_rows
        nop['%s/%s' % (location, scenario.value)] = cell_nop
    metadata = {'records': len(dataset),
                'links': len(dataset.links),
                'min_points': int(min_points),
                'families': families,
                'nop': nop}
    return FitReport(rows=tuple(rows), metadata=metadata)


def best_family(report, location, scenario, quantity):
    """Family with the smallest KS statistic among successful fits."""
    scenario = Scenario.parse(scenario).value
    rows = [r for r in report.select(location, scenario, quantity)
            if r.status == STATUS_OK]
    if not rows:
        raise NotAvailableError('no successful %s fit for %s %s'
                                % (quantity, location, scenario))
    return statdist.DistFamily.parse(
        min(rows, key=lambda r: r.ks_statistic).family)


def nop_vs_distance(dataset):
    """Per-link path count against Tx-Rx separation."""
    rows = [{'location': info.location, 'scenario': info.scenario.value,
             'link_id': info.link_id, 'distance_m': info.distance_m,
             'nop': len(dataset.groups[key])}
            for key, info in dataset.links.items()]
    frame = pd.DataFrame(rows, columns=['location', 'scenario', 'link_id',
                                        'distance_m', 'nop'])
    return frame.sort_values(['location', 'scenario', 'distance_m'],
                             kind='stable').reset_index(drop=True)


# ######
# Report
# ######

def _cell_text(value):
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ';'.join(repr(float(v)) for v in value)
    return str(value)


def emit_report(report, fmt='csv'):
    """
    Encode a report. CSV puts the metadata on a first ``# {json}`` line
    and writes floats with ``repr`` so nothing is lost; JSON sorts keys.
    """
    if fmt == 'json':
        text = json.dumps(report.model_dump(mode='json'), sort_keys=True,
                          indent=2)
        return (text + '\n').encode('utf-8')
    if fmt != 'csv':
        raise UsageError('unknown report format %r' % fmt)
    cells = [[_cell_text(getattr(row, col)) for col in globals.REPORT_COLUMNS]
             for row in report.rows]
    frame = pd.DataFrame(cells, columns=list(globals.REPORT_COLUMNS))
    head = '# %s\n' % json.dumps(report.metadata, sort_keys=True)
    return (head + frame.to_csv(index=False, lineterminator='\n')) \
        .encode('utf-8')


def _row_in(values):
    out = {}
    for col in globals.REPORT_COLUMNS:
        text = values[col]
        if col == 'shape':
            out[col] = tuple(float(s) for s in text.split(';')) if text \
                else ()
        elif col in ('location', 'scenario', 'quantity', 'family', 'status',
                     'message'):
            out[col] = text
        elif col == 'n':
            out[col] = int(text)
        else:
            out[col] = _opt_float(text or None)
    return FitRow(**out)


def parse_report(data, fmt='csv'):
    """Inverse of :func:`emit_report`."""
    if isinstance(data, bytes):
        data = data.decode('utf-8')
    if fmt == 'json':
        return FitReport.model_validate(json.loads(data))
    if fmt != 'csv':
        raise UsageError('unknown report format %r' % fmt)
    head, _, body = data.partition('\n')
    if not head.startswith('# '):
        raise UsageError('report is missing its metadata line')
    metadata = json.loads(head[2:])
    frame = pd.read_csv(io.StringIO(body), dtype=str, keep_default_na=False)
    rows = tuple(_row_in(values) for values in frame.to_dict('records'))
    return FitReport(rows=rows, metadata=metadata)


# #########
# Converter
# #########

class NativeMapping(BaseModel):
    """
    How a native measurement export maps onto the MPC columns.

    ``columns`` renames native columns, ``constants`` fills columns the
    export lacks and ``scale`` multiplies numeric columns after renaming
    (for example seconds to nanoseconds).
    """

    model_config = ConfigDict(frozen=True, extra='forbid')

    columns: Dict[str, str] = {}
    constants: Dict[str, Union[str, float]] = {}
    scale: Dict[str, float] = {}


def load_mapping(source):
    if hasattr(source, 'read'):
        source = source.read()
    try:
        return NativeMapping.model_validate_json(source)
    except ValidationError as err:
        raise UsageError('bad mapping file: %s' % _first_error(err))


def _scaled(text, factor):
    text = text.strip()
    if not text:
        return ''
    try:
        return repr(float(text) * factor)
    except ValueError:
        return text


def convert_native(source, mapping):
    """Rewrite a native CSV export as a measurement CSV."""
    if not isinstance(mapping, NativeMapping):
        mapping = NativeMapping.model_validate(mapping)
    frame = pd.read_csv(_as_stream(source), dtype=str, keep_default_na=False)
    frame = frame.rename(columns=mapping.columns)
    for column, value in mapping.constants.items():
        frame[column] = str(value)
    missing = [c for c in globals.MPC_COLUMNS if c not in frame.columns]
    if missing:
        raise UsageError('mapping leaves columns unfilled: %s'
                         % ', '.join(missing))
    for column, factor in mapping.scale.items():
        if column not in globals.MPC_COLUMNS:
            raise UsageError('cannot scale unknown column %r' % column)
        frame[column] = [_scaled(v, factor) for v in frame[column]]
    out = frame[list(globals.MPC_COLUMNS)]
    logging.debug("converted %d native rows", len(out))
    return out.to_csv(index=False, lineterminator='\n').encode('utf-8')
