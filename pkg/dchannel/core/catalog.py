"""
Machine-readable campaign constants and fitted statistics per measured
site.

A :class:`Catalog` holds one :class:`LocationProfile` per site; each
profile holds a :class:`ScenarioStats` per propagation scenario with the
power (NPD), delay (NDD) and path count (NoP) statistics. The shipped
catalog lives in ``dchannel/data/catalog.json``; see
:func:`settings.get_default_catalog_path` for how another file is picked.

Catalogs are immutable after loading and can be shared freely.
"""

import functools
import json
import logging
from collections import namedtuple
from enum import Enum
from typing import Annotated
from typing import Optional
from typing import Tuple

import pandas as pd
from pydantic import BaseModel
from pydantic import BeforeValidator
from pydantic import ConfigDict
from pydantic import PlainSerializer
from pydantic import PlainValidator
from pydantic import ValidationError
from pydantic import field_validator
from pydantic import model_validator

from dchannel.core import settings
from dchannel.core.statdist import DistFamily
from dchannel.core.statdist import DistSpec
from dchannel.errors import CatalogLookupError
from dchannel.errors import CatalogParseError
from dchannel.errors import NotAvailableError
from dchannel.errors import ParameterError

FitPolicy = namedtuple('FitPolicy', ['npd', 'ndd'])
MedReference = namedtuple('MedReference', ['empirical_ns', 'model_ns'])


class Environment(str, Enum):
    INDOOR = 'indoor'
    OUTDOOR = 'outdoor'


class Scenario(str, Enum):
    LOS = 'LOS'
    NLOS = 'NLOS'

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().upper())
        except ValueError:
            raise CatalogLookupError('unknown scenario %r' % (name,))


def _spec_in(value):
    if isinstance(value, DistSpec):
        return value
    try:
        return DistSpec.from_json(value)
    except ParameterError as err:
        raise ValueError(str(err))


def _family_in(value):
    try:
        return DistFamily.parse(value)
    except ParameterError as err:
        raise ValueError(str(err))


def _scenario_in(value):
    if isinstance(value, str):
        return value.strip().upper()
    return value


SpecField = Annotated[DistSpec, PlainValidator(_spec_in),
                      PlainSerializer(lambda spec: spec.to_json(),
                                      return_type=dict)]
FamilyField = Annotated[DistFamily, BeforeValidator(_family_in)]
ScenarioField = Annotated[Scenario, BeforeValidator(_scenario_in)]


# ############
# Schema
# ############

class PublishedFit(BaseModel):
    """
    One row of a tabulated goodness-of-fit summary.

    Entries the tables leave blank are ``None``: the second Beta shape,
    the Weibull shape in the delay tables and every parameter of the
    path-count tables.
    """

    model_config = ConfigDict(frozen=True, extra='forbid')

    family: FamilyField
    ks_statistic: Optional[float] = None
    p_value: Optional[float] = None
    qq_correlation: Optional[float] = None
    loc: Optional[float] = None
    scale: Optional[float] = None
    shape: Tuple[Optional[float], ...] = ()

    def to_spec(self):
        """The row as a :class:`DistSpec`, if every parameter is known."""
        if self.loc is None or self.scale is None or \
                len(self.shape) != self.family.shape_count or \
                any(s is None for s in self.shape):
            raise NotAvailableError('%s row does not carry a complete '
                                    'parameter set' % self.family.value)
        return DistSpec(self.family, self.shape, self.loc, self.scale)


class NopStats(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    max: int
    min: int
    mean: float

    @model_validator(mode='after')
    def _ordered(self):
        if not self.min <= self.mean <= self.max:
            raise ValueError('need min <= mean <= max, got %d, %g, %d'
                             % (self.min, self.mean, self.max))
        return self


class ScenarioStats(BaseModel):
    """
    Fitted statistics of one (location, scenario) cell.

    ``med_threshold_dbm`` is the detection threshold at which the model
    MED of the cell matches ``med_model_ns``; cells without one use the
    site noise threshold.
    """

    model_config = ConfigDict(frozen=True, extra='forbid')

    scenario: ScenarioField
    npd: SpecField
    ndd: SpecField
    nop: NopStats
    data_points: int
    measurements: int
    med_empirical_ns: Optional[float] = None
    med_model_ns: Optional[float] = None
    med_threshold_dbm: Optional[float] = None
    low_confidence: bool = False
    npd_published: Tuple[PublishedFit, ...] = ()
    ndd_published: Tuple[PublishedFit, ...] = ()
    nop_published: Tuple[PublishedFit, ...] = ()

    @field_validator('ndd')
    @classmethod
    def _ndd_at_zero(cls, spec):
        if spec.loc != 0:
            raise ValueError('normalized delay loc must be 0, got %g'
                             % spec.loc)
        return spec

    @model_validator(mode='after')
    def _counts(self):
        if not self.data_points >= self.measurements >= 0:
            raise ValueError('need data_points >= measurements >= 0, got '
                             '%d, %d' % (self.data_points, self.measurements))
        return self

    def published(self, quantity, family):
        rows = {'npd': self.npd_published,
                'ndd': self.ndd_published,
                'nop': self.nop_published}[quantity]
        family = DistFamily.parse(family)
        for row in rows:
            if row.family is family:
                return row
        raise NotAvailableError('no published %s row for %s'
                                % (quantity, family.value))


class LocationProfile(BaseModel):
    """Campaign constants of one measured site."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    name: str
    environment: Environment
    rf_band_hz: Tuple[float, float]
    center_freq_hz: float
    eirp_dbm: float
    tx_gain_dbi: float = 0.0
    rx_gain_dbi: float = 19.0
    rf_power_dbm: Optional[float] = None
    noise_floor_dbm: float = -128.0
    noise_margin_db: float = 10.0
    link_distance_range_m: Tuple[float, float]
    tx_height_m: float
    rx_height_m: float
    rx_azimuth_range_deg: str = ''
    rx_azimuth_step_deg: Optional[float] = None
    scenarios: Tuple[ScenarioStats, ...] = ()

    @model_validator(mode='after')
    def _ranges(self):
        low, high = self.rf_band_hz
        if not low < high:
            raise ValueError('rf band must have low < high')
        if not low <= self.center_freq_hz <= high:
            raise ValueError('center frequency %g Hz lies outside the band'
                             % self.center_freq_hz)
        dmin, dmax = self.link_distance_range_m
        if not 0 < dmin < dmax:
            raise ValueError('link distance range must have 0 < min < max')
        names = [s.scenario for s in self.scenarios]
        if len(set(names)) != len(names):
            raise ValueError('scenario listed twice')
        return self

    @property
    def noise_threshold_dbm(self):
        return self.noise_floor_dbm + self.noise_margin_db

    def scenario(self, scenario):
        scenario = Scenario.parse(scenario)
        for stats in self.scenarios:
            if stats.scenario is scenario:
                return stats
        raise CatalogLookupError('%s has no %s statistics'
                                 % (self.name, scenario.value))


class Catalog(BaseModel):

    model_config = ConfigDict(frozen=True, extra='forbid')

    version: int = 1
    locations: Tuple[LocationProfile, ...]

    @model_validator(mode='after')
    def _unique(self):
        names = [p.name.lower() for p in self.locations]
        if len(set(names)) != len(names):
            raise ValueError('location listed twice')
        return self

    @property
    def names(self):
        return [p.name for p in self.locations]

    def profile(self, location):
        key = str(location).strip().lower()
        for profile in self.locations:
            if profile.name.lower() == key:
                return profile
        raise CatalogLookupError('unknown location %r' % (location,))

    def lookup(self, location, scenario):
        """Return ``(LocationProfile, ScenarioStats)`` for the cell."""
        profile = self.profile(location)
        stats = profile.scenario(scenario)
        if stats.low_confidence:
            logging.warning("%s %s rests on %d measurement(s); treat its "
                            "statistics as low confidence", profile.name,
                            stats.scenario.value, stats.measurements)
        return profile, stats

    def cells(self):
        for profile in self.locations:
            for stats in profile.scenarios:
                yield profile, stats


# ############
# Load / Save
# ############

def _error_path(err):
    first = err.errors()[0]
    return '.'.join(str(p) for p in first['loc']), first['msg']


def load_catalog(source):
    """
    Parse a catalog from bytes, text or a readable stream.

    Raises :class:`CatalogParseError` naming the offending field.
    """
    if hasattr(source, 'read'):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode('utf-8')
    try:
        obj = json.loads(source)
    except ValueError as err:
        raise CatalogParseError('invalid JSON (%s)' % err)
    try:
        catalog = Catalog.model_validate(obj)
    except ValidationError as err:
        path, msg = _error_path(err)
        raise CatalogParseError(msg, path=path)
    logging.debug("loaded catalog with %d locations", len(catalog.locations))
    return catalog


def save_catalog(catalog):
    """Canonical JSON encoding: sorted keys, 2-space indent."""
    text = json.dumps(catalog.model_dump(mode='json'), sort_keys=True,
                      indent=2)
    return (text + '\n').encode('utf-8')


def load_catalog_path(path):
    with open(path, 'rb') as stream:
        return load_catalog(stream)


@functools.lru_cache(maxsize=8)
def _cached(path):
    return load_catalog_path(path)


def default_catalog():
    return _cached(settings.get_default_catalog_path())


# ##############
# Derived Lookups
# ##############

def best_fit_policy(location, scenario, catalog=None):
    """
    Families used to synthesize a cell: indoor NLOS power follows a
    log-logistic law, every other cell a log-normal one, and delays are
    always exponential.
    """
    catalog = catalog or default_catalog()
    profile = catalog.profile(location)
    scenario = Scenario.parse(scenario)
    profile.scenario(scenario)
    if profile.environment is Environment.INDOOR and \
            scenario is Scenario.NLOS:
        npd = DistFamily.LOGLOGISTIC
    else:
        npd = DistFamily.LOGNORMAL
    return FitPolicy(npd, DistFamily.EXPONENTIAL)


def med_reference(location, scenario, catalog=None):
    """Tabulated (empirical, model) average maximum excess delay in ns."""
    catalog = catalog or default_catalog()
    profile, stats = catalog.lookup(location, scenario)
    if stats.med_empirical_ns is None or stats.med_model_ns is None:
        raise NotAvailableError('no reference MED for %s %s'
                                % (profile.name, stats.scenario.value))
    return MedReference(stats.med_empirical_ns, stats.med_model_ns)


def _or_dash(value):
    return '-' if value is None else '%g' % value


def format_row(profile, stats):
    """One-row text table describing a cell, for ``catalog show``."""
    row = {'location': profile.name,
           'scenario': stats.scenario.value,
           'environment': profile.environment.value,
           'fc_GHz': profile.center_freq_hz / 1e9,
           'eirp_dBm': profile.eirp_dbm,
           'range_m': '%g-%g' % profile.link_distance_range_m,
           'points': stats.data_points,
           'links': stats.measurements,
           'npd': str(stats.npd),
           'ndd': str(stats.ndd),
           'nop(max/min/mean)': '%d/%d/%g' % (stats.nop.max, stats.nop.min,
                                              stats.nop.mean),
           'med_ns(emp/model)': '%s/%s' % (_or_dash(stats.med_empirical_ns),
                                           _or_dash(stats.med_model_ns))}
    text = pd.DataFrame([row]).to_string(index=False)
    if stats.low_confidence:
        text += '\n(low confidence: %d measurement(s))' % stats.measurements
    return text
