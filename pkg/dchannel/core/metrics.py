"""
Normalization transforms, power delay profiles, noise-floor thresholding
and the maximum excess delay (MED) metric.

Normalized power is the excess gain of a path over free space at the
path's own length: a path that suffered nothing but free-space loss maps
to 0 dB, weaker paths to negative values. Normalized delay is the delay
relative to the first arrival of the same link.
"""

import logging
import math
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import FiniteFloat
from pydantic import field_validator
from pydantic import model_validator

from dchannel import globals
from dchannel.core import statdist
from dchannel.core.catalog import ScenarioField
from dchannel.core.synth import PathSet
from dchannel.core.synth import draw_path_batch
from dchannel.core.synth import fspl_db
from dchannel.errors import DomainError
from dchannel.errors import NotAvailableError
from dchannel.errors import UsageError

PdpPoint = namedtuple('PdpPoint', ['delay_ns', 'power_db'])


class MpcRecord(BaseModel):
    """One measured multipath component."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    location: str
    link_id: str
    scenario: ScenarioField
    distance_m: FiniteFloat
    delay_ns: FiniteFloat
    power_dbm: FiniteFloat
    aoa_deg: Optional[FiniteFloat] = None
    aod_deg: Optional[FiniteFloat] = None

    @field_validator('distance_m')
    @classmethod
    def _positive_distance(cls, value):
        if value <= 0:
            raise ValueError('distance must be > 0')
        return value

    @field_validator('delay_ns')
    @classmethod
    def _non_negative_delay(cls, value):
        if value < 0:
            raise ValueError('delay must be >= 0')
        return value

    @model_validator(mode='after')
    def _causal(self):
        direct_ns = self.distance_m / globals.SPEED_OF_LIGHT / globals.NS
        if self.delay_ns < direct_ns:
            logging.warning("%s/%s: delay %g ns is shorter than the direct "
                            "path (%g ns)", self.location, self.link_id,
                            self.delay_ns, direct_ns)
        return self


# #############
# Normalization
# #############

def noise_threshold(profile, margin_db=None):
    """Noise floor plus margin, the profile's own margin by default."""
    margin = profile.noise_margin_db if margin_db is None else margin_db
    return profile.noise_floor_dbm + margin


def med_threshold(profile, stats, margin_db=None):
    """
    Threshold used for the model MED of a cell.

    An explicit ``margin_db`` over the noise floor wins; otherwise the
    cell's calibrated ``med_threshold_dbm``, then the site threshold.
    """
    if margin_db is not None:
        return noise_threshold(profile, margin_db)
    if stats.med_threshold_dbm is not None:
        return stats.med_threshold_dbm
    return noise_threshold(profile)


def received_power_dbm(profile, delay_s, excess_gain_db=0.0,
                       include_rx_gain=True):
    """
    Absolute power of paths with the given delays and excess gains:
    EIRP plus Rx gain minus free-space loss over ``c * delay``.
    """
    budget = profile.eirp_dbm + (profile.rx_gain_dbi if include_rx_gain
                                 else 0.0)
    delay = np.asarray(delay_s, dtype=float)
    loss = fspl_db(globals.SPEED_OF_LIGHT * delay, profile.center_freq_hz)
    return (budget - loss) + excess_gain_db


def normalize_power(rec, profile, include_rx_gain=True):
    """Excess gain of a measured path over free space, in dB."""
    if not rec.delay_ns > 0:
        raise DomainError('%s/%s: cannot normalize a zero delay'
                          % (rec.location, rec.link_id))
    free_space = received_power_dbm(profile, rec.delay_ns * globals.NS,
                                    0.0, include_rx_gain)
    return rec.power_dbm - free_space


def normalize_delay(delays_ns):
    """Delays of one link relative to its first arrival, order kept."""
    delays = np.asarray(delays_ns, dtype=float).ravel()
    if delays.size == 0:
        raise UsageError('cannot normalize the delays of an empty link')
    return delays - delays.min()


def normalize_delays_by_link(groups):
    """
    ``{link: normalized delays}`` for ``{link: records}``.

    The total number of values equals the total number of records.
    """
    return {key: normalize_delay([r.delay_ns for r in records])
            for key, records in groups.items() if len(records)}


def pdp(source, profile, include_rx_gain=True):
    """
    Power delay profile points ``(delay_ns, normalized_power_db)`` sorted
    by delay, from a :class:`PathSet` or measured records.
    """
    if isinstance(source, PathSet):
        delays = source.delay_s / globals.NS
        powers = source.excess_gain_db
    else:
        records = list(source)
        delays = np.array([r.delay_ns for r in records], dtype=float)
        powers = np.array([normalize_power(r, profile, include_rx_gain)
                           for r in records], dtype=float)
    order = np.argsort(delays, kind='stable')
    above = int(np.sum(powers > 0))
    if above:
        logging.warning("%d PDP point(s) above 0 dB: stronger than free "
                        "space", above)
    return [PdpPoint(float(delays[i]), float(powers[i])) for i in order]


# ##########
# Thresholds
# ##########

def noise_mask(powers_dbm, threshold_dbm):
    if math.isnan(threshold_dbm):
        raise UsageError('noise threshold must not be NaN')
    return np.asarray(powers_dbm, dtype=float) >= threshold_dbm


def apply_noise_floor(powers_dbm, threshold_dbm):
    """Powers at or above the threshold, in their original order."""
    powers = np.asarray(powers_dbm, dtype=float)
    return powers[noise_mask(powers, threshold_dbm)]


def dynamic_range_filter(powers_dbm, range_db=30.0, keep=None):
    """
    Mask of paths within ``range_db`` of the strongest one.

    Works along the last axis, so a ``(draws, paths)`` block is filtered
    draw by draw. Only paths in ``keep`` count as the strongest.
    """
    powers = np.asarray(powers_dbm, dtype=float)
    if powers.size == 0:
        return np.zeros(powers.shape, dtype=bool)
    if keep is not None:
        powers = np.where(keep, powers, -np.inf)
    strongest = powers.max(axis=-1, keepdims=True)
    return powers >= strongest - range_db


def med(delays):
    """Maximum excess delay: last arrival minus first arrival."""
    values = np.asarray(delays, dtype=float).ravel()
    if values.size == 0:
        raise NotAvailableError('no surviving paths')
    return float(values.max() - values.min())


# ##########
# Monte Carlo
# ##########

@dataclass(frozen=True)
class MedSummary:
    mean_med_ns: float
    per_link_med_ns: tuple
    n_draws: int
    surviving_path_fraction: float
    extinct_draws: int
    link_distances_m: tuple
    threshold_dbm: float

    def to_json(self):
        obj = asdict(self)
        obj['per_link_med_ns'] = [None if math.isnan(v) else v
                                  for v in self.per_link_med_ns]
        obj['link_distances_m'] = list(self.link_distances_m)
        return obj


def default_link_distances(profile, stats):
    """One link per measurement, evenly spread over the distance range."""
    dmin, dmax = profile.link_distance_range_m
    return np.linspace(dmin, dmax, max(stats.measurements, 1))


def _link_med(profile, stats, cfg, distance, n_draws, threshold,
              include_rx_gain, dynamic_range_db, nop, index):
    if nop == 0:
        return float('nan'), 0, 0, n_draws
    rng = statdist.substream(cfg.seed, index)
    batch = draw_path_batch(profile, stats, cfg, distance, n_draws, rng,
                            nop=nop)
    powers = received_power_dbm(profile, batch.delay_s,
                                batch.excess_gain_db, include_rx_gain)
    keep = batch.mask & noise_mask(powers, threshold)
    if dynamic_range_db is not None:
        keep &= dynamic_range_filter(powers, dynamic_range_db, keep)
    alive = keep.any(axis=1)
    last = np.where(keep, batch.delay_s, -np.inf).max(axis=1)
    first = np.where(keep, batch.delay_s, np.inf).min(axis=1)
    meds = (last[alive] - first[alive]) / globals.NS
    value = float(meds.mean()) if meds.size else float('nan')
    return value, int(keep.sum()), int(batch.mask.sum()), \
        int(n_draws - alive.sum())


def monte_carlo_med(profile, stats, cfg, link_distances, n_draws,
                    threshold_dbm=None, include_rx_gain=True,
                    dynamic_range_db=None, nop_per_link=None, workers=1):
    """
    Model MED for a set of links.

    Every link gets ``n_draws`` realizations from its own substream
    ``(cfg.seed, link index)``. Path powers are the received power over
    free space plus the drawn excess gain; paths below the threshold
    (:func:`med_threshold` by default) are dropped, and with
    ``dynamic_range_db`` so are paths further than that below the
    strongest survivor. The link's MED is the mean over draws with at
    least one survivor, and ``mean_med_ns`` the mean over links that are
    not fully extinguished. Results do not depend on ``workers``.
    """
    if int(n_draws) != n_draws or n_draws < 1:
        raise UsageError('n_draws must be a positive integer')
    distances = [float(d) for d in link_distances]
    if not distances:
        raise UsageError('need at least one link distance')
    if nop_per_link is not None and len(nop_per_link) != len(distances):
        raise UsageError('nop_per_link must match link_distances')
    threshold = med_threshold(profile, stats) if threshold_dbm is None \
        else float(threshold_dbm)

    def run(i):
        nop = None if nop_per_link is None else int(nop_per_link[i])
        return _link_med(profile, stats, cfg, distances[i], int(n_draws),
                         threshold, include_rx_gain, dynamic_range_db, nop,
                         i)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(len(distances))))
    else:
        results = [run(i) for i in range(len(distances))]

    per_link = tuple(r[0] for r in results)
    kept = sum(r[1] for r in results)
    total = sum(r[2] for r in results)
    extinct = sum(r[3] for r in results)
    if extinct:
        logging.warning("%d of %d draws lost every path to the %g dBm "
                        "threshold", extinct, n_draws * len(distances),
                        threshold)
    finite = [v for v in per_link if not math.isnan(v)]
    if not finite:
        raise NotAvailableError('every link was extinguished by the noise '
                                'floor')
    return MedSummary(mean_med_ns=float(np.mean(finite)),
                      per_link_med_ns=per_link,
                      n_draws=int(n_draws),
                      surviving_path_fraction=kept / total if total else 0.0,
                      extinct_draws=extinct,
                      link_distances_m=tuple(distances),
                      threshold_dbm=threshold)
