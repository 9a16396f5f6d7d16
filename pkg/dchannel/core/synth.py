"""
Channel realization engine.

A realization is a :class:`PathSet`: per-path absolute delay, excess gain
over free space, departure/arrival azimuth and phase. Path sets are drawn
from the catalog statistics by :func:`draw_paths` (one realization) or
:func:`draw_path_batch` (many realizations of one link, vectorized), then
turned into a wideband MIMO frequency response by
:func:`frequency_response` or into a tap-delay line by
:func:`tap_delay_line`.

The response of path ``l`` at frequency ``f`` is::

    g_l(f) * a_r(aoa_l) * a_t(aod_l)^H * exp(-i (2 pi f tau_l + beta_l))

with ``g_l(f) = 10 ** ((-fspl_db(c tau_l, f) + excess_gain_db_l) / 20)``.
"""

import json
import logging
from collections import namedtuple
from dataclasses import dataclass
from dataclasses import field
from typing import Optional

import numpy as np

from dchannel import globals
from dchannel.core import statdist
from dchannel.core.catalog import Scenario
from dchannel.core.statdist import DistFamily
from dchannel.core.statdist import DistSpec
from dchannel.errors import DomainError
from dchannel.errors import EmptyChannelError
from dchannel.errors import ParameterError
from dchannel.errors import UsageError

TWO_PI = 2 * np.pi

Tap = namedtuple('Tap', ['delay_s', 'amplitude'])


# ###############
# Free Space Loss
# ###############

def fspl_db(distance_m, freq_hz):
    """Free-space path loss ``20 log10(4 pi f d / c)`` in dB."""
    d = np.asarray(distance_m, dtype=float)
    f = np.asarray(freq_hz, dtype=float)
    if np.any(~(d > 0)) or np.any(~(f > 0)):
        raise DomainError('distance and frequency must be > 0')
    loss = 20 * np.log10(4 * np.pi * f * d / globals.SPEED_OF_LIGHT)
    if np.ndim(loss) == 0:
        return float(loss)
    return loss


# ##############
# Antenna Arrays
# ##############

def steering_matrix(n, spacing_wavelengths, angles_rad, amplitude=1 + 0j):
    """
    Uniform linear array response for several angles at once.

    Returns an ``n x len(angles)`` matrix whose column ``l`` is
    :func:`steering_vector` at ``angles_rad[l]``.
    """
    angles = np.mod(np.asarray(angles_rad, dtype=float).ravel(), TWO_PI)
    k = np.arange(n)[:, None]
    amp = np.asarray(amplitude, dtype=complex)
    if amp.ndim:
        amp = amp.reshape(n, 1)
    return amp * np.exp(-1j * TWO_PI * spacing_wavelengths * k *
                        np.sin(angles)[None, :])


def steering_vector(n, spacing_wavelengths, angle_rad, amplitude=1 + 0j):
    """
    Element ``k`` is ``amplitude * exp(-i 2 pi spacing k sin(angle))``.

    ``amplitude`` may be a scalar or one value per element. The angle is
    wrapped into ``[0, 2 pi)`` first, so adding a full turn leaves the
    vector unchanged.
    """
    if int(n) != n or n < 1:
        raise ParameterError('array size must be a positive integer')
    return steering_matrix(int(n), spacing_wavelengths, [angle_rad],
                           amplitude)[:, 0]


@dataclass(frozen=True)
class ArrayConfig:
    """Tx and Rx uniform linear arrays."""

    n_tx: int = 1
    n_rx: int = 1
    spacing_wavelengths: float = 0.5
    element_amplitude: complex = 1 + 0j
    # optional per-element amplitudes, overriding element_amplitude
    tx_amplitudes: Optional[tuple] = None
    rx_amplitudes: Optional[tuple] = None

    def __post_init__(self):
        for name in ('n_tx', 'n_rx'):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ParameterError('%s must be a positive integer, got %r'
                                     % (name, value))
        if not self.spacing_wavelengths > 0:
            raise ParameterError('element spacing must be > 0')
        for name, n in (('tx_amplitudes', self.n_tx),
                        ('rx_amplitudes', self.n_rx)):
            value = getattr(self, name)
            if value is not None:
                value = tuple(complex(a) for a in value)
                if len(value) != n:
                    raise ParameterError('%s needs %d entries, got %d'
                                         % (name, n, len(value)))
                object.__setattr__(self, name, value)

    def tx_matrix(self, angles_rad):
        amp = self.element_amplitude if self.tx_amplitudes is None \
            else self.tx_amplitudes
        return steering_matrix(self.n_tx, self.spacing_wavelengths,
                               angles_rad, amp)

    def rx_matrix(self, angles_rad):
        amp = self.element_amplitude if self.rx_amplitudes is None \
            else self.rx_amplitudes
        return steering_matrix(self.n_rx, self.spacing_wavelengths,
                               angles_rad, amp)


# #########
# Path Sets
# #########

@dataclass
class PathSet:
    """
    One channel realization.

    Arrays run over paths; delays are absolute (seconds), gains are dB
    relative to free space at the path's own length.
    """

    delay_s: np.ndarray
    excess_gain_db: np.ndarray
    aod_rad: np.ndarray
    aoa_rad: np.ndarray
    phase_rad: np.ndarray
    link_distance_m: float
    center_freq_hz: float
    los: bool = False

    def __post_init__(self):
        for name in ('delay_s', 'excess_gain_db', 'aod_rad', 'aoa_rad',
                     'phase_rad'):
            setattr(self, name,
                    np.asarray(getattr(self, name), dtype=float).ravel())
        n = self.delay_s.size
        if any(getattr(self, name).size != n for name in
               ('excess_gain_db', 'aod_rad', 'aoa_rad', 'phase_rad')):
            raise ParameterError('path arrays differ in length')
        if not self.link_distance_m > 0 or not self.center_freq_hz > 0:
            raise DomainError('link distance and frequency must be > 0')
        first = self.link_distance_m / globals.SPEED_OF_LIGHT
        if n and self.delay_s.min() < first * (1 - 1e-12):
            raise ParameterError('path delay shorter than the direct path')
        if n and (self.phase_rad.min() < 0 or
                  self.phase_rad.max() >= TWO_PI):
            raise ParameterError('phases must lie in [0, 2 pi)')

    def __len__(self):
        return self.delay_s.size

    @property
    def n_paths(self):
        return self.delay_s.size

    def to_json(self):
        return {'link_distance_m': self.link_distance_m,
                'center_freq_hz': self.center_freq_hz,
                'los': self.los,
                'paths': [{'delay_s': float(t),
                           'excess_gain_db': float(g),
                           'aod_rad': float(a),
                           'aoa_rad': float(b),
                           'phase_rad': float(p)}
                          for t, g, a, b, p in zip(self.delay_s,
                                                   self.excess_gain_db,
                                                   self.aod_rad,
                                                   self.aoa_rad,
                                                   self.phase_rad)]}

    @classmethod
    def from_json(cls, obj):
        paths = obj.get('paths', [])
        return cls([p['delay_s'] for p in paths],
                   [p['excess_gain_db'] for p in paths],
                   [p['aod_rad'] for p in paths],
                   [p['aoa_rad'] for p in paths],
                   [p['phase_rad'] for p in paths],
                   obj['link_distance_m'], obj['center_freq_hz'],
                   bool(obj.get('los', False)))

    def subset(self, keep):
        """A new path set with only the paths selected by ``keep``."""
        return PathSet(self.delay_s[keep], self.excess_gain_db[keep],
                       self.aod_rad[keep], self.aoa_rad[keep],
                       self.phase_rad[keep], self.link_distance_m,
                       self.center_freq_hz, self.los)


# ########################
# Synthesis Configuration
# ########################

@dataclass(frozen=True)
class NopSource:
    """
    Where the number of paths comes from.

    ``fixed`` uses ``value``; ``empirical_mean`` rounds the catalog mean
    half-up; ``uniform`` draws an integer in ``[low, high]``. The count
    is never below one.
    """

    kind: str = 'empirical_mean'
    value: Optional[int] = None
    low: Optional[int] = None
    high: Optional[int] = None

    def __post_init__(self):
        if self.kind == 'fixed':
            if self.value is None or self.value < 1:
                raise ParameterError('fixed NoP must be >= 1')
        elif self.kind == 'uniform':
            if self.low is None or self.high is None or \
                    not 0 <= self.low <= self.high:
                raise ParameterError('uniform NoP needs 0 <= low <= high')
        elif self.kind != 'empirical_mean':
            raise ParameterError('unknown NoP source %r' % self.kind)

    @classmethod
    def fixed(cls, count):
        return cls('fixed', value=int(count))

    @classmethod
    def empirical_mean(cls):
        return cls('empirical_mean')

    @classmethod
    def uniform(cls, low, high):
        return cls('uniform', low=int(low), high=int(high))

    def draw(self, stats, rng, size):
        if self.kind == 'fixed':
            counts = np.full(size, self.value)
        elif self.kind == 'empirical_mean':
            counts = np.full(size, int(np.floor(stats.nop.mean + 0.5)))
        else:
            counts = rng.integers(self.low, self.high + 1, size=size)
        return np.maximum(counts, 1).astype(int)


@dataclass(frozen=True)
class AngleModel:
    """
    Azimuth model for departures and arrivals.

    ``uniform_azimuth`` draws every angle uniformly. ``lognormal_spread``
    picks one mean direction per realization and side (``mean_direction``
    or uniform), draws the spread in degrees once from ``spread`` and
    scatters paths around the mean with a Gaussian of that spread.
    """

    kind: str = 'uniform_azimuth'
    spread: Optional[DistSpec] = None
    mean_direction_rad: Optional[float] = None

    def __post_init__(self):
        if self.kind == 'lognormal_spread':
            if self.spread is None or \
                    self.spread.family is not DistFamily.LOGNORMAL:
                raise ParameterError('lognormal_spread needs a LogNormal '
                                     'spread spec')
            if self.spread.loc < 0:
                raise ParameterError('angular spread loc must be >= 0')
        elif self.kind != 'uniform_azimuth':
            raise ParameterError('unknown angle model %r' % self.kind)

    @classmethod
    def uniform(cls):
        return cls('uniform_azimuth')

    @classmethod
    def lognormal(cls, shape, loc, scale, mean_direction_rad=None):
        return cls('lognormal_spread',
                   DistSpec(DistFamily.LOGNORMAL, (shape,), loc, scale),
                   mean_direction_rad)

    def _side(self, rng, size):
        n_draws = size[0]
        if self.mean_direction_rad is None:
            mean = rng.uniform(0, TWO_PI, (n_draws, 1))
        else:
            mean = np.full((n_draws, 1), float(self.mean_direction_rad))
        sigma = np.radians(statdist.draw(self.spread, (n_draws, 1), rng))
        return np.mod(mean + sigma * rng.standard_normal(size), TWO_PI)

    def draw(self, rng, size):
        """Departure and arrival angles, both of shape ``size``."""
        if self.kind == 'uniform_azimuth':
            return (rng.uniform(0, TWO_PI, size),
                    rng.uniform(0, TWO_PI, size))
        return self._side(rng, size), self._side(rng, size)


@dataclass(frozen=True)
class SynthesisConfig:
    location: str
    scenario: Scenario
    nop_source: NopSource = field(default_factory=NopSource.empirical_mean)
    angle_model: AngleModel = field(default_factory=AngleModel.uniform)
    seed: int = 7
    los_pinning: bool = True

    def __post_init__(self):
        try:
            object.__setattr__(self, 'scenario',
                               Scenario.parse(self.scenario))
        except LookupError as err:
            raise ParameterError(str(err))
        if int(self.seed) != self.seed:
            raise ParameterError('seed must be an integer')


# ########
# Drawing
# ########

@dataclass
class PathBatch:
    """
    ``n_draws`` realizations of one link, padded to the largest path
    count. ``mask[i, l]`` marks the paths that exist in draw ``i``.
    """

    delay_s: np.ndarray
    excess_gain_db: np.ndarray
    aod_rad: np.ndarray
    aoa_rad: np.ndarray
    phase_rad: np.ndarray
    mask: np.ndarray
    link_distance_m: float
    center_freq_hz: float
    los: bool

    @property
    def n_draws(self):
        return self.mask.shape[0]

    def path_set(self, i):
        keep = self.mask[i]
        return PathSet(self.delay_s[i, keep], self.excess_gain_db[i, keep],
                       self.aod_rad[i, keep], self.aoa_rad[i, keep],
                       self.phase_rad[i, keep], self.link_distance_m,
                       self.center_freq_hz, self.los)


def _check_distance(profile, link_distance_m):
    if not link_distance_m > 0:
        raise DomainError('link distance must be > 0, got %r'
                          % (link_distance_m,))
    dmin, dmax = profile.link_distance_range_m
    if not dmin <= link_distance_m <= dmax:
        logging.warning("link distance %g m lies outside the %s range "
                        "%g-%g m", link_distance_m, profile.name, dmin, dmax)


def draw_path_batch(profile, stats, cfg, link_distance_m, n_draws, rng,
                    nop=None):
    """
    Draw ``n_draws`` independent path sets for one link from ``rng``.

    Draw order per batch: path counts, normalized delays, excess gains,
    phases, angles. With LOS pinning in a LOS cell, path 0 of every draw
    is the direct path (delay ``d / c``, 0 dB).
    """
    _check_distance(profile, link_distance_m)
    if nop is None:
        counts = cfg.nop_source.draw(stats, rng, n_draws)
    else:
        if nop < 1:
            raise ParameterError('path count must be >= 1')
        counts = np.full(n_draws, int(nop))
    width = int(counts.max())
    shape = (n_draws, width)
    mask = np.arange(width)[None, :] < counts[:, None]

    tau_ns = statdist.draw(stats.ndd, shape, rng)
    gain_db = statdist.draw(stats.npd, shape, rng)
    phase = np.mod(rng.uniform(0, TWO_PI, shape), TWO_PI)
    aod, aoa = cfg.angle_model.draw(rng, shape)

    # only a pinned direct path marks the set as LOS
    los = stats.scenario is Scenario.LOS and cfg.los_pinning
    if los:
        tau_ns[:, 0] = 0.0
        gain_db[:, 0] = 0.0
    # normalized delays of an exponential are >= 0 but other specs may dip
    tau_ns = np.maximum(tau_ns, 0.0)
    delay = link_distance_m / globals.SPEED_OF_LIGHT + tau_ns * globals.NS
    return PathBatch(delay, gain_db, aod, aoa, phase, mask,
                     float(link_distance_m), profile.center_freq_hz, los)


def draw_paths(profile, stats, cfg, link_distance_m, stream=0, nop=None):
    """
    One realization for a link of length ``link_distance_m``.

    ``stream`` selects the substream of ``cfg.seed``; the same
    ``(cfg, stream)`` always gives the same path set.
    """
    rng = statdist.substream(cfg.seed, stream)
    batch = draw_path_batch(profile, stats, cfg, link_distance_m, 1, rng,
                            nop=nop)
    ps = batch.path_set(0)
    logging.debug("drew %d paths for %s %s at %g m", len(ps), profile.name,
                  stats.scenario.value, link_distance_m)
    return ps


# ##################
# Channel Assembly
# ##################

def frequency_grid(center_hz, bandwidth_hz, n):
    """``n`` uniformly spaced frequencies centred on ``center_hz``."""
    if int(n) != n or n < 1:
        raise ParameterError('need at least one frequency point')
    step = bandwidth_hz / n
    return center_hz + (np.arange(n) - (n - 1) / 2.0) * step


def _path_gains(ps, freq_hz, wideband_fspl, fspl_freq_hz=None):
    dist = globals.SPEED_OF_LIGHT * ps.delay_s
    if wideband_fspl:
        loss = fspl_db(dist[None, :], freq_hz[:, None])
    else:
        ref = ps.center_freq_hz if fspl_freq_hz is None else fspl_freq_hz
        loss = np.broadcast_to(fspl_db(dist, ref)[None, :],
                               (freq_hz.size, dist.size))
    return 10 ** ((-loss + ps.excess_gain_db[None, :]) / 20)


def frequency_response(ps, arr, freq_grid, wideband_fspl=True,
                       fspl_freq_hz=None):
    """
    MIMO response ``H[k, r, t]`` of ``ps`` on ``freq_grid``.

    With ``wideband_fspl`` off, path loss is evaluated once at
    ``fspl_freq_hz`` (the path set's centre frequency by default) and
    only the phase varies across the grid.
    """
    f = np.asarray(freq_grid, dtype=float).ravel()
    if f.size == 0:
        raise UsageError('frequency grid is empty')
    if np.any(~(f > 0)):
        raise DomainError('frequencies must be > 0')
    if len(ps) == 0:
        raise EmptyChannelError('path set has no paths')
    # delay and path phase kept as separate factors so equal-delay paths
    # combine exactly
    coef = _path_gains(ps, f, wideband_fspl, fspl_freq_hz) * \
        np.exp(-1j * TWO_PI * f[:, None] * ps.delay_s[None, :]) * \
        np.exp(-1j * ps.phase_rad)[None, :]
    a_r = arr.rx_matrix(ps.aoa_rad)
    a_t = arr.tx_matrix(ps.aod_rad)
    return np.einsum('kl,rl,tl->krt', coef, a_r, np.conj(a_t))


def tap_delay_line(ps, ref_freq_hz):
    """Per-path taps ``g_l(ref) * exp(-i beta_l)`` sorted by delay."""
    if len(ps) == 0:
        return []
    gains = _path_gains(ps, np.array([float(ref_freq_hz)]), True)[0]
    amps = gains * np.exp(-1j * ps.phase_rad)
    order = np.argsort(ps.delay_s, kind='stable')
    return [Tap(float(ps.delay_s[i]), complex(amps[i])) for i in order]


# ######
# Export
# ######

def save_channel(H, stream):
    """
    Binary layout: little-endian ``uint32`` header ``n_freq, n_rx, n_tx``
    then the tensor as row-major ``complex64`` (real, imag) pairs.
    """
    H = np.asarray(H)
    if H.ndim != 3:
        raise UsageError('channel tensor must be 3-D')
    stream.write(np.asarray(H.shape, dtype='<u4').tobytes())
    stream.write(np.ascontiguousarray(H, dtype='<c8').tobytes())


def load_channel(stream):
    header = np.frombuffer(stream.read(12), dtype='<u4')
    if header.size != 3:
        raise UsageError('truncated channel header')
    shape = tuple(int(v) for v in header)
    count = int(np.prod(shape))
    data = np.frombuffer(stream.read(8 * count), dtype='<c8')
    if data.size != count:
        raise UsageError('truncated channel data')
    return data.reshape(shape)


def channel_to_json(H, freq_grid):
    H = np.asarray(H, dtype=complex)
    return json.dumps({'freq_hz': [float(f) for f in freq_grid],
                       'shape': list(H.shape),
                       'real': H.real.tolist(),
                       'imag': H.imag.tolist()}, sort_keys=True)
