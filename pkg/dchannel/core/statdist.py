"""
Distribution engine: the ten parametric families used to describe path
power, delay and count statistics, with sampling, CDF/quantile evaluation,
maximum-likelihood fitting and goodness-of-fit scoring.

Every family follows the ``scipy.stats`` loc/scale standardization: for a
standardized variable ``Z`` the modelled quantity is ``X = loc + scale * Z``.
Tabulated parameters can therefore be loaded verbatim and handed to
:func:`frozen`.

## Usage

```python
spec = DistSpec('LogNormal', (0.37,), loc=-35.5, scale=17.4)
x = sample(spec, 1000, seed=7)
fitted = fit_mle('LogNormal', x)
ks_test(x, fitted).statistic
```
"""

import functools
import logging
import re
import warnings
from collections import namedtuple
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import optimize
from scipy import stats

from dchannel.errors import DomainError
from dchannel.errors import FitError
from dchannel.errors import ParameterError
from dchannel.errors import UndefinedCorrelationError
from dchannel.errors import UsageError

# below this non-centrality a Rician is evaluated as a Rayleigh
RICE_RAYLEIGH_LIMIT = 1e-8

# relative offset used to move boundary points inside the open support
BOUNDARY_NUDGE = 1e-6

# free-loc profile search, gaps relative to the data spread
PROFILE_GAP_MIN = 1e-4
PROFILE_GAP_MAX = 30.0
PROFILE_POINTS = 24

# Beta support is padded this far (relative to spread) beyond the data
BETA_SUPPORT_PAD = 1e-3

QUANTILE_NEWTON_STEPS = 2

KsResult = namedtuple('KsResult', ['statistic', 'p_value'])


# ############
# The Families
# ############

class DistFamily(str, Enum):
    """The parametric families known to the fitter."""

    NORMAL = 'Normal'
    EXPONENTIAL = 'Exponential'
    LOGNORMAL = 'LogNormal'
    RAYLEIGH = 'Rayleigh'
    RICIAN = 'Rician'
    NAKAGAMI = 'Nakagami'
    GAMMA = 'Gamma'
    BETA = 'Beta'
    LOGLOGISTIC = 'LogLogistic'
    WEIBULL = 'Weibull'

    @property
    def shape_count(self):
        return _SHAPE_COUNT[self]

    @property
    def one_sided(self):
        """True when the support is ``[loc, +inf)``."""
        return self not in (DistFamily.NORMAL, DistFamily.BETA)

    @classmethod
    def parse(cls, name):
        """
        Accept a family as spelled in the appendix tables ("Log-Normal",
        "Log Logistic") or by its scipy name ("lognorm", "fisk").
        """
        if isinstance(name, cls):
            return name
        key = re.sub(r'[^a-z]', '', str(name).lower())
        for family in cls:
            if family.value.lower() == key:
                return family
        if key in _ALIASES:
            return _ALIASES[key]
        raise ParameterError('unknown distribution family %r' % (name,))


_SHAPE_COUNT = {DistFamily.NORMAL: 0,
                DistFamily.EXPONENTIAL: 0,
                DistFamily.RAYLEIGH: 0,
                DistFamily.LOGNORMAL: 1,
                DistFamily.RICIAN: 1,
                DistFamily.NAKAGAMI: 1,
                DistFamily.GAMMA: 1,
                DistFamily.LOGLOGISTIC: 1,
                DistFamily.WEIBULL: 1,
                DistFamily.BETA: 2}

_ALIASES = {'norm': DistFamily.NORMAL,
            'gaussian': DistFamily.NORMAL,
            'expon': DistFamily.EXPONENTIAL,
            'lognorm': DistFamily.LOGNORMAL,
            'rice': DistFamily.RICIAN,
            'fisk': DistFamily.LOGLOGISTIC,
            'weibullmin': DistFamily.WEIBULL}

_SCIPY = {DistFamily.NORMAL: stats.norm,
          DistFamily.EXPONENTIAL: stats.expon,
          DistFamily.LOGNORMAL: stats.lognorm,
          DistFamily.RAYLEIGH: stats.rayleigh,
          DistFamily.RICIAN: stats.rice,
          DistFamily.NAKAGAMI: stats.nakagami,
          DistFamily.GAMMA: stats.gamma,
          DistFamily.BETA: stats.beta,
          DistFamily.LOGLOGISTIC: stats.fisk,
          DistFamily.WEIBULL: stats.weibull_min}


@dataclass(frozen=True)
class DistSpec:
    """A family plus its shape, loc and scale parameters."""

    family: DistFamily
    shape: tuple = ()
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        family = DistFamily.parse(self.family)
        try:
            shape = tuple(float(s) for s in np.ravel(self.shape))
            loc = float(self.loc)
            scale = float(self.scale)
        except (TypeError, ValueError) as err:
            raise ParameterError('%s: non-numeric parameter (%s)'
                                 % (family.value, err))
        object.__setattr__(self, 'family', family)
        object.__setattr__(self, 'shape', shape)
        object.__setattr__(self, 'loc', loc)
        object.__setattr__(self, 'scale', scale)

        if len(shape) != family.shape_count:
            raise ParameterError('%s takes %d shape parameter(s), got %d'
                                 % (family.value, family.shape_count,
                                    len(shape)))
        if not np.all(np.isfinite(shape + (loc, scale))):
            raise ParameterError('%s: parameters must be finite'
                                 % family.value)
        if scale <= 0:
            raise ParameterError('%s: scale must be > 0, got %r'
                                 % (family.value, scale))
        if family is DistFamily.RICIAN:
            if shape[0] < 0:
                raise ParameterError('Rician shape must be >= 0, got %r'
                                     % shape[0])
        elif any(s <= 0 for s in shape):
            raise ParameterError('%s: shape must be > 0, got %r'
                                 % (family.value, shape))

    def __str__(self):
        params = ['shape=%g' % s for s in self.shape]
        params += ['loc=%g' % self.loc, 'scale=%g' % self.scale]
        return '%s(%s)' % (self.family.value, ', '.join(params))

    def to_json(self):
        return {'family': self.family.value,
                'shape': list(self.shape),
                'loc': self.loc,
                'scale': self.scale}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise ParameterError('distribution must be an object, got %r'
                                 % (obj,))
        missing = [k for k in ('family', 'loc', 'scale') if k not in obj]
        if missing:
            raise ParameterError('distribution is missing %s'
                                 % ', '.join(missing))
        return cls(obj['family'], tuple(obj.get('shape') or ()),
                   obj['loc'], obj['scale'])


@functools.lru_cache(maxsize=256)
def frozen(spec):
    """Return the frozen :mod:`scipy.stats` distribution for ``spec``."""
    if spec.family is DistFamily.RICIAN and \
            spec.shape[0] < RICE_RAYLEIGH_LIMIT:
        return stats.rayleigh(loc=spec.loc, scale=spec.scale)
    return _SCIPY[spec.family](*spec.shape, loc=spec.loc, scale=spec.scale)


def _scalar_or_array(values, like):
    if np.ndim(like) == 0:
        return float(values)
    return np.asarray(values, dtype=float)


# ##########################
# Evaluation and Sampling
# ##########################

def substream(seed, *counter):
    """
    A generator for the substream addressed by ``(seed, *counter)``.

    The same address always yields the same stream regardless of which
    other substreams were drawn before, so parallel draws stay
    reproducible.
    """
    entropy = int(seed) % 2 ** 64
    key = tuple(int(c) for c in counter)
    return np.random.default_rng(np.random.SeedSequence(entropy,
                                                        spawn_key=key))


def draw(spec, size, rng):
    """Draw ``size`` values of ``spec`` from an existing generator."""
    return np.asarray(frozen(spec).rvs(size=size, random_state=rng),
                      dtype=float)


def sample(spec, n, seed):
    if int(n) != n or n < 1:
        raise ParameterError('sample size must be a positive integer, got %r'
                             % (n,))
    return draw(spec, int(n), substream(seed))


def cdf(spec, x):
    return _scalar_or_array(frozen(spec).cdf(x), x)


def pdf(spec, x):
    return _scalar_or_array(frozen(spec).pdf(x), x)


def quantile(spec, p):
    """
    Inverse CDF, polished with Newton steps so that ``cdf(quantile(p))``
    matches ``p`` even where the scipy inverse is iterative.
    """
    p_arr = np.asarray(p, dtype=float)
    if np.any((p_arr < 0) | (p_arr > 1)) or np.any(np.isnan(p_arr)):
        raise DomainError('probabilities must lie in [0, 1]')
    dist = frozen(spec)
    x = np.asarray(dist.ppf(p_arr), dtype=float)
    lower, _ = dist.support()
    with np.errstate(all='ignore'):
        for _ in range(QUANTILE_NEWTON_STEPS):
            step = (dist.cdf(x) - p_arr) / dist.pdf(x)
            ok = np.isfinite(step) & np.isfinite(x)
            polished = np.where(ok, x - np.where(ok, step, 0.0), x)
            x = np.where(polished > lower, polished, x)
    return _scalar_or_array(x, p)


# ##########
# MLE Fitting
# ##########

def _clean(data, minimum):
    x = np.asarray(data, dtype=float).ravel()
    if x.size < minimum:
        raise FitError('need at least %d data points, got %d'
                       % (minimum, x.size))
    if not np.all(np.isfinite(x)):
        raise FitError('data contain non-finite values')
    if np.ptp(x) == 0:
        raise FitError('degenerate data: all %d values equal %r'
                       % (x.size, x[0]))
    return x


def _open_support(z):
    """Move points sitting on the lower boundary just inside it."""
    z = np.array(z, dtype=float)
    z[z <= 0] = BOUNDARY_NUDGE * np.max(z)
    return z


def _log_likelihood(family, shape, loc, scale, x):
    try:
        spec = DistSpec(family, shape, loc, scale)
    except ParameterError:
        return -np.inf
    with np.errstate(all='ignore'):
        total = np.sum(frozen(spec).logpdf(x))
    return total if np.isfinite(total) else -np.inf


def _scipy_fit(family, z, start, scale0):
    with warnings.catch_warnings(), np.errstate(all='ignore'):
        warnings.simplefilter('ignore')
        try:
            params = _SCIPY[family].fit(z, *start, floc=0, scale=scale0)
        except Exception as err:
            raise FitError('%s fit failed: %s' % (family.value, err))
    return tuple(params[:-2]), params[-1]


def _fit_standard(family, z):
    """
    Shapes and scale of ``family`` for positive data ``z`` with loc held
    at zero.
    """
    F = DistFamily
    if family is F.EXPONENTIAL:
        return (), float(np.mean(z))
    if family is F.RAYLEIGH:
        return (), float(np.sqrt(np.mean(z ** 2) / 2))

    lz = np.log(z)
    if family is F.LOGNORMAL:
        s = float(np.std(lz))
        if s == 0:
            raise FitError('LogNormal fit: zero spread in log domain')
        return (s,), float(np.exp(np.mean(lz)))

    if family is F.GAMMA:
        with warnings.catch_warnings(), np.errstate(all='ignore'):
            warnings.simplefilter('ignore')
            try:
                a, _, scale = stats.gamma.fit(z, floc=0)
            except Exception as err:
                raise FitError('Gamma fit failed: %s' % err)
        return (a,), scale

    sd = max(float(np.std(lz)), 1e-6)
    if family is F.WEIBULL:
        c0 = 1.2825 / sd
        start, scale0 = (c0,), float(np.exp(np.mean(lz) + 0.5772 / c0))
    elif family is F.LOGLOGISTIC:
        start = (np.pi / (np.sqrt(3) * sd),)
        scale0 = float(np.exp(np.median(lz)))
    elif family is F.NAKAGAMI:
        m2 = float(np.mean(z ** 2))
        start = (max(m2 ** 2 / max(np.var(z ** 2), 1e-300), 0.5),)
        scale0 = np.sqrt(m2)
    elif family is F.RICIAN:
        start, scale0 = (1.0,), float(np.sqrt(np.mean(z ** 2) / 3))
    else:
        raise FitError('no standard fit for %s' % family.value)
    return _scipy_fit(family, z, start, scale0)


def _fit_beta(x, fix_loc, fix_scale):
    pad = BETA_SUPPORT_PAD * np.ptp(x)
    loc = x.min() - pad if fix_loc is None else float(fix_loc)
    scale = x.max() + pad - loc if fix_scale is None else float(fix_scale)
    if scale <= 0:
        raise DomainError('Beta support [%g, %g] is empty'
                          % (loc, loc + scale))
    if x.min() < loc or x.max() > loc + scale:
        raise DomainError('data fall outside the Beta support [%g, %g]'
                          % (loc, loc + scale))
    u = np.clip((x - loc) / scale, 1e-9, 1 - 1e-9)
    with warnings.catch_warnings(), np.errstate(all='ignore'):
        warnings.simplefilter('ignore')
        try:
            a, b, _, _ = stats.beta.fit(u, floc=0, fscale=1)
        except Exception as err:
            raise FitError('Beta fit failed: %s' % err)
    return DistSpec(DistFamily.BETA, (a, b), loc, scale)


def _profile_loc(family, x):
    """
    Free-loc fit for a one-sided family: maximize the profile likelihood
    over the gap between loc and the smallest observation.
    """
    xmin = x.min()
    spread = np.ptp(x)

    def nll(log_gap):
        loc = xmin - np.exp(log_gap)
        try:
            shape, scale = _fit_standard(family, x - loc)
        except FitError:
            return np.inf
        return -_log_likelihood(family, shape, loc, scale, x)

    log_gaps = np.log(np.geomspace(PROFILE_GAP_MIN * spread,
                                   PROFILE_GAP_MAX * spread, PROFILE_POINTS))
    values = np.array([nll(g) for g in log_gaps])
    if not np.any(np.isfinite(values)):
        raise FitError('%s: likelihood is not finite for any loc'
                       % family.value)
    best = int(np.argmin(values))
    lo = log_gaps[max(best - 1, 0)]
    hi = log_gaps[min(best + 1, len(log_gaps) - 1)]
    best_gap, best_value = log_gaps[best], values[best]
    if hi > lo:
        res = optimize.minimize_scalar(nll, bounds=(lo, hi),
                                       method='bounded',
                                       options={'xatol': 1e-5})
        if res.fun < best_value:
            best_gap = res.x
    loc = xmin - np.exp(best_gap)
    shape, scale = _fit_standard(family, x - loc)
    return DistSpec(family, shape, loc, scale)


def fit_mle(family, data, fix_loc=None, fix_scale=None):
    """
    Maximum-likelihood parameters of ``family`` for ``data``.

    ``fix_loc`` holds loc at the given value (delay fits use 0).
    ``fix_scale`` is only meaningful for Beta, whose support is otherwise
    taken from the data range.

    Closed forms are used where they exist (Normal, Exponential and, with
    a fixed loc, LogNormal and Rayleigh); the remaining families go
    through :meth:`scipy.stats.rv_continuous.fit` with moment-based
    starting points. One-sided families with a free loc are fitted by
    profiling the likelihood over loc.
    """
    family = DistFamily.parse(family)
    x = _clean(data, 3)
    logging.debug("fit_mle %s n=%d fix_loc=%s", family.value, x.size,
                  fix_loc)

    if family is DistFamily.BETA:
        return _fit_beta(x, fix_loc, fix_scale)
    if fix_scale is not None:
        raise ParameterError('fix_scale is only supported for Beta')

    if family is DistFamily.NORMAL:
        if fix_loc is None:
            return DistSpec(family, (), float(np.mean(x)), float(np.std(x)))
        loc = float(fix_loc)
        return DistSpec(family, (), loc,
                        float(np.sqrt(np.mean((x - loc) ** 2))))

    if fix_loc is None:
        if family is DistFamily.EXPONENTIAL:
            loc = float(x.min())
            return DistSpec(family, (), loc, float(np.mean(x)) - loc)
        return _profile_loc(family, x)

    loc = float(fix_loc)
    if x.min() < loc:
        raise DomainError('%s with loc fixed at %g cannot fit data down to %g'
                          % (family.value, loc, x.min()))
    z = x - loc
    if family is not DistFamily.EXPONENTIAL:
        z = _open_support(z)
    shape, scale = _fit_standard(family, z)
    try:
        return DistSpec(family, shape, loc, scale)
    except ParameterError as err:
        raise FitError('%s fit produced invalid parameters: %s'
                       % (family.value, err))


# ##############
# Goodness of Fit
# ##############

def ks_test(data, spec):
    """
    One-sample Kolmogorov-Smirnov statistic and asymptotic p-value.

    The p-value comes from the Kolmogorov limit distribution of
    ``sqrt(m) * D`` with no correction for parameters fitted on the same
    data, so it is optimistic for fitted specs.
    """
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        raise UsageError('KS test needs at least one data point')
    res = stats.kstest(x, frozen(spec).cdf, method='asymp')
    return KsResult(float(res.statistic), float(res.pvalue))


def qq_correlation(data, spec):
    """Pearson r between sorted data and quantiles at ``(i - 0.5) / m``."""
    x = np.sort(np.asarray(data, dtype=float).ravel())
    m = x.size
    if m < 3:
        raise UsageError('Q-Q correlation needs at least 3 points, got %d'
                         % m)
    if np.ptp(x) == 0:
        raise UndefinedCorrelationError('Q-Q correlation of constant data')
    q = frozen(spec).ppf((np.arange(1, m + 1) - 0.5) / m)
    if np.ptp(q) == 0:
        raise UndefinedCorrelationError('theoretical quantiles are constant')
    r = np.corrcoef(x, q)[0, 1]
    return float(np.clip(r, -1.0, 1.0))


@dataclass(frozen=True)
class GofResult:
    ks_statistic: float
    p_value: float
    qq_correlation: float
    fitted: DistSpec
    sample_count: int


def goodness_of_fit(family, data, fix_loc=None, fix_scale=None):
    """Fit ``family`` to ``data`` and score the fit on the same data."""
    fitted = fit_mle(family, data, fix_loc=fix_loc, fix_scale=fix_scale)
    ks = ks_test(data, fitted)
    r = qq_correlation(data, fitted)
    return GofResult(ks.statistic, ks.p_value, r, fitted,
                     int(np.size(data)))
