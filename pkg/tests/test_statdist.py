"""Tests for the distribution engine."""

import numpy as np
import pytest
from scipy import stats

from dchannel.core import statdist
from dchannel.core.statdist import DistFamily
from dchannel.core.statdist import DistSpec
from dchannel.errors import DomainError
from dchannel.errors import FitError
from dchannel.errors import ParameterError
from dchannel.errors import UndefinedCorrelationError
from dchannel.errors import UsageError

SEED = 7
BIG = 10 ** 6
ROUND_TRIP = 10 ** 5

# one representative spec per family
FAMILY_SPECS = [
    DistSpec('Normal', (), 0.0, 1.0),
    DistSpec('Exponential', (), 0.0, 50.52),
    DistSpec('LogNormal', (0.37,), -35.5, 17.4),
    DistSpec('Rayleigh', (), 0.0, 2.0),
    DistSpec('Rician', (3.0,), 0.0, 1.5),
    DistSpec('Nakagami', (1.8,), 0.0, 2.0),
    DistSpec('Gamma', (2.5,), 0.0, 3.0),
    DistSpec('Beta', (2.0, 5.0), 0.0, 1.0),
    DistSpec('LogLogistic', (6.4,), -47.4, 21.7),
    DistSpec('Weibull', (1.5,), 0.0, 50.0),
]


# families whose location is estimated along with shape and scale
FREE_LOC_SPECS = [s for s in FAMILY_SPECS
                  if s.family.value in ('LogNormal', 'Nakagami', 'Gamma',
                                        'Weibull')]


def _ids(specs):
    return [s.family.value for s in specs]


# #########
# Families
# #########

def test_family_shape_counts():
    assert len(DistFamily) == 10
    for family in ('Normal', 'Exponential', 'Rayleigh'):
        assert DistFamily.parse(family).shape_count == 0
    for family in ('LogNormal', 'Rician', 'Nakagami', 'Gamma', 'LogLogistic',
                   'Weibull'):
        assert DistFamily.parse(family).shape_count == 1
    assert DistFamily.BETA.shape_count == 2


def test_family_parse_table_spellings():
    assert DistFamily.parse('Log-Normal') is DistFamily.LOGNORMAL
    assert DistFamily.parse('Log Logistic') is DistFamily.LOGLOGISTIC
    assert DistFamily.parse('fisk') is DistFamily.LOGLOGISTIC
    assert DistFamily.parse('rice') is DistFamily.RICIAN
    assert DistFamily.parse('EXPONENTIAL') is DistFamily.EXPONENTIAL
    with pytest.raises(ParameterError):
        DistFamily.parse('Cauchy')


def test_spec_validation():
    with pytest.raises(ParameterError):
        DistSpec('Exponential', (), 0.0, 0.0)
    with pytest.raises(ParameterError):
        DistSpec('Gamma', (-1.0,), 0.0, 1.0)
    with pytest.raises(ParameterError):
        DistSpec('Beta', (2.0,), 0.0, 1.0)
    with pytest.raises(ParameterError):
        DistSpec('Normal', (), float('nan'), 1.0)
    with pytest.raises(ParameterError):
        DistSpec('Rician', (-0.1,), 0.0, 1.0)
    # Rician non-centrality may be zero
    DistSpec('Rician', (0.0,), 0.0, 1.0)


def test_spec_json_form():
    spec = DistSpec('LogNormal', (0.37,), -35.5, 17.4)
    obj = spec.to_json()
    assert obj == {'family': 'LogNormal', 'shape': [0.37], 'loc': -35.5,
                   'scale': 17.4}
    assert DistSpec.from_json(obj) == spec
    with pytest.raises(ParameterError):
        DistSpec.from_json({'family': 'Normal', 'loc': 0.0})


def test_rician_zero_matches_rayleigh():
    x = np.linspace(0.01, 8.0, 50)
    rice = DistSpec('Rician', (0.0,), 0.0, 1.3)
    rayleigh = DistSpec('Rayleigh', (), 0.0, 1.3)
    np.testing.assert_allclose(statdist.cdf(rice, x),
                               statdist.cdf(rayleigh, x), atol=1e-12)


# ######################
# Evaluation / Sampling
# ######################

def test_sample_exponential_mean():
    spec = DistSpec('Exponential', (), 0.0, 50.52)
    x = statdist.sample(spec, BIG, SEED)
    assert 50.0 <= x.mean() <= 51.0


def test_sample_normal_mean():
    x = statdist.sample(DistSpec('Normal', (), 0.0, 1.0), BIG, SEED)
    assert abs(x.mean()) <= 0.005


def test_sample_lognormal_median():
    spec = DistSpec('LogNormal', (0.37,), -35.5, 17.4)
    x = statdist.sample(spec, BIG, SEED)
    assert -18.4 <= np.median(x) <= -17.8
    assert statdist.quantile(spec, 0.5) == pytest.approx(-18.1, abs=1e-9)


def test_sample_is_deterministic():
    spec = DistSpec('Gamma', (2.5,), 1.0, 3.0)
    a = statdist.sample(spec, 100, SEED)
    b = statdist.sample(spec, 100, SEED)
    c = statdist.sample(spec, 100, SEED + 1)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    with pytest.raises(ParameterError):
        statdist.sample(spec, 0, SEED)


def test_substreams_do_not_depend_on_order():
    first = statdist.substream(SEED, 3).random(5)
    statdist.substream(SEED, 1).random(100)
    again = statdist.substream(SEED, 3).random(5)
    other = statdist.substream(SEED, 4).random(5)
    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)


def test_cdf_examples():
    expon = DistSpec('Exponential', (), 0.0, 50.52)
    assert statdist.cdf(expon, 50.52) == pytest.approx(1 - np.exp(-1),
                                                      abs=1e-12)
    assert statdist.cdf(DistSpec('Normal'), 0.0) == 0.5
    loglogistic = DistSpec('LogLogistic', (6.4,), -47.4, 21.7)
    assert statdist.cdf(loglogistic, -25.7) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize('spec', FAMILY_SPECS, ids=_ids(FAMILY_SPECS))
def test_cdf_quantile_inverse(spec):
    p = np.round(np.arange(0.01, 1.0, 0.01), 2)
    x = statdist.quantile(spec, p)
    assert np.all(np.diff(x) > 0)
    np.testing.assert_allclose(statdist.cdf(spec, x), p, atol=1e-9)
    assert np.all(statdist.pdf(spec, x) >= 0)


def test_quantile_rejects_bad_probability():
    with pytest.raises(DomainError):
        statdist.quantile(DistSpec('Normal'), 1.5)


@pytest.mark.slow
@pytest.mark.parametrize('spec', FAMILY_SPECS, ids=_ids(FAMILY_SPECS))
def test_sampler_agrees_with_cdf(spec):
    x = statdist.sample(spec, BIG, SEED)
    assert statdist.ks_test(x, spec).statistic < 0.005


# ##########
# MLE Fitting
# ##########

def test_fit_exponential_closed_form():
    data = [43.51 * 0.5, 43.51, 43.51 * 1.5]
    fitted = statdist.fit_mle('Exponential', data, fix_loc=0)
    assert fitted.loc == 0.0
    assert fitted.scale == pytest.approx(43.51, rel=1e-12)


def test_fit_exponential_is_mean_minus_loc():
    x = statdist.sample(DistSpec('Exponential', (), 2.0, 5.0), 500, SEED)
    fitted = statdist.fit_mle('Exponential', x, fix_loc=1.5)
    assert fitted.scale == np.mean(x) - 1.5
    free = statdist.fit_mle('Exponential', x)
    assert free.loc == x.min()
    assert free.scale == np.mean(x) - x.min()


def test_fit_normal_closed_form():
    fitted = statdist.fit_mle('Normal', [-1.0, 0.0, 1.0])
    assert fitted.loc == pytest.approx(0.0, abs=1e-15)
    assert fitted.scale == pytest.approx(np.sqrt(2.0 / 3.0), rel=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize('spec', FAMILY_SPECS, ids=_ids(FAMILY_SPECS))
def test_fit_round_trip(spec):
    x = statdist.sample(spec, ROUND_TRIP, SEED)
    if spec.family is DistFamily.NORMAL:
        fitted = statdist.fit_mle(spec.family, x)
    elif spec.family is DistFamily.BETA:
        fitted = statdist.fit_mle(spec.family, x, fix_loc=spec.loc,
                                  fix_scale=spec.scale)
    else:
        fitted = statdist.fit_mle(spec.family, x, fix_loc=spec.loc)
    assert fitted.scale == pytest.approx(spec.scale, rel=0.03)
    np.testing.assert_allclose(fitted.shape, spec.shape, rtol=0.03)
    assert abs(fitted.loc - spec.loc) <= 0.03 * spec.scale



@pytest.mark.slow
@pytest.mark.parametrize('spec', FREE_LOC_SPECS, ids=_ids(FREE_LOC_SPECS))
def test_fit_round_trip_free_loc(spec):
    x = statdist.sample(spec, ROUND_TRIP, SEED)
    fitted = statdist.fit_mle(spec.family, x)
    assert fitted.loc < x.min()
    assert fitted.scale == pytest.approx(spec.scale, rel=0.03)
    np.testing.assert_allclose(fitted.shape, spec.shape, rtol=0.03)
    assert abs(fitted.loc - spec.loc) <= 0.03 * spec.scale


@pytest.mark.slow
@pytest.mark.parametrize('seed', [7, 8, 9])
def test_fit_lognormal_free_loc(seed):
    spec = DistSpec('LogNormal', (0.37,), -35.5, 17.4)
    x = statdist.sample(spec, ROUND_TRIP, seed)
    fitted = statdist.fit_mle('LogNormal', x)
    assert fitted.shape[0] == pytest.approx(0.37, rel=0.02)
    assert fitted.scale == pytest.approx(17.4, rel=0.02)
    assert abs(fitted.loc - -35.5) <= 0.5
    assert statdist.ks_test(x, fitted).statistic < 0.01
    assert abs(statdist.quantile(fitted, 0.5) - -18.1) <= 0.5


def test_fit_free_loc_beats_a_poor_loc():
    spec = DistSpec('Gamma', (3.0,), -20.0, 4.0)
    x = statdist.sample(spec, 400, SEED)
    free = statdist.fit_mle('Gamma', x)
    pinned = statdist.fit_mle('Gamma', x, fix_loc=x.min() - 50.0)
    ll_free = np.sum(statdist.frozen(free).logpdf(x))
    ll_pinned = np.sum(statdist.frozen(pinned).logpdf(x))
    assert ll_free >= ll_pinned


def test_fit_weibull_on_normalized_delays_with_zeros():
    x = statdist.sample(DistSpec('Weibull', (1.2,), 0.0, 40.0), 300, SEED)
    x[::20] = 0.0
    fitted = statdist.fit_mle('Weibull', x, fix_loc=0)
    assert fitted.loc == 0.0
    assert fitted.scale > 0


def test_fit_errors():
    with pytest.raises(FitError):
        statdist.fit_mle('Normal', [1.0, 2.0])
    with pytest.raises(FitError):
        statdist.fit_mle('Gamma', [3.0, 3.0, 3.0, 3.0])
    with pytest.raises(DomainError):
        statdist.fit_mle('Exponential', [-1.0, 2.0, 3.0], fix_loc=0)
    with pytest.raises(ParameterError):
        statdist.fit_mle('Gamma', [1.0, 2.0, 3.0], fix_scale=2.0)


# ##############
# Goodness of Fit
# ##############

def test_ks_statistic_at_plotting_positions():
    spec = DistSpec('Gamma', (2.5,), 1.0, 3.0)
    m = 40
    x = statdist.quantile(spec, (np.arange(1, m + 1) - 0.5) / m)
    assert statdist.ks_test(x, spec).statistic == pytest.approx(0.5 / m,
                                                               abs=1e-9)


def test_ks_p_value_is_the_asymptotic_one():
    spec = DistSpec('Normal', (), 0.0, 1.0)
    x = statdist.sample(spec, 200, SEED)
    result = statdist.ks_test(x, spec)
    expected = stats.kstest(x, 'norm', method='asymp')
    assert result.statistic == pytest.approx(expected.statistic, abs=1e-12)
    assert result.p_value == pytest.approx(
        stats.kstwobign.sf(np.sqrt(200) * result.statistic), rel=1e-9)


def test_ks_single_point_at_median():
    spec = DistSpec('Normal', (), 3.0, 2.0)
    result = statdist.ks_test([3.0], spec)
    assert result.statistic == pytest.approx(0.5, abs=1e-12)
    assert 0.0 <= result.p_value <= 1.0


def test_ks_invariant_under_affine_map():
    spec = DistSpec('LogNormal', (0.37,), -35.5, 17.4)
    x = statdist.sample(spec, 500, SEED)
    a, b = 2.5, -7.0
    mapped = DistSpec('LogNormal', spec.shape, a * spec.loc + b,
                      a * spec.scale)
    assert statdist.ks_test(a * x + b, mapped).statistic == \
        pytest.approx(statdist.ks_test(x, spec).statistic, abs=1e-12)


def test_ks_needs_data():
    with pytest.raises(UsageError):
        statdist.ks_test([], DistSpec('Normal'))


def test_qq_correlation_of_exact_quantiles():
    spec = DistSpec('Weibull', (1.5,), 0.0, 50.0)
    m = 200
    q = statdist.quantile(spec, (np.arange(1, m + 1) - 0.5) / m)
    assert statdist.qq_correlation(q, spec) == pytest.approx(1.0, abs=1e-12)


def test_qq_correlation_sorts_the_data():
    # negating quantiles of a symmetric spec only reverses the order
    spec = DistSpec('Normal', (), 0.0, 2.0)
    m = 101
    q = statdist.quantile(spec, (np.arange(1, m + 1) - 0.5) / m)
    assert statdist.qq_correlation(-q, spec) == pytest.approx(1.0, abs=1e-12)


def test_qq_correlation_of_normal_samples():
    spec = DistSpec('Normal')
    x = statdist.sample(spec, 10 ** 4, SEED)
    assert statdist.qq_correlation(x, spec) >= 0.999


def test_qq_correlation_errors():
    with pytest.raises(UndefinedCorrelationError):
        statdist.qq_correlation([2.0, 2.0, 2.0], DistSpec('Normal'))
    with pytest.raises(UsageError):
        statdist.qq_correlation([1.0, 2.0], DistSpec('Normal'))


def test_goodness_of_fit():
    spec = DistSpec('Exponential', (), 0.0, 50.52)
    x = statdist.sample(spec, 304, SEED)
    gof = statdist.goodness_of_fit('Exponential', x, fix_loc=0)
    assert gof.sample_count == 304
    assert gof.fitted.scale == pytest.approx(50.52, rel=0.15)
    assert 0.0 <= gof.ks_statistic <= 1.0
    assert gof.p_value > 0.05
    assert gof.qq_correlation > 0.95
