import math

import numpy as np
import pytest
from scipy import special

from ctrm.errors import AccuracyError, DomainError, UnsupportedModelError
from ctrm.laplace import InversionConfig
from ctrm.limits import (
    LimitCdfRequest,
    Method,
    coupled_ctrm_cdf,
    coupled_ctrm_series,
    coupled_octrm_cdf,
    coupled_octrm_series,
    limit_cdf,
    limit_cdf_function,
    limit_cdf_grid,
    limit_cdf_via_inversion,
    limit_transform,
    prelimit_cdf_exact,
    prelimit_cdf_via_inversion,
    prelimit_laplace_ctrm,
    prelimit_laplace_octrm,
    uncoupled_cdf,
)
from ctrm.model import CoupledProductFrechet, ExponentialIndependent, IndependentStableFrechet
from ctrm.process import Which

# e^{-1/2} I_0(1/2): the Beta(1/2, 1/2) mixture of exp(-u) in closed form.
G_HALF_ONE = math.exp(-0.5) * special.i0(0.5)
# Q(1/2, 1) = erfc(1).
F_HALF_ONE = math.erfc(1.0)


def test_request_validation(coupled):
    with pytest.raises(DomainError):
        LimitCdfRequest(coupled, "CTRM", "Inversion", 0.0, 1.0)
    with pytest.raises(DomainError):
        LimitCdfRequest(coupled, "CTRM", "Inversion", 1.0, 0.0)
    with pytest.raises(ValueError):
        LimitCdfRequest(coupled, "XTRM", "Inversion", 1.0, 1.0)


def test_inversion_examples(coupled, independent):
    req = LimitCdfRequest(independent, Which.CTRM, Method.INVERSION, 1.0, 1.0)
    assert limit_cdf_via_inversion(req) == pytest.approx(math.e * math.erfc(1.0), abs=1e-4)
    req = LimitCdfRequest(coupled, Which.CTRM, Method.INVERSION, 1.0, 1.0)
    assert limit_cdf_via_inversion(req) == pytest.approx(G_HALF_ONE, abs=1e-4)
    req = LimitCdfRequest(coupled, Which.OCTRM, Method.INVERSION, 1.0, 1.0)
    assert limit_cdf_via_inversion(req) == pytest.approx(F_HALF_ONE, abs=1e-4)


def test_inversion_far_tail(coupled, independent):
    # Heavy tails: 1 - F is still ~1e-6 at x = 1e12, so compare deficits.
    for m in (coupled, independent):
        for which in Which:
            for x in (1e6, 1e12):
                inv = limit_cdf_via_inversion(LimitCdfRequest(m, which, "Inversion", 1.0, x))
                ref = limit_cdf(LimitCdfRequest(m, which, "Series", 1.0, x))
                assert 1 - inv == pytest.approx(1 - ref, rel=1e-6)


def test_inversion_inconsistency_raises(coupled):
    # Orders 6 and 4 disagree by ~3e-3 here.
    req = LimitCdfRequest(CoupledProductFrechet(0.3, 2.0), Which.CTRM, Method.INVERSION, 1.0, 1.0)
    with pytest.raises(AccuracyError):
        limit_cdf_via_inversion(req, InversionConfig(order=6), tol=1e-4)
    assert 0 < limit_cdf_via_inversion(req, InversionConfig(order=6), tol=None) < 1


def test_inversion_unsupported(exponential):
    with pytest.raises(UnsupportedModelError):
        limit_cdf(LimitCdfRequest(exponential, "CTRM", "Inversion", 1.0, 2.0))


def test_limit_transform_mpf_and_float_agree(coupled):
    import mpmath

    fn = limit_transform(coupled, Which.OCTRM, 1.5)
    assert float(fn(mpmath.mpf(2))) == pytest.approx(fn(2.0), rel=1e-14)


def test_coupled_ctrm_closed_form():
    assert coupled_ctrm_cdf(0.5, 1.0, 1.0, 1.0) == pytest.approx(G_HALF_ONE, abs=1e-12)
    assert coupled_ctrm_cdf(0.5, 1.0, 1.0, 1.0) == pytest.approx(0.64503, abs=1e-5)
    assert coupled_ctrm_cdf(0.4, 1.3, 2.0, 1e12) == pytest.approx(1.0, abs=1e-9)
    assert coupled_ctrm_cdf(0.4, 1.3, 1e-12, 1.0) == pytest.approx(1.0, abs=1e-9)


def test_coupled_octrm_closed_form():
    assert coupled_octrm_cdf(0.5, 1.0, 1.0, 1.0) == pytest.approx(F_HALF_ONE, rel=1e-6)
    # 1 - F ~ (c t)**beta / Gamma(1 + beta) decays slowly in x.
    assert 1 - coupled_octrm_cdf(0.6, 0.8, 2.0, 1e12) == pytest.approx(special.gammainc(0.6, 2.0 * 1e12**-0.8), rel=1e-4)
    assert coupled_octrm_cdf(0.6, 0.8, 2.0, 1e40) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("gamma", [0.5, 2.0])
def test_coupled_closed_forms_match_special_functions(beta, gamma):
    for t in (0.1, 1.0, 10.0):
        for x in (0.2, 1.0, 5.0):
            g = coupled_ctrm_cdf(beta, gamma, t, x)
            f = coupled_octrm_cdf(beta, gamma, t, x)
            assert g == pytest.approx(float(coupled_ctrm_series(beta, gamma, t, x)), rel=1e-8, abs=1e-14)
            assert f == pytest.approx(float(coupled_octrm_series(beta, gamma, t, x)), rel=1e-6, abs=1e-12)
            assert f <= g + 1e-12


def test_coupled_series_frozen_values():
    # 40-digit mpmath: hyp1f1(0.3, 1, -8) and gammainc(0.3, 8, regularized=True).
    assert float(coupled_ctrm_series(0.3, 2.0, 2.0, 0.5)) == pytest.approx(0.41814345998513256, rel=1e-12)
    assert float(coupled_octrm_series(0.3, 2.0, 2.0, 0.5)) == pytest.approx(2.4239273696737311e-05, rel=1e-10)


def test_coupled_strict_domination_at_reference_point():
    g = coupled_ctrm_cdf(0.5, 1.0, 1.0, 1.0)
    f = coupled_octrm_cdf(0.5, 1.0, 1.0, 1.0)
    assert g - f > 0.4


def test_uncoupled_routes():
    assert uncoupled_cdf(0.5, 1.0, 1.0, 1.0, "Series") == pytest.approx(0.427584, abs=1e-6)
    assert uncoupled_cdf(0.5, 1.0, 1.0, 1.0, "Mixture") == pytest.approx(uncoupled_cdf(0.5, 1.0, 1.0, 1.0, "Series"), abs=1e-6)
    assert uncoupled_cdf(0.5, 1.0, 1.0, 2.0, "Series") == pytest.approx(math.exp(0.25) * math.erfc(0.5), abs=1e-12)
    assert uncoupled_cdf(0.5, 1.0, 1.0, 1e12, "Series") == pytest.approx(1.0, abs=1e-6)
    assert uncoupled_cdf(0.5, 1.0, 1.0, 1e12, "Mixture") == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("beta", [0.3, 0.7])
def test_uncoupled_mixture_with_zolotarev_density(beta):
    assert uncoupled_cdf(beta, 1.5, 2.0, 0.7, "Mixture") == pytest.approx(uncoupled_cdf(beta, 1.5, 2.0, 0.7, "Series"), abs=1e-8)


def test_uncoupled_rejects_inversion_method():
    with pytest.raises(DomainError):
        uncoupled_cdf(0.5, 1.0, 1.0, 1.0, "Inversion")


@pytest.mark.parametrize("model", [CoupledProductFrechet(0.5, 1.0), CoupledProductFrechet(0.3, 2.0), IndependentStableFrechet(0.5, 1.0)])
def test_route_agreement(model, log_grid):
    for which in Which:
        ref = limit_cdf_grid(model, which, Method.SERIES, log_grid, log_grid)
        for method in (Method.CLOSED_FORM, Method.INVERSION):
            other = limit_cdf_grid(model, which, method, log_grid, log_grid)
            assert np.max(np.abs(other - ref)) < 1e-4


@pytest.mark.parametrize("model", [CoupledProductFrechet(0.5, 1.0), IndependentStableFrechet(0.7, 2.0), CoupledProductFrechet(0.3, 0.5)])
def test_cdf_axioms(model):
    xs = np.logspace(-12, 40, 80)
    ts = np.array([0.1, 1.0, 10.0])
    for which in Which:
        vals = limit_cdf_grid(model, which, Method.SERIES, ts, xs)
        assert np.all(np.diff(vals, axis=1) >= -1e-12)
        assert np.all(np.diff(vals, axis=0) <= 1e-12)
        assert np.all(vals[:, 0] < 0.05)
        assert np.all(vals[:, -1] > 0.99)


def test_domination_and_independent_equality(log_grid):
    ind = IndependentStableFrechet(0.5, 1.0)
    g = limit_cdf_grid(ind, "CTRM", "Inversion", log_grid, log_grid)
    f = limit_cdf_grid(ind, "OCTRM", "Inversion", log_grid, log_grid)
    assert np.max(np.abs(g - f)) < 1e-4
    cp = CoupledProductFrechet(0.5, 1.0)
    g = limit_cdf_grid(cp, "CTRM", "Series", log_grid, log_grid)
    f = limit_cdf_grid(cp, "OCTRM", "Series", log_grid, log_grid)
    assert np.all(f <= g)
    assert np.max(g - f) > 0.01


def test_right_continuity_in_t(coupled):
    for which in Which:
        cdf = limit_cdf_function(coupled, which, 1.0)
        near = limit_cdf_function(coupled, which, 1.0 + 1e-9)
        assert near(1.0) == pytest.approx(cdf(1.0), abs=1e-8)


def test_limit_cdf_function_edges(coupled):
    cdf = limit_cdf_function(coupled, "CTRM", 1.0)
    out = cdf(np.array([-np.inf, -1.0, 0.0, 1.0, np.inf]))
    assert out[0] == out[1] == out[2] == 0.0 and out[4] == 1.0
    assert out[3] == pytest.approx(G_HALF_ONE)
    assert isinstance(cdf(1.0), float)


def test_prelimit_transforms(exponential):
    assert prelimit_laplace_ctrm(exponential, 1.0, 2.0) == pytest.approx(1 / 1.5)
    assert prelimit_laplace_octrm(exponential, 1.0, 2.0) == pytest.approx(0.5 / 1.5)
    with pytest.raises(UnsupportedModelError):
        prelimit_laplace_ctrm(CoupledProductFrechet(0.5, 1.0), 1.0, 2.0)


@pytest.mark.parametrize("rate", [0.5, 1.0, 3.0])
def test_prelimit_inversion_matches_poisson_max(rate):
    m = ExponentialIndependent(rate)
    for t in (0.5, 1.0, 2.0):
        for x in (1.5, 2.0, 10.0):
            for which in Which:
                assert prelimit_cdf_via_inversion(m, which, t, x) == pytest.approx(prelimit_cdf_exact(m, which, t, x), abs=1e-6)


def test_prelimit_below_support(exponential):
    assert prelimit_cdf_exact(exponential, "CTRM", 1.0, 0.5) == pytest.approx(math.exp(-1))
    assert prelimit_cdf_exact(exponential, "OCTRM", 1.0, 0.5) == 0.0
