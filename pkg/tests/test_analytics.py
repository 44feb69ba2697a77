import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import random_specs, well_posed
from tridinv.analytics import (
    ROWSUM_GAP_MIN,
    limit_normalized_trace,
    limit_normalized_trace_sq,
    row_sums,
    row_sums_direct,
    trace_inverse,
    trace_inverse_direct,
    trace_inverse_squared,
    trace_inverse_squared_direct,
    trace_report,
    zeta,
    zeta_scaled,
)
from tridinv.core import TridiagSpec, full_inverse, inverse_factors, kappa_basis
from tridinv.errors import DomainError, SingularMatrix
from tridinv.oracle import invert_dense, materialize

SPLINE3 = TridiagSpec(3, -1, 4, 2)
SMALL = TridiagSpec(2, 1, 3, 2)
C2 = TridiagSpec(3, 1, 2, 1.5)


# --- row sums ---------------------------------------------------------------

def test_row_sum_examples():
    r = row_sums(SMALL)
    np.testing.assert_allclose(r.s, [1, 1], rtol=1e-14)
    assert r.case_tag == "general"
    np.testing.assert_allclose(row_sums(SPLINE3).s, [0.5, 0, 0.5], atol=1e-14)
    r = row_sums(C2)
    assert r.case_tag == "c2_b1"
    np.testing.assert_allclose(r.s, invert_dense(materialize(C2)).sum(axis=1), rtol=1e-13)
    np.testing.assert_allclose(row_sums(TridiagSpec(1, 1, 0, 4)).s, [0.25])


def test_row_sums_singular():
    with pytest.raises(SingularMatrix):
        row_sums(TridiagSpec(5, 1, 2, 1))


def test_row_sums_switch_to_direct_near_c_equals_2b():
    spec = TridiagSpec(50, 1, 2 + ROWSUM_GAP_MIN / 2, 1.4)
    r = row_sums(spec)
    assert r.method == "direct"
    np.testing.assert_allclose(r.s, full_inverse(spec).sum(axis=1), atol=1e-9)
    spec = TridiagSpec(50, -1, 2.0, 1.4)
    assert row_sums(spec).case_tag == "general"


def _rowsum_error(spec):
    return float(np.max(np.abs(row_sums(spec).s - full_inverse(spec).sum(axis=1))))


def test_row_sums_random(rng):
    specs = random_specs(rng, 300)
    # the c = 2, b = 1 branch explicitly
    while len(specs) < 400:
        spec = TridiagSpec(int(rng.integers(1, 301)), 1, 2.0, float(rng.uniform(-5, 5)))
        if well_posed(spec):
            specs.append(spec)
    assert max(_rowsum_error(s) for s in specs) <= 1e-9


@given(n=st.integers(1, 200), b=st.sampled_from([-1, 1]), c=st.floats(0.0, 10.0), d=st.floats(-5.0, 5.0))
def test_row_sums_centrosymmetric(n, b, c, d):
    spec = TridiagSpec(n, b, c, d)
    assume(well_posed(spec))
    s = row_sums(spec).s
    np.testing.assert_allclose(s, s[::-1], rtol=1e-9, atol=1e-12 * max(1.0, np.max(np.abs(s))))


def test_row_sums_direct_matches_dense():
    for spec in (TridiagSpec(40, 1, 3.5, 2.2), TridiagSpec(40, -1, 1.2, 0.3), TridiagSpec(40, 1, 2.0, 1.6)):
        np.testing.assert_allclose(row_sums_direct(inverse_factors(spec)),
                                   invert_dense(materialize(spec)).sum(axis=1), rtol=1e-9, atol=1e-12)


def test_row_sums_large_n():
    spec = TridiagSpec(10 ** 6, 1, 3.0, 2.0)
    s = row_sums(spec).s
    assert np.all(np.isfinite(s))
    # interior rows of a c=3, b=1 Toeplitz inverse sum to 1/(c-2)
    assert s[len(s) // 2] == pytest.approx(1.0, rel=1e-12)


# --- zeta -------------------------------------------------------------------

def test_zeta_examples():
    for c in (2.5, 3.0, 7.0):
        assert zeta(TridiagSpec(5, 1, c, 1.0), 1) == pytest.approx(c * c - 4, rel=1e-12)
    spec = TridiagSpec(5, 1, 3, 2)
    assert zeta(spec, 2) == pytest.approx(25.0, rel=1e-12)
    assert zeta(spec, 3) == pytest.approx(150.0, rel=1e-12)


def test_zeta_errors():
    with pytest.raises(DomainError):
        zeta(TridiagSpec(5, 1, 2, 1), 1)
    with pytest.raises(DomainError):
        zeta(TridiagSpec(5, 1, 3, 2), 6)
    with pytest.raises(DomainError):
        zeta(TridiagSpec(5, 1, 3, 2), 0)


def test_zeta_overflow_representation():
    spec = TridiagSpec(10 ** 5, 1, 3, 2)
    mant, expo = zeta_scaled(spec, 10 ** 5)
    assert math.isfinite(mant) and expo > 709
    assert zeta(spec, 10 ** 5) == math.inf


@given(j=st.integers(1, 50), c=st.floats(2.05, 8.0), d=st.floats(-4.0, 6.0))
def test_zeta_matches_partial_sums(j, c, d):
    spec = TridiagSpec(50, 1, c, d)
    kb = kappa_basis(spec)
    ref = float(np.sum(kb.kappa(np.arange(j)) ** 2))
    assert zeta(spec, j) == pytest.approx(ref, rel=1e-9)


# --- traces -----------------------------------------------------------------

def test_trace_examples():
    assert trace_inverse(SMALL) == pytest.approx(4 / 3, rel=1e-13)
    assert trace_inverse(SPLINE3) == pytest.approx(1.5, rel=1e-13)
    assert trace_inverse(C2) == pytest.approx(25 / 6, rel=1e-13)
    assert trace_inverse_squared(TridiagSpec(1, 1, 5, 2)) == pytest.approx(0.25, rel=1e-15)
    assert trace_inverse_squared(SMALL) == pytest.approx(10 / 9, rel=1e-13)
    assert trace_inverse_squared(SPLINE3) == pytest.approx(11 / 12, rel=1e-13)


def test_trace_c2_matches_dense():
    for lam in (0.5, -0.3, 2.5, 1.2):
        spec = TridiagSpec(12, 1, 2.0, 2.0 - lam)
        m = invert_dense(materialize(spec))
        assert trace_inverse(spec) == pytest.approx(np.trace(m), rel=1e-12)
        assert trace_inverse_squared(spec) == pytest.approx(np.sum(m * m), rel=1e-12)


def test_trace_singular():
    with pytest.raises(SingularMatrix):
        trace_inverse(TridiagSpec(5, 1, 2, 1))
    with pytest.raises(SingularMatrix):
        trace_inverse_squared(TridiagSpec(5, 1, 2, 0.5))


@given(n=st.integers(1, 150), b=st.sampled_from([-1, 1]), c=st.floats(0.0, 10.0), d=st.floats(-5.0, 5.0))
def test_traces_match_dense(n, b, c, d):
    spec = TridiagSpec(n, b, c, d)
    assume(well_posed(spec))
    m = invert_dense(materialize(spec))
    t1 = np.trace(m)
    assert trace_inverse(spec) == pytest.approx(t1, rel=1e-8, abs=1e-9 * np.max(np.abs(m)) * n)
    assert trace_inverse_squared(spec) == pytest.approx(np.sum(m * m), rel=1e-8)
    assert trace_inverse_squared(spec) >= 0


@pytest.mark.parametrize("c", [2.0001, 2.01, 2.06, 2.5, 3.0, 5.0, 10.0])
@pytest.mark.parametrize("d", [1.5, 2.0, -1.5])
@pytest.mark.parametrize("n", [2, 10, 1000, 10 ** 4])
def test_closed_form_traces_vs_direct(c, d, n):
    spec = TridiagSpec(n, 1, c, d)
    f = inverse_factors(spec)
    assert trace_inverse(spec) == pytest.approx(trace_inverse_direct(f), rel=1e-8)
    assert trace_inverse_squared(spec) == pytest.approx(trace_inverse_squared_direct(f), rel=1e-8)


def test_traces_positive_under_positivity_hypotheses():
    for c, d in [(2.2, 1.1), (3, 2), (6, 1.01)]:
        r = trace_report(TridiagSpec(300, 1, c, d))
        assert r.trace_inv > 0 and r.trace_inv_sq >= 0


def test_trace_huge_n_finite():
    spec = TridiagSpec(10 ** 7, -1, 3.0, 2.0)
    t1, t2 = trace_inverse(spec), trace_inverse_squared(spec)
    assert math.isfinite(t1) and math.isfinite(t2)
    assert t1 / spec.n == pytest.approx(1 / math.sqrt(5), rel=1e-6)


# --- limits -------------------------------------------------------------------

def test_limit_examples():
    assert limit_normalized_trace(TridiagSpec(3, 1, 4, 2)) == pytest.approx(1 / math.sqrt(12), rel=1e-14)
    assert limit_normalized_trace(TridiagSpec(3, 1, 3, 2)) == pytest.approx(0.447214, abs=1e-6)
    edge = limit_normalized_trace(TridiagSpec(3, 1, 2.0001, 1))
    assert math.isfinite(edge) and edge > 10
    assert limit_normalized_trace_sq(TridiagSpec(3, 1, 3, 2)) == 0.0
    assert limit_normalized_trace_sq(TridiagSpec(3, 1, 10, 5)) == 0.0
    with pytest.raises(DomainError):
        limit_normalized_trace_sq(TridiagSpec(3, 1, 2, 1))
    with pytest.raises(DomainError):
        limit_normalized_trace(TridiagSpec(3, 1, 1.5, 1))


def test_trace_report_fields():
    r = trace_report(SPLINE3)
    assert r.n == 3
    assert r.normalized_trace == pytest.approx(0.5)
    assert r.normalized_trace_sq == pytest.approx(11 / 12 / 9)
    assert r.limit_normalized_trace == pytest.approx(1 / math.sqrt(12))
    assert r.limit_normalized_trace_sq == 0.0
    r = trace_report(C2)
    assert r.limit_normalized_trace is None and r.limit_normalized_trace_sq is None
    assert set(r.as_dict()) >= {"trace_inv", "trace_inv_sq", "normalized_trace"}


LADDER = [100, 200, 400, 800]


@pytest.mark.parametrize("c, d", [(2.5, 1.5), (3.0, 2.0), (4.0, 1.2), (2.2, 2.0)])
def test_normalized_trace_convergence(c, d):
    errs = [abs(trace_inverse(TridiagSpec(n, 1, c, d)) / n - limit_normalized_trace(TridiagSpec(n, 1, c, d)))
            for n in LADDER]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    if c >= 2.5:
        assert errs[-1] < 1e-6


@pytest.mark.parametrize("c, d", [(2.5, 1.5), (3.0, 2.0), (4.0, 1.2), (2.2, 2.0)])
def test_normalized_trace_rate_is_one_over_n(c, d):
    # the gap closes like K/n, with K = -2 rho r+ / (kappa0^2 phi+^2)
    kb = kappa_basis(TridiagSpec(2, 1, c, d))
    k = -2 * kb.rho * kb.r_plus / (kb.kappa0 ** 2 * kb.phi_plus ** 2)
    for n in LADDER:
        gap = trace_inverse(TridiagSpec(n, 1, c, d)) / n - 1 / kb.kappa0
        assert gap * n == pytest.approx(k, rel=1e-6)


@pytest.mark.parametrize("c, d", [(2.5, 1.5), (3.0, 2.0), (4.0, 1.2), (2.2, 2.0)])
def test_normalized_trace_sq_convergence(c, d):
    vals = [trace_inverse_squared(TridiagSpec(n, 1, c, d)) / n ** 2 for n in LADDER]
    assert all(a > b > 0 for a, b in zip(vals, vals[1:]))
