"""
Row sums and traces of ``Q^{-1}`` and ``Q^{-2}``, with their large-``n`` limits.

The ``c > 2`` trace formulas are evaluated after dividing numerator and
denominator by ``r+**(n-1)`` (first trace) or ``r+**(2n-2)`` (second), so
only powers of ``r- < 1`` remain and ``n`` in the millions is fine. Where no
closed form exists (``c < 2``; ``Q^{-2}`` at ``c = 2``) the traces are summed
directly from the factors in O(n).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import lfilter

from .core import InverseFactors, TridiagSpec, inverse_factors, is_invertible, kappa_basis
from .errors import DomainError, SingularMatrix

__all__ = [
    "RowSumVector",
    "TraceReport",
    "row_sums",
    "row_sums_direct",
    "zeta",
    "zeta_scaled",
    "trace_inverse",
    "trace_inverse_squared",
    "trace_inverse_direct",
    "trace_inverse_squared_direct",
    "limit_normalized_trace",
    "limit_normalized_trace_sq",
    "trace_report",
]


# Below these root separations (kappa0 = sqrt(c^2 - 4)) the c > 2 trace
# formulas lose digits to cancellation; the O(n) scaled sums take over.
TRACE_KAPPA0_MIN = 0.05
TRACE_SQ_KAPPA0_MIN = 0.5
# |c - 2b| below this sends row sums to the direct scaled recursion.
ROWSUM_GAP_MIN = 1e-2


@dataclass(frozen=True)
class RowSumVector:
    s: np.ndarray
    case_tag: str  # "c2_b1" or "general"
    method: str = "closed_form"  # or "direct"


@dataclass(frozen=True)
class TraceReport:
    n: int
    trace_inv: float
    trace_inv_sq: float
    normalized_trace: float
    normalized_trace_sq: float
    limit_normalized_trace: Optional[float]
    limit_normalized_trace_sq: Optional[float]

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _require_invertible(spec):
    inv = is_invertible(spec)
    if not inv:
        raise SingularMatrix("Q is singular: denominator %r" % inv.denom)


def row_sums(spec: TridiagSpec) -> RowSumVector:
    """Row sums of ``Q^{-1}`` from ``v_i + v_{n-i+1}`` (or, for c=2, b=1, from the linear factors)."""
    f = inverse_factors(spec)
    n, b, c, lam = spec.n, spec.b, spec.c, spec.lam
    tag = "c2_b1" if (c == 2.0 and b == 1) else "general"
    if n == 1:
        return RowSumVector(np.array([1.0 / spec.d]), tag)
    if tag == "general" and abs(c - 2.0 * b) < ROWSUM_GAP_MIN:
        return RowSumVector(row_sums_direct(f), tag, "direct")
    v = f.v
    mirrored = v + v[::-1]
    if tag == "c2_b1":
        i = np.arange(1, n + 1)
        s = ((n - 1) * f.diagonal() + i * v + (n - i + 1) * v[::-1]) / 2.0
    else:
        s = (1.0 - (b - lam) * mirrored) / (c - 2.0 * b)
    return RowSumVector(s, tag)


def row_sums_direct(f: InverseFactors) -> np.ndarray:
    """``s_i = v_i sum_{j<i} u_j + u_i sum_{j>=i} v_j`` by two scaled linear recursions."""
    q = math.exp(-f.growth)
    us, vs = f.u_scaled, f.v_scaled
    # left_i = sum_{j<i} us_j q^(i-j);  right_i = sum_{j>=i} vs_j q^(j-i)
    left = q * np.concatenate([[0.0], lfilter([1.0], [1.0, -q], us)[:-1]])
    right = lfilter([1.0], [1.0, -q], vs[::-1])[::-1]
    return vs * left + us * right


def zeta_scaled(spec: TridiagSpec, j: int):
    """``sum_{i<j} kappa_i**2`` as ``(mantissa, exponent)``; value is ``mantissa * exp(exponent)``."""
    if not 1 <= j <= spec.n:
        raise DomainError("j must lie in 1..n, got %r" % (j,))
    kb = kappa_basis(spec)
    lam, rho = kb.lam, kb.rho
    expo = (2 * j - 1) * kb.log_rplus
    rm = float(kb.rminus_pow(2 * j - 1))
    mant = (lam * lam - 1.0 - 2.0 * rho * j) * rm
    mant += (kb.phi_plus ** 2 - kb.phi_minus ** 2 * rm * rm) / kb.kappa0
    return mant, expo


def zeta(spec: TridiagSpec, j: int) -> float:
    """``sum_{i=0}^{j-1} kappa_i**2`` (``inf`` past the double range)."""
    mant, expo = zeta_scaled(spec, j)
    try:
        return mant * math.exp(expo)
    except OverflowError:
        return math.copysign(math.inf, mant)


def trace_inverse_direct(f: InverseFactors) -> float:
    """``sum_i u_i v_i`` over the stored factors."""
    return float(np.sum(f.diagonal()))


def trace_inverse_squared_direct(f: InverseFactors) -> float:
    """``2 sum_j v_j^2 Z_j - sum_i u_i^2 v_i^2`` with ``Z_j = sum_{i<=j} u_i^2``.

    The prefix sum is carried in scaled form, ``Z'_j = r-**2 Z'_{j-1} + u_scaled_j**2``,
    so it stays bounded when ``c > 2``.
    """
    us2 = f.u_scaled ** 2
    vs2 = f.v_scaled ** 2
    q = math.exp(-2.0 * f.growth)
    if q == 1.0:
        z = np.cumsum(us2)
    else:
        z = lfilter([1.0], [1.0, -q], us2)
    return float(2.0 * np.dot(vs2, z) - np.dot(us2, vs2))


def _trace_c2(spec):
    n, lam = spec.n, spec.lam
    a = 1.0 - lam
    return n * (n - n * lam + lam + a * a * (n - 1) * (n - 2) / 6.0) / (a * (a * (n - 1) + 2.0))


def _trace_hyperbolic(spec):
    kb = kappa_basis(spec)
    n, k0, K = spec.n, kb.kappa0, kb.kappa_norm
    rm2 = float(kb.rminus_pow(2 * n - 2))
    # (r+^n - r-^n) / r+^(n-1) = r+ (1 - r-^(2n))
    geo = kb.r_plus * float(kb.one_minus_rminus_pow(2 * n)) / k0
    num = n * (kb.phi_plus ** 2 + kb.phi_minus ** 2 * rm2) - 2.0 * kb.rho * geo
    return num / (k0 * K)


def _trace_sq_hyperbolic(spec):
    kb = kappa_basis(spec)
    n, c, k0, K = spec.n, spec.c, kb.kappa0, kb.kappa_norm
    lam, rho = kb.lam, kb.rho
    fp2, fm2 = kb.phi_plus ** 2, kb.phi_minus ** 2
    l2m1 = lam * lam - 1.0
    rm_a = float(kb.rminus_pow(2 * n - 2))
    rm_b = float(kb.rminus_pow(4 * n - 4))
    rm_c = float(kb.rminus_pow(4 * n - 3))
    # every term of S divided by r+^(2n-2)
    flat = (4.0 * rho * rho * n * n - 8.0 * rho * n * l2m1 + 4.0 * rho * (1.0 + lam * lam)
            + 2.0 * l2m1 * l2m1 + 16.0 * rho * rho / (k0 * k0))
    s = flat * rm_a
    s += n * c * (fp2 * fp2 - fm2 * fm2 * rm_b) / k0
    s -= 4.0 * rho * c * (fp2 * kb.r_plus + fm2 * rm_c) / (k0 * k0)
    s += 2.0 * l2m1 * (fp2 * kb.r_plus - fm2 * rm_c) / k0
    return s / (k0 * k0 * K * K)


def trace_inverse(spec: TridiagSpec) -> float:
    """``tr(Q^{-1})``: closed form for ``c >= 2``, direct sum for ``c < 2``.

    Just above ``c = 2`` (``kappa0 < TRACE_KAPPA0_MIN``) the direct sum is used too.
    """
    _require_invertible(spec)
    if spec.n == 1:
        return 1.0 / spec.d
    if spec.regime == "hyperbolic":
        if kappa_basis(spec).kappa0 < TRACE_KAPPA0_MIN:
            return trace_inverse_direct(inverse_factors(spec))
        return _trace_hyperbolic(spec)
    if spec.regime == "linear":
        return _trace_c2(spec)
    return trace_inverse_direct(inverse_factors(spec))


def trace_inverse_squared(spec: TridiagSpec) -> float:
    """``tr(Q^{-2}) = sum_ij (Q^{-1}_ij)^2``: closed form for ``c > 2``, direct otherwise.

    The closed form cancels heavily as ``c -> 2+``; it is used only when
    ``kappa0 >= TRACE_SQ_KAPPA0_MIN`` (``c`` above about 2.06).
    """
    _require_invertible(spec)
    if spec.n == 1:
        return 1.0 / spec.d ** 2
    if spec.regime == "hyperbolic" and kappa_basis(spec).kappa0 >= TRACE_SQ_KAPPA0_MIN:
        return _trace_sq_hyperbolic(spec)
    return trace_inverse_squared_direct(inverse_factors(spec))


def limit_normalized_trace(spec: TridiagSpec) -> float:
    """``lim n^{-1} tr(Q^{-1}) = 1 / sqrt(c^2 - 4)``."""
    if not spec.c > 2.0:
        raise DomainError("limit defined for c > 2 only (c=%r)" % spec.c)
    c = spec.c
    return 1.0 / math.sqrt((c - 2.0) * (c + 2.0))


def limit_normalized_trace_sq(spec: TridiagSpec) -> float:
    """``lim n^{-2} tr(Q^{-2})``, which is 0."""
    if not spec.c > 2.0:
        raise DomainError("limit defined for c > 2 only (c=%r)" % spec.c)
    return 0.0


def trace_report(spec: TridiagSpec) -> TraceReport:
    t1 = trace_inverse(spec)
    t2 = trace_inverse_squared(spec)
    n = spec.n
    lim1 = lim2 = None
    if spec.c > 2.0:
        lim1 = limit_normalized_trace(spec)
        lim2 = limit_normalized_trace_sq(spec)
    return TraceReport(n, t1, t2, t1 / n, t2 / (n * n), lim1, lim2)
