"""
Brute-force references for cross-checking the closed forms.

Nothing here uses Chebyshev polynomials or the ``kappa`` algebra: the
matrix is built literally, inverted by pivoted LU, re-derived from the
pivot recurrence ``delta_1 = d, delta_i = c - 1/delta_{i-1}, delta_n = d - 1/delta_{n-1}``,
or solved with a plain elimination sweep. Dense inversion is meant for
``n <= 2000``; probe larger systems column by column with
:func:`solve_tridiagonal`.
"""

import warnings

import numpy as np
from scipy import linalg

from .core import TridiagSpec
from .errors import DimensionMismatch, SingularMatrix

__all__ = ["materialize", "bands", "matvec", "invert_dense", "invert_meurant", "solve_tridiagonal"]

PIVOT_RTOL = 1e-13


def bands(spec: TridiagSpec):
    """Return ``(off, diag)``: the constant off-diagonal value and the diagonal vector."""
    diag = np.full(spec.n, spec.c)
    diag[0] = diag[-1] = spec.d
    return -float(spec.b), diag


def materialize(spec: TridiagSpec) -> np.ndarray:
    """The literal dense matrix."""
    off, diag = bands(spec)
    m = np.diag(diag)
    if spec.n > 1:
        k = np.arange(spec.n - 1)
        m[k, k + 1] = off
        m[k + 1, k] = off
    return m


def matvec(spec: TridiagSpec, x) -> np.ndarray:
    """``Q @ x`` without forming ``Q``; ``x`` may be ``(n,)`` or ``(n, k)``."""
    x = np.asarray(x, dtype=float)
    off, diag = bands(spec)
    out = diag.reshape((-1,) + (1,) * (x.ndim - 1)) * x
    out[1:] += off * x[:-1]
    out[:-1] += off * x[1:]
    return out


def invert_dense(m) -> np.ndarray:
    """Inverse by LU with partial pivoting and one step of iterative refinement.

    The refinement step ``X += LU^{-1}(I - m X)`` recovers the small entries
    far from the diagonal, which plain LU only gets to absolute accuracy.
    Raises SingularMatrix when a pivot is below ``1e-13 * max|m|``.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch("expected a square matrix, got shape %r" % (m.shape,))
    n = m.shape[0]
    scale = np.max(np.abs(m)) if n else 0.0
    with warnings.catch_warnings():
        # singularity is reported below as an exception
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(m, check_finite=True)
    if n == 0 or np.min(np.abs(np.diag(lu))) <= PIVOT_RTOL * max(scale, np.finfo(float).tiny):
        raise SingularMatrix("matrix is numerically singular")
    eye = np.eye(n)
    x = linalg.lu_solve((lu, piv), eye)
    return x + linalg.lu_solve((lu, piv), eye - m @ x)


def _deltas(spec: TridiagSpec) -> np.ndarray:
    n, c, d = spec.n, spec.c, spec.d
    delta = np.empty(n)
    delta[0] = d
    for i in range(1, n):
        prev = delta[i - 1]
        if abs(prev) <= PIVOT_RTOL:
            raise SingularMatrix("zero pivot delta_%d" % i)
        delta[i] = (d if i == n - 1 else c) - 1.0 / prev
    if abs(delta[-1]) <= PIVOT_RTOL:
        raise SingularMatrix("zero pivot delta_%d" % n)
    return delta


def invert_meurant(spec: TridiagSpec) -> np.ndarray:
    """Dense inverse from the pivot recurrence.

    With ``v_i = b^{i-1} / (delta_n ... delta_{n-i+1})`` and
    ``u_i = b^{n-i} / (delta_i ... delta_n v_n)`` one gets
    ``u_i v_j = b^{i+j} (delta_1 ... delta_{i-1}) / (delta_{n-j+1} ... delta_n)``.
    The products are accumulated as log-magnitudes and signs so that they
    cannot overflow.
    """
    n, b = spec.n, spec.b
    delta = _deltas(spec)
    logd = np.log(np.abs(delta))
    neg = (delta < 0).astype(np.int64)

    # prefix over delta_1..delta_{i-1}, suffix over delta_{n-j+1}..delta_n
    pre_log = np.concatenate([[0.0], np.cumsum(logd)[:-1]])
    pre_neg = np.concatenate([[0], np.cumsum(neg)[:-1]])
    suf_log = np.cumsum(logd[::-1])
    suf_neg = np.cumsum(neg[::-1])

    idx = np.arange(n)
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    lo, hi = np.minimum(ii, jj), np.maximum(ii, jj)
    flips = pre_neg[lo] + suf_neg[hi]
    if b == -1:
        flips = flips + lo + hi
    sign = np.where(flips % 2 == 0, 1.0, -1.0)
    return sign * np.exp(pre_log[lo] - suf_log[hi])


def solve_tridiagonal(spec: TridiagSpec, rhs) -> np.ndarray:
    """Solve ``Q x = rhs`` by forward elimination and back substitution.

    ``rhs`` may be a vector of length ``n`` or an ``(n, k)`` array of
    right-hand sides. No pivoting is done, which is safe for the
    diagonally dominant systems the AR(1) code feeds it.
    """
    rhs = np.asarray(rhs, dtype=float)
    n = spec.n
    if rhs.shape[:1] != (n,):
        raise DimensionMismatch("rhs has leading dimension %r, expected %d" % (rhs.shape[:1], n))
    off, diag = bands(spec)
    scale = max(np.max(np.abs(diag)), abs(off))

    cp = np.empty(n)
    x = np.array(rhs, dtype=float, copy=True)
    piv = diag[0]
    for i in range(n):
        if i > 0:
            piv = diag[i] - off * cp[i - 1]
            x[i] = x[i] - off * x[i - 1]
        if abs(piv) <= PIVOT_RTOL * scale:
            raise SingularMatrix("zero pivot at row %d" % (i + 1))
        cp[i] = off / piv
        x[i] = x[i] / piv
    for i in range(n - 2, -1, -1):
        x[i] = x[i] - cp[i] * x[i + 1]
    return x
