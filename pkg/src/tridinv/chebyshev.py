"""
Chebyshev polynomials of the second kind.

``U_n(x)`` is evaluated through its closed forms rather than the three-term
recurrence:

* ``|x| < 1``: ``sin((n+1)t) / sin(t)`` with ``cos(t) = x``
* ``x = +-1``: ``(+-1)**n * (n+1)``
* ``|x| > 1``: ``sinh((n+1)t) / sinh(t)`` with ``cosh(t) = |x|``, times ``sign(x)**n``

Negative indices follow ``U_{-n} = -U_{n-2}`` so that ``U_{-1} = 0``.

For ``|x| > 1`` and large ``n`` the value overflows to ``inf``; this module
does not guard against that. Bounded quantities for that regime live in
:mod:`tridinv.core` as scaled ``kappa`` mantissas.
"""

import numpy as np

__all__ = ["eval_U", "eval_U_pair", "EDGE_TOL"]

# |x -+ 1| below this is evaluated by the polynomial value at x = +-1.
EDGE_TOL = 1e-12


def _as_index(n):
    n = np.asarray(n)
    if n.dtype.kind in "iu":
        return n.astype(np.int64)
    if n.dtype.kind == "f" and np.all(np.isfinite(n)) and np.all(n == np.round(n)):
        return n.astype(np.int64)
    raise TypeError("Chebyshev index must be integral, got %r" % (n,))


def _eval(m, x):
    # m >= -1 everywhere; m = -1 yields 0 in every branch.
    ax = np.abs(x)
    flip = np.where((x < 0) & (m % 2 == 1), -1.0, 1.0)
    k = (m + 1).astype(float)

    edge = np.abs(ax - 1.0) < EDGE_TOL
    inside = (ax < 1.0) & ~edge
    outside = (ax > 1.0) & ~edge

    out = np.empty(np.broadcast(m, x).shape, dtype=float)
    out[edge] = (flip * k)[edge]

    with np.errstate(invalid="ignore", divide="ignore"):
        theta = np.arccos(np.clip(x, -1.0, 1.0))
        trig = np.sin(k * theta) / np.sin(theta)
    out[inside] = trig[inside]

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        t = np.arccosh(np.maximum(ax, 1.0))
        hyp = flip * (np.sinh(k * t) / np.sinh(t))
    out[outside] = hyp[outside]
    return out


def eval_U(n, x):
    """Evaluate ``U_n(x)`` for integer ``n`` (any sign) and real ``x``.

    Both arguments broadcast against each other. Scalars in, float out.
    """
    scalar = np.ndim(n) == 0 and np.ndim(x) == 0
    n = _as_index(n)
    x = np.asarray(x, dtype=float)
    n, x = np.broadcast_arrays(n, x)
    neg = n < 0
    m = np.where(neg, -n - 2, n)
    val = np.where(neg, -1.0, 1.0) * _eval(m, x)
    return float(val) if scalar else val


def eval_U_pair(n, x):
    """Return ``(U_n(x), U_{n-1}(x))`` sharing a single branch evaluation."""
    scalar = np.ndim(n) == 0 and np.ndim(x) == 0
    n = _as_index(n)
    x = np.asarray(x, dtype=float)
    n, x = np.broadcast_arrays(n, x)
    idx = np.stack([n, n - 1])
    neg = idx < 0
    m = np.where(neg, -idx - 2, idx)
    vals = np.where(neg, -1.0, 1.0) * _eval(m, np.broadcast_to(x, idx.shape))
    if scalar:
        return float(vals[0]), float(vals[1])
    return vals[0], vals[1]
