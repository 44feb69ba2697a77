"""
Symmetric near-Toeplitz tridiagonal matrices and their explicit inverse.

The matrix class is

    Q = tridiag(-b, (d, c, ..., c, d), -b),   b in {-1, +1},  c >= 0,

of order ``n``. With ``lam = c - d`` and ``beta_i = U_i(c/2) - lam * U_{i-1}(c/2)``
the inverse is rank structured, ``Q^{-1}_{ij} = u_i v_j`` for ``i <= j``, where

    u_i = b**(i-1) * beta_{i-1},    v_i = b**(i-1) * beta_{n-i} / (d beta_{n-1} - beta_{n-2}).

For ``c > 2`` both ``beta_i`` and the denominator grow like ``r+**i`` and
overflow long before the entries of the inverse do, so factors are stored
as bounded mantissas with the geometric growth split off:

    u_i = u_scaled[i] * r+**(i-1),     v_i = v_scaled[i] * r-**(i-1).

Products ``u_i v_j = u_scaled[i] v_scaled[j] r-**(j-i)`` then never overflow.
"""

import math
from dataclasses import dataclass

import numpy as np

from .chebyshev import eval_U
from .errors import DomainError, IndexOutOfRange, SingularMatrix

__all__ = [
    "TridiagSpec",
    "KappaBasis",
    "InverseFactors",
    "Invertibility",
    "SINGULAR_RTOL",
    "beta_sequence",
    "kappa_basis",
    "is_invertible",
    "inverse_factors",
    "inverse_element",
    "inverse_element_c2",
    "full_inverse",
    "preset",
    "PRESETS",
]

SINGULAR_RTOL = 1e-12


@dataclass(frozen=True)
class TridiagSpec:
    """Parameters of the matrix class. ``lam = c - d`` is derived."""

    n: int
    b: int
    c: float
    d: float

    def __post_init__(self):
        n, b, c, d = self.n, self.b, self.c, self.d
        if isinstance(n, bool) or not float(n).is_integer() or n < 1:
            raise DomainError("n must be an integer >= 1, got %r" % (n,))
        if b not in (1, -1):
            raise DomainError("b must be +1 or -1, got %r" % (b,))
        if not math.isfinite(c) or c < 0:
            raise DomainError("c must be finite and >= 0, got %r" % (c,))
        if not math.isfinite(d):
            raise DomainError("d must be finite, got %r" % (d,))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "b", int(b))
        object.__setattr__(self, "c", float(c))
        object.__setattr__(self, "d", float(d))

    @property
    def lam(self) -> float:
        return self.c - self.d

    @property
    def regime(self) -> str:
        """``'hyperbolic'`` (c > 2), ``'linear'`` (c == 2) or ``'trigonometric'``."""
        if self.c > 2.0:
            return "hyperbolic"
        if self.c == 2.0:
            return "linear"
        return "trigonometric"

    def as_dict(self) -> dict:
        return {"n": self.n, "b": self.b, "c": self.c, "d": self.d, "lambda": self.lam}


@dataclass(frozen=True)
class KappaBasis:
    """Characteristic-root quantities for ``c > 2``.

    ``kappa_i = phi+ r+**i - phi- r-**i`` is never formed directly; use
    :meth:`kappa_mantissa` which returns ``kappa_i / r+**i``.
    ``kappa_norm`` is ``kappa / r+**(n-1)``.
    """

    n: int
    lam: float
    r_plus: float
    r_minus: float
    phi_plus: float
    phi_minus: float
    kappa0: float
    kappa_norm: float
    log_rplus: float

    @property
    def rho(self) -> float:
        # polynomial form; the product phi+ phi- cancels badly near a root
        return 1.0 - (self.r_plus + self.r_minus) * self.lam + self.lam ** 2

    def one_minus_rminus_pow(self, m):
        """``1 - r-**m`` without cancellation for small ``m * log r+``."""
        return -np.expm1(-np.asarray(m, dtype=float) * self.log_rplus)

    def rminus_pow(self, m):
        return np.exp(-np.asarray(m, dtype=float) * self.log_rplus)

    def h(self, m):
        """``phi+ - phi- r-**m``, i.e. ``kappa0 + phi- (1 - r-**m)``."""
        return self.kappa0 + self.phi_minus * self.one_minus_rminus_pow(m)

    def kappa_mantissa(self, i):
        """``kappa_i / r+**i``. Accepts arrays."""
        return self.h(2 * np.asarray(i))

    def kappa(self, i):
        """Unscaled ``kappa_i``; overflows for large ``i``."""
        i = np.asarray(i, dtype=float)
        with np.errstate(over="ignore"):
            return self.kappa_mantissa(i) * np.exp(i * self.log_rplus)


@dataclass(frozen=True)
class Invertibility:
    """Outcome of :func:`is_invertible`. Truthy iff the matrix is invertible."""

    invertible: bool
    denom: float
    tolerance: float

    def __bool__(self):
        return self.invertible


@dataclass(frozen=True)
class InverseFactors:
    """Scaled generators of ``Q^{-1}``.

    ``u_scaled`` and ``v_scaled`` are 0-indexed arrays; ``growth`` is
    ``log r+`` for ``c > 2`` and 0 otherwise.
    """

    spec: TridiagSpec
    u_scaled: np.ndarray
    v_scaled: np.ndarray
    growth: float
    denom: float

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def u(self) -> np.ndarray:
        k = np.arange(self.n, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            return self.u_scaled * np.exp(k * self.growth)

    @property
    def v(self) -> np.ndarray:
        k = np.arange(self.n, dtype=float)
        return self.v_scaled * np.exp(-k * self.growth)

    def diagonal(self) -> np.ndarray:
        """Diagonal of ``Q^{-1}``: ``u_i v_i`` (the growth factors cancel)."""
        return self.u_scaled * self.v_scaled


def _sign_powers(b, count):
    if b == 1:
        return np.ones(count)
    return np.where(np.arange(count) % 2 == 0, 1.0, -1.0)


def kappa_basis(spec: TridiagSpec) -> KappaBasis:
    """Roots ``r+-``, ``phi+- = r+- - lam`` and normalized ``kappa`` for ``c > 2``."""
    c, lam, n = spec.c, spec.lam, spec.n
    if not c > 2.0:
        raise DomainError("kappa quantities are real and distinct only for c > 2 (c=%r)" % c)
    s = math.sqrt((c - 2.0) * (c + 2.0))
    r_plus = 0.5 * (c + s)
    r_minus = 1.0 / r_plus
    log_rplus = math.log1p(0.5 * (c - 2.0) + 0.5 * s)
    phi_plus = r_plus - lam
    phi_minus = r_minus - lam
    basis = KappaBasis(n, lam, r_plus, r_minus, phi_plus, phi_minus, s, 0.0, log_rplus)
    m = n - 1
    # kappa / r+**(n-1) = (phi+ - phi- r-**m)(phi+ + phi- r-**m)
    e = float(basis.one_minus_rminus_pow(m))
    kappa_norm = float(basis.h(m)) * ((2.0 * spec.d - c) - phi_minus * e)
    return KappaBasis(n, lam, r_plus, r_minus, phi_plus, phi_minus, s, kappa_norm, log_rplus)


def beta_sequence(spec: TridiagSpec, count: int) -> np.ndarray:
    """``(beta_0, ..., beta_{count-1})`` from the Chebyshev closed form.

    For ``c > 2`` entries overflow to ``inf`` once ``i * log r+`` exceeds the
    double range; use :func:`inverse_factors` for bounded quantities.
    """
    if not 0 <= count <= spec.n:
        raise DomainError("count must lie in [0, n], got %r" % (count,))
    i = np.arange(count)
    if spec.regime == "linear":
        return 1.0 + (1.0 - spec.lam) * i
    if spec.regime == "hyperbolic":
        kb = kappa_basis(spec)
        with np.errstate(over="ignore"):
            return kb.kappa_mantissa(i) / kb.kappa0 * np.exp(i * kb.log_rplus)
    x = spec.c / 2.0
    return eval_U(i, x) - spec.lam * eval_U(i - 1, x)


def _scaled_terms(spec: TridiagSpec):
    """Return ``(beta_scaled, growth, denom_scaled, kappa_basis_or_None)`` with ``beta_i = beta_scaled[i] * exp(i*growth)``.

    ``denom_scaled`` is ``(d beta_{n-1} - beta_{n-2}) / exp((n-1)*growth)``.
    """
    n, d = spec.n, spec.d
    if spec.regime == "hyperbolic":
        kb = kappa_basis(spec)
        beta_s = kb.kappa_mantissa(np.arange(n)) / kb.kappa0
        return beta_s, kb.log_rplus, kb.kappa_norm / kb.kappa0, kb
    beta = beta_sequence(spec, n)
    if n == 1:
        return beta, 0.0, d, None
    return beta, 0.0, d * beta[n - 1] - beta[n - 2], None


def _end_betas(spec: TridiagSpec):
    """``(beta_{n-1}, beta_{n-2} * r-, growth)`` scaled by ``exp(-(n-1)*growth)``, in O(1)."""
    n, c, lam = spec.n, spec.c, spec.lam
    k = np.array([n - 1, n - 2])
    if spec.regime == "hyperbolic":
        kb = kappa_basis(spec)
        last, prev = kb.kappa_mantissa(k) / kb.kappa0
        return float(last), float(prev) * kb.r_minus, kb.log_rplus
    if spec.regime == "linear":
        last, prev = 1.0 + (1.0 - lam) * k
    else:
        last, prev = eval_U(k, c / 2.0) - lam * eval_U(k - 1, c / 2.0)
    return float(last), float(prev), 0.0


def is_invertible(spec: TridiagSpec) -> Invertibility:
    """Relative cancellation test on ``d beta_{n-1} - beta_{n-2}``.

    Singular when ``|denom| <= 1e-12 * max(1, |d beta_{n-1}|, |beta_{n-2}|)``.
    For ``n = 1`` the matrix is ``[d]`` and the denominator is ``d``.
    Only the last two ``beta`` are evaluated, so the cost does not depend on ``n``.
    """
    n, d = spec.n, spec.d
    if n == 1:
        tol = SINGULAR_RTOL * max(1.0, abs(d))
        return Invertibility(abs(d) > tol, d, tol)
    # everything below is divided by exp((n-1)*growth)
    last, prev, growth = _end_betas(spec)
    denom_s = d * last - prev
    scale = max(math.exp(-(n - 1) * growth), abs(d * last), abs(prev))
    tol_s = SINGULAR_RTOL * scale
    ok = abs(denom_s) > tol_s
    lift = math.exp((n - 1) * growth) if (n - 1) * growth < 709.0 else math.inf
    denom = denom_s * lift if denom_s != 0.0 else 0.0
    tol = tol_s * lift
    return Invertibility(bool(ok), float(denom), float(tol))


def inverse_factors(spec: TridiagSpec) -> InverseFactors:
    """Build the generators ``u``, ``v`` of ``Q^{-1}``.

    Raises :class:`SingularMatrix` when :func:`is_invertible` fails.
    """
    inv = is_invertible(spec)
    if not inv:
        raise SingularMatrix("Q is singular: d*beta[n-1] - beta[n-2] = %r" % inv.denom)
    n, b = spec.n, spec.b
    beta_s, growth, denom_s, _ = _scaled_terms(spec)
    sgn = _sign_powers(b, n)
    if n == 1:
        return InverseFactors(spec, np.ones(1), np.array([1.0 / spec.d]), 0.0, spec.d)
    u_s = sgn * beta_s
    # v_i = b^{i-1} beta_{n-i} / denom; in scaled form the r+ powers leave r-**(i-1)
    v_s = sgn * beta_s[::-1] / denom_s
    return InverseFactors(spec, u_s, v_s, growth, inv.denom)


def _check_index(n, i, j):
    for k in (i, j):
        if isinstance(k, bool) or int(k) != k or not 1 <= k <= n:
            raise IndexOutOfRange("index %r outside 1..%d" % (k, n))
    return int(i), int(j)


def inverse_element(f: InverseFactors, i: int, j: int) -> float:
    """``Q^{-1}_{ij}`` (1-based) as ``u_min(i,j) * v_max(i,j)``."""
    i, j = _check_index(f.n, i, j)
    if i > j:
        i, j = j, i
    return float(f.u_scaled[i - 1] * f.v_scaled[j - 1] * math.exp(-(j - i) * f.growth))


def inverse_element_c2(spec: TridiagSpec, i: int, j: int) -> float:
    """Entry of ``Q^{-1}`` from the dedicated ``c = 2`` closed form."""
    if spec.c != 2.0:
        raise DomainError("the c = 2 closed form needs c == 2, got c=%r" % spec.c)
    n, b, lam = spec.n, spec.b, spec.lam
    i, j = _check_index(n, i, j)
    if i > j:
        i, j = j, i
    if not is_invertible(spec):
        raise SingularMatrix("Q is singular (lambda=%r, n=%d)" % (lam, n))
    if n == 1:
        return 1.0 / spec.d
    a = 1.0 - lam
    sign = 1.0 if b == 1 or (i + j) % 2 == 0 else -1.0
    return sign * (1.0 + a * (i - 1)) * (1.0 + a * (n - j)) / (a * (a * (n - 1) + 2.0))


def full_inverse(spec: TridiagSpec) -> np.ndarray:
    """Dense symmetric ``Q^{-1}`` materialized from the factors."""
    f = inverse_factors(spec)
    n = f.n
    k = np.arange(n)
    gap = k[None, :] - k[:, None]
    upper = np.outer(f.u_scaled, f.v_scaled)
    if f.growth:
        upper *= np.exp(-np.maximum(gap, 0) * f.growth)
    out = np.triu(upper)
    return out + np.triu(out, 1).T


def _spline(n):
    return TridiagSpec(n, -1, 4.0, 2.0)


def _car(n, rho):
    if not 0.0 < abs(rho) < 1.0:
        raise DomainError("CAR preset needs 0 < |rho| < 1, got %r" % (rho,))
    return TridiagSpec(n, 1 if rho > 0 else -1, 2.0 / abs(rho), 1.0 / abs(rho))


def _ar1(n, phi, gamma):
    if not 0.0 < abs(phi) < 1.0:
        raise DomainError("AR(1) preset needs 0 < |phi| < 1, got %r" % (phi,))
    if not gamma > 0.0:
        raise DomainError("AR(1) preset needs gamma > 0, got %r" % (gamma,))
    a = abs(phi)
    return TridiagSpec(n, 1 if phi > 0 else -1, (1.0 + gamma + phi * phi) / a, (1.0 + gamma) / a)


PRESETS = {"spline": _spline, "car": _car, "ar1": _ar1}


def preset(name: str, n: int, **params) -> TridiagSpec:
    """Named parametrizations.

    ``spline``: clamped cubic spline system (b=-1, c=4, d=2).
    ``car``: path-graph CAR precision, params ``rho``.
    ``ar1``: AR(1)-plus-noise precision, params ``phi`` and ``gamma``.
    """
    try:
        make = PRESETS[name]
    except KeyError:
        raise DomainError("unknown preset %r (choose from %s)" % (name, ", ".join(PRESETS)))
    try:
        return make(n, **params)
    except TypeError as exc:
        raise DomainError("bad parameters for preset %r: %s" % (name, exc))
