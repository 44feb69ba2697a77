"""
AR(1)-plus-noise state space model.

    y_t = x_t + sigma_eps * eps_t
    x_t = mu + phi (x_{t-1} - mu) + sigma_eta * eta_t,    x_0 ~ N(mu, sigma_eta^2 / (1 - phi^2))

The posterior precision of the states is ``Omega = sigma_eta^{-2} (Lambda + gamma I)``
with ``gamma = sigma_eta^2 / sigma_eps^2`` and ``Lambda`` the stationary AR(1)
precision pattern. For ``phi != 0``, ``Omega = sigma_eta^{-2} |phi| Q`` where
``Q`` is the near-Toeplitz matrix with

    b = sign(phi),  c = (1 + gamma + phi^2)/|phi|,  d = (1 + gamma)/|phi|,  lam = |phi|.

This module computes the EM working-parameter optima ``w_opt`` and
``a_opt``, the bounds on ``Q^{-1}`` row sums, the moments and limit of
``a_opt``, and simulates the model.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import analytics
from .core import TridiagSpec, inverse_factors, preset
from .errors import DimensionMismatch, DomainError
from .oracle import solve_tridiagonal

__all__ = [
    "AR1Config",
    "RowSumBounds",
    "ar1_spec",
    "omega_scale",
    "row_sum_bounds",
    "log_bound_gaps",
    "w_opt_bounds",
    "w_opt_known_variances",
    "a_opt_from_data",
    "w_opt_known_mu",
    "a_opt_moments",
    "a_opt_limit",
    "lambda_spec",
    "simulate",
    "simulate_states",
]


@dataclass(frozen=True)
class AR1Config:
    """Model parameters. ``gamma`` must equal ``sigma_eta_sq / sigma_eps_sq``.

    ``phi = 0`` is accepted here; operations that need the near-Toeplitz
    form reject it, the ``w``/``a`` optima fall back to a diagonal ``Omega``.
    """

    phi: float
    gamma: float
    sigma_eta_sq: float
    sigma_eps_sq: float
    mu: float
    n: int

    def __post_init__(self):
        if not -1.0 < self.phi < 1.0:
            raise DomainError("need |phi| < 1, got %r" % (self.phi,))
        if not (self.sigma_eta_sq > 0 and self.sigma_eps_sq > 0):
            raise DomainError("variances must be positive")
        if not self.gamma > 0:
            raise DomainError("gamma must be positive, got %r" % (self.gamma,))
        if not math.isclose(self.gamma, self.sigma_eta_sq / self.sigma_eps_sq, rel_tol=1e-12):
            raise DomainError(
                "gamma=%r inconsistent with sigma_eta_sq/sigma_eps_sq=%r"
                % (self.gamma, self.sigma_eta_sq / self.sigma_eps_sq)
            )
        if not math.isfinite(self.mu):
            raise DomainError("mu must be finite")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError("n must be an integer >= 1, got %r" % (self.n,))
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def from_variances(cls, phi, sigma_eta_sq, sigma_eps_sq, mu=0.0, n=100):
        return cls(phi, sigma_eta_sq / sigma_eps_sq, sigma_eta_sq, sigma_eps_sq, mu, n)

    @classmethod
    def from_gamma(cls, phi, gamma, n, sigma_eps_sq=1.0, mu=0.0):
        return cls(phi, gamma, gamma * sigma_eps_sq, sigma_eps_sq, mu, n)

    def as_dict(self) -> dict:
        return {
            "phi": self.phi,
            "gamma": self.gamma,
            "sigma_eta_sq": self.sigma_eta_sq,
            "sigma_eps_sq": self.sigma_eps_sq,
            "mu": self.mu,
            "n": self.n,
        }


@dataclass(frozen=True)
class RowSumBounds:
    lower: float
    upper: float
    regime: int  # sign of phi


def ar1_spec(cfg: AR1Config) -> TridiagSpec:
    """The near-Toeplitz ``Q`` with ``Omega = omega_scale(cfg) * Q``."""
    if cfg.phi == 0.0:
        raise DomainError("phi = 0 gives a diagonal Omega; there is no near-Toeplitz form")
    return preset("ar1", cfg.n, phi=cfg.phi, gamma=cfg.gamma)


def omega_scale(cfg: AR1Config) -> float:
    """``|phi| / sigma_eta^2``, the factor with ``Omega = scale * Q``."""
    return abs(cfg.phi) / cfg.sigma_eta_sq


def lambda_spec(cfg: AR1Config):
    """``(off, diag)`` bands of ``Lambda``: diagonal ``(1, 1+phi^2, ..., 1+phi^2, 1)``, off-diagonal ``-phi``."""
    diag = np.full(cfg.n, 1.0 + cfg.phi ** 2)
    diag[0] = diag[-1] = 1.0
    return -cfg.phi, diag


def _lambda_matvec(cfg, x):
    off, diag = lambda_spec(cfg)
    out = diag.reshape((-1,) + (1,) * (x.ndim - 1)) * x
    out[1:] += off * x[:-1]
    out[:-1] += off * x[1:]
    return out


def _omega_solve(cfg, rhs):
    """``Omega^{-1} rhs`` by a tridiagonal sweep."""
    if cfg.phi == 0.0:
        return rhs * (cfg.sigma_eta_sq / (1.0 + cfg.gamma))
    return solve_tridiagonal(ar1_spec(cfg), rhs) / omega_scale(cfg)


def row_sum_bounds(cfg: AR1Config) -> RowSumBounds:
    """Open interval containing every row sum of ``Q^{-1}``."""
    spec = ar1_spec(cfg)
    c, d, phi = spec.c, spec.d, cfg.phi
    if phi > 0:
        return RowSumBounds(1.0 / (d - phi), 1.0 / (c - 2.0), 1)
    return RowSumBounds(2.0 / (c + 2.0) - 1.0 / (d + phi), 1.0 / (d + phi), -1)


def log_bound_gaps(cfg: AR1Config):
    """``(log(s - lower), log(upper - s))`` elementwise, free of cancellation.

    Deep interior row sums sit within ``r-**i`` of a bound and round onto it,
    so comparing doubles cannot show strict containment. With
    ``w_i = v_i + v_{n-i+1}`` and ``A = 2/(d - lam)`` the gaps are
    ``|b - lam|/(c - 2b)`` times ``A - w`` and ``w`` (``phi > 0``) or
    ``w + A`` and ``A - w`` (``phi < 0``); the bare ``w`` gap is taken in log
    space from the scaled factors. A gap that is not positive gives ``nan``
    or ``-inf``.
    """
    spec = ar1_spec(cfg)
    bounds = row_sum_bounds(cfg)
    n, b, c, d, lam = spec.n, spec.b, spec.c, spec.d, spec.lam
    if n == 1:
        s = 1.0 / d
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log([s - bounds.lower]), np.log([bounds.upper - s])
    f = inverse_factors(spec)
    v = f.v
    w = v + v[::-1]
    big = 2.0 / (d - lam)
    logk = math.log(abs(b - lam) / (c - 2.0 * b))
    with np.errstate(divide="ignore", invalid="ignore"):
        if b == 1:
            k = np.arange(n)
            lv = np.log(f.v_scaled) - k * f.growth
            return logk + np.log(big - w), logk + np.logaddexp(lv, lv[::-1])
        return logk + np.log(w + big), logk + np.log(big - w)


def w_opt_bounds(cfg: AR1Config):
    """``(lower, upper)`` for ``w_opt``; the image of :func:`row_sum_bounds` under ``w = 1 - (gamma/|phi|) s``.

    For ``phi < 0`` the upper bound may exceed 1 and is reported unclamped.
    """
    phi, g = cfg.phi, cfg.gamma
    if phi == 0.0:
        raise DomainError("bounds need phi != 0")
    if phi > 0:
        return 1.0 - g / ((1.0 - phi) ** 2 + g), 1.0 - g / (1.0 - phi ** 2 + g)
    return (1.0 - g / (1.0 - phi ** 2 + g),
            1.0 + g / (1.0 - phi ** 2 + g) - 2.0 * g / ((1.0 - phi) ** 2 + g))


def w_opt_known_variances(cfg: AR1Config) -> np.ndarray:
    """``w_opt = 1 - sigma_eps^{-2} Omega^{-1} 1`` through the closed-form row sums."""
    if cfg.phi == 0.0:
        return np.full(cfg.n, 1.0 - cfg.gamma / (1.0 + cfg.gamma))
    s = analytics.row_sums(ar1_spec(cfg)).s
    return 1.0 - (cfg.gamma / abs(cfg.phi)) * s


def _centered(cfg, y):
    y = np.asarray(y, dtype=float)
    if y.shape[:1] != (cfg.n,):
        raise DimensionMismatch("y has length %r, expected n=%d" % (y.shape[:1], cfg.n))
    return (y - cfg.mu) / cfg.sigma_eps_sq


def a_opt_from_data(cfg: AR1Config, y) -> np.ndarray:
    """``a_opt = 1 - z' Omega^{-1} Lambda Omega^{-1} z / (n sigma_eta^2)``, ``z = (y - mu)/sigma_eps^2``.

    ``y`` may be a single series of length ``n`` or an ``(n, k)`` array of
    ``k`` series, giving ``k`` values.
    """
    z = _centered(cfg, y)
    x = _omega_solve(cfg, z)
    quad = np.sum(x * _lambda_matvec(cfg, x), axis=0)
    out = 1.0 - quad / (cfg.n * cfg.sigma_eta_sq)
    return float(out) if np.ndim(out) == 0 else out


def w_opt_known_mu(cfg: AR1Config, y, a_opt: float) -> np.ndarray:
    """``w_opt = (mu Omega)^{-1} (2 Lambda Omega^{-1} z / (a_opt sigma_eta^2) - z)``."""
    if cfg.mu == 0.0:
        raise DomainError("w_opt with known mu is undefined for mu = 0")
    if a_opt == 0.0:
        raise DomainError("w_opt with known mu is undefined for a_opt = 0")
    z = _centered(cfg, y)
    inner = 2.0 * _lambda_matvec(cfg, _omega_solve(cfg, z)) / (a_opt * cfg.sigma_eta_sq) - z
    return _omega_solve(cfg, inner) / cfg.mu


def a_opt_moments(cfg: AR1Config):
    """``(E a_opt, var a_opt)`` from the closed-form traces of ``Q^{-1}`` and ``Q^{-2}``."""
    spec = ar1_spec(cfg)
    n, g, a = cfg.n, cfg.gamma, abs(cfg.phi)
    mean = 1.0 - g * analytics.trace_inverse(spec) / (n * a)
    var = 2.0 * g * g * analytics.trace_inverse_squared(spec) / (n * n * a * a)
    return mean, var


def a_opt_limit(cfg: AR1Config) -> float:
    """``lim E(a_opt) = 1 - gamma / sqrt(((1-phi)^2 + gamma)((1+phi)^2 + gamma))``."""
    phi, g = cfg.phi, cfg.gamma
    return 1.0 - g / math.sqrt(((1.0 - phi) ** 2 + g) * ((1.0 + phi) ** 2 + g))


def simulate_states(cfg: AR1Config, seed: int, size=None):
    """Draw ``(x, y)`` from the centered model.

    Uses ``numpy.random.Generator(PCG64(seed))``; the draw order is the
    initial state, then all state innovations, then all observation noise.
    With ``size=k`` the arrays have shape ``(n, k)``, one series per column.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    shape = (cfg.n,) if size is None else (cfg.n, int(size))
    tail = shape[1:]
    phi, mu = cfg.phi, cfg.mu
    sd_eta = math.sqrt(cfg.sigma_eta_sq)
    sd_eps = math.sqrt(cfg.sigma_eps_sq)
    prev = mu + math.sqrt(cfg.sigma_eta_sq / (1.0 - phi * phi)) * rng.standard_normal(tail)
    eta = rng.standard_normal(shape)
    eps = rng.standard_normal(shape)
    x = np.empty(shape)
    for t in range(cfg.n):
        prev = mu + phi * (prev - mu) + sd_eta * eta[t]
        x[t] = prev
    return x, x + sd_eps * eps


def simulate(cfg: AR1Config, seed: int, size=None) -> np.ndarray:
    """One draw of the observations ``y`` (or ``size`` draws as columns)."""
    return simulate_states(cfg, seed, size)[1]
