"""Sphere moments and the weighted kernel integrals behind every boundedness bound.

Two families of radially symmetric integrals are evaluated here, each by an
exact positive-term series and by seeded Monte Carlo:

  ball (dimension k, weight exponent alpha > -1):
      integral over the unit ball of (1-|eta|^2)^alpha / |1 - <w,eta>|^(k+1)
      series coefficient of r^(2m):
      [G(m+(k+1)/2)^2 / (G(m+1)^2 G((k+1)/2)^2)] * [k! m!/(m+k-1)!] * B(alpha+1, m+k)

  disk (weight exponents alpha > -1, beta > -2):
      integral over the punctured disk of
      (1-|eta|^2)^alpha |eta|^beta / |1 - w conj(eta)|^2
      series coefficient of r^(2m):  B(alpha+1, m + beta/2 + 1)

Both depend on |w| only. For -1 < alpha < 0 they stay comparable to
(1-r^2)^alpha up to constants; `asymptotic_ratio_check` measures the constants
on a grid. The disk integral also has an exact one-dimensional radial form
(angular average of the kernel is 1/(1 - r^2 rho^2)) used as an independent
quadrature route and as the truncated evaluator for divergent exponents.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.special import betaincinv

from . import mc, sampling
from .config import DEFAULT_CONFIG, NumericConfig
from .special import log_beta, log_factorial, log_gamma, log_gamma_vec

MultiIndex = Sequence[int]


class NonConvergenceError(ArithmeticError):
    """Series hit its term cap before meeting the relative tolerance."""

    def __init__(self, message: str, partial_sum: float, terms: int):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.terms = terms


def _check_multi_index(k: int, nu: MultiIndex) -> tuple[int, ...]:
    nu = tuple(int(v) for v in nu)
    if len(nu) != k:
        raise ValueError(f"multi-index length {len(nu)} does not match k={k}")
    if any(v < 0 for v in nu):
        raise ValueError("multi-index entries must be non-negative")
    return nu


def multi_abs(nu: MultiIndex) -> int:
    return int(sum(nu))


def log_multi_factorial(nu: MultiIndex) -> float:
    return sum(log_factorial(int(v)) for v in nu)


def sphere_moment(k: int, nu: MultiIndex) -> float:
    """Mean of |xi^nu|^2 over the unit sphere of C^k: (k-1)! nu!/(|nu|+k-1)!."""
    if k < 1:
        raise ValueError("k must be >= 1")
    nu = _check_multi_index(k, nu)
    return math.exp(log_factorial(k - 1) + log_multi_factorial(nu)
                    - log_factorial(multi_abs(nu) + k - 1))


def sphere_moment_mc(k: int, nu: MultiIndex, cfg: NumericConfig = DEFAULT_CONFIG
                     ) -> tuple[float, float]:
    """Monte-Carlo oracle for `sphere_moment`; returns (estimate, stderr)."""
    nu = np.array(_check_multi_index(k, nu), dtype=float)

    def values(rng: np.random.Generator, count: int) -> np.ndarray:
        xi = sampling.sphere_points(rng, count, k)
        return np.prod(np.abs(xi) ** (2 * nu), axis=1)

    return mc.mc_mean(values, cfg.mc_samples, cfg.seed, cfg.chunk_size, cfg.workers)


# --- series evaluation with cached coefficients -------------------------

_BALL_COEFFS: dict[tuple[int, float], np.ndarray] = {}
_DISK_COEFFS: dict[tuple[float, float], np.ndarray] = {}
_BLOCK = 128


def _ball_coeffs(k: int, alpha: float, upto: int) -> np.ndarray:
    cached = _BALL_COEFFS.get((k, alpha))
    have = 0 if cached is None else cached.size
    if have >= upto:
        return cached
    m = np.arange(have, upto, dtype=float)
    half = (k + 1) / 2.0
    # log of [G(m+half)^2/(G(m+1)^2 G(half)^2)] * [k! m!/(m+k-1)!] * B(alpha+1, m+k),
    # with the G(m+k) of the moment factor cancelled against the Beta numerator
    log_c = (2.0 * log_gamma_vec(m + half) - log_gamma_vec(m + 1.0)
             - 2.0 * log_gamma(half) + log_factorial(k)
             + log_gamma(alpha + 1.0) - log_gamma_vec(m + k + alpha + 1.0))
    fresh = np.exp(log_c)
    out = fresh if cached is None else np.concatenate([cached, fresh])
    _BALL_COEFFS[(k, alpha)] = out
    return out


def _disk_coeffs(alpha: float, beta: float, upto: int) -> np.ndarray:
    cached = _DISK_COEFFS.get((alpha, beta))
    have = 0 if cached is None else cached.size
    if have >= upto:
        return cached
    m = np.arange(have, upto, dtype=float)
    log_c = (log_gamma(alpha + 1.0) + log_gamma_vec(m + beta / 2.0 + 1.0)
             - log_gamma_vec(m + beta / 2.0 + alpha + 2.0))
    fresh = np.exp(log_c)
    out = fresh if cached is None else np.concatenate([cached, fresh])
    _DISK_COEFFS[(alpha, beta)] = out
    return out


def _series_sum(coeffs_for, r: float, rel_tol: float, max_terms: int, label: str) -> float:
    if not 0.0 <= r < 1.0:
        raise ValueError(f"series evaluation requires 0 <= r < 1, got {r}")
    x = r * r
    total = 0.0
    start = 0
    while start < max_terms:
        stop = min(start + _BLOCK, max_terms)
        c = coeffs_for(stop)[start:stop]
        if x == 0.0:
            return float(c[0])
        powers = x ** np.arange(start, stop)
        terms = c * powers
        total += float(terms.sum())
        if terms[-1] < rel_tol * total:
            return total
        start = stop
    raise NonConvergenceError(
        f"{label} series did not converge within {max_terms} terms at r={r}",
        total, max_terms)


def weighted_ball_integral_series(k: int, alpha: float, r: float,
                                  rel_tol: float = 1e-12,
                                  max_terms: int = 1_000_000) -> float:
    """Exact series for the weighted ball integral at radius r in [0, 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if alpha <= -1.0:
        raise ValueError("alpha must exceed -1 (the integral diverges otherwise)")
    return _series_sum(lambda upto: _ball_coeffs(k, alpha, upto),
                       r, rel_tol, max_terms, "ball")


def weighted_disk_integral_series(alpha: float, beta: float, r: float,
                                  rel_tol: float = 1e-12,
                                  max_terms: int = 1_000_000) -> float:
    """Exact series for the weighted disk integral at radius r in [0, 1)."""
    if alpha <= -1.0:
        raise ValueError("alpha must exceed -1 (the integral diverges otherwise)")
    if beta <= -2.0:
        raise ValueError("beta must exceed -2 (the integral diverges otherwise)")
    return _series_sum(lambda upto: _disk_coeffs(alpha, beta, upto),
                       r, rel_tol, max_terms, "disk")


def weighted_ball_integral_mc(k: int, alpha: float, w,
                              cfg: NumericConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """Monte-Carlo estimate of the weighted ball integral at the point w.

    The squared radius is importance-sampled from Beta(k, alpha+1), which
    absorbs the (1-|eta|^2)^alpha weight exactly: only the bounded kernel
    factor is averaged, so the variance stays finite for every alpha > -1
    (plain uniform sampling has infinite variance for alpha <= -1/2 and its
    error bars are meaningless there).
    """
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if w.shape != (k,):
        raise ValueError(f"w must lie in C^{k}")
    if np.linalg.norm(w) >= 1.0:
        raise ValueError("w must lie in the open unit ball")
    if alpha <= -1.0:
        raise ValueError("alpha must exceed -1")
    const = k * math.exp(log_beta(k, alpha + 1.0))

    def values(rng: np.random.Generator, count: int) -> np.ndarray:
        u = rng.random((count, 2 * k + 1))
        xi = sampling.sphere_from_uniform(u[:, :2 * k], k)
        rho = betaincinv(float(k), alpha + 1.0, u[:, 2 * k])
        eta = np.sqrt(rho)[:, None] * xi
        ip = eta @ np.conj(w)
        return const / np.abs(1.0 - ip) ** (k + 1)

    return mc.mc_mean(values, cfg.mc_samples, cfg.seed, cfg.chunk_size, cfg.workers)


def weighted_disk_integral_mc(alpha: float, beta: float, w,
                              cfg: NumericConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """Monte-Carlo estimate of the weighted disk integral at the point w.

    The squared radius is importance-sampled from Beta(beta/2+1, alpha+1),
    absorbing both weight singularities (at the puncture and at the boundary)
    exactly; only the bounded kernel factor is averaged.
    """
    w = complex(np.asarray(w, dtype=complex).reshape(()))
    if abs(w) >= 1.0:
        raise ValueError("w must lie in the open unit disk")
    if alpha <= -1.0:
        raise ValueError("alpha must exceed -1")
    if beta <= -2.0:
        raise ValueError("beta must exceed -2")
    const = math.exp(log_beta(beta / 2.0 + 1.0, alpha + 1.0))

    def values(rng: np.random.Generator, count: int) -> np.ndarray:
        u = rng.random((count, 2))
        rho = betaincinv(beta / 2.0 + 1.0, alpha + 1.0, u[:, 0])
        eta = np.sqrt(rho) * np.exp(2j * np.pi * u[:, 1])
        return const / np.abs(1.0 - w * np.conj(eta)) ** 2

    return mc.mc_mean(values, cfg.mc_samples, cfg.seed, cfg.chunk_size, cfg.workers)


def weighted_disk_integral_quad(alpha: float, beta: float, r: float,
                                inner_cutoff: float = 0.0) -> float:
    """Radial quadrature route for the weighted disk integral.

    The angular average of |1 - w conj(eta)|^(-2) is 1/(1 - |w|^2 |eta|^2),
    leaving 2 int_c^1 (1-t^2)^alpha t^(beta+1) / (1 - r^2 t^2) dt with c the
    inner cutoff. A positive cutoff makes divergent exponents (beta <= -2)
    finite, which is how endpoint violations are quantified.
    """
    if not 0.0 <= r < 1.0:
        raise ValueError("radius must lie in [0, 1)")
    if alpha <= -1.0:
        raise ValueError("alpha must exceed -1")
    if beta <= -2.0 and inner_cutoff <= 0.0:
        raise ValueError("beta <= -2 diverges; supply a positive inner cutoff")

    def integrand(t: float) -> float:
        return 2.0 * (1.0 - t * t) ** alpha * t ** (beta + 1.0) / (1.0 - r * r * t * t)

    val, _ = integrate.quad(integrand, inner_cutoff, 1.0, limit=300)
    return val


# --- asymptotic envelope reports ----------------------------------------


@dataclass
class RatioReport:
    """Grid evidence that an integral stays comparable to its boundary envelope."""

    kind: str                 # "ball" or "disk"
    params: dict
    r: np.ndarray
    value: np.ndarray
    envelope: np.ndarray
    refined: "RatioReport | None" = None

    @property
    def ratio(self) -> np.ndarray:
        return self.value / self.envelope

    @property
    def min_ratio(self) -> float:
        return float(self.ratio.min())

    @property
    def max_ratio(self) -> float:
        return float(self.ratio.max())

    def write_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["r", "value", "envelope", "ratio"])
        for r, v, e, q in zip(self.r, self.value, self.envelope, self.ratio):
            writer.writerow([f"{r:.12g}", f"{v:.12g}", f"{e:.12g}", f"{q:.12g}"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def asymptotic_ratio_check(which: str, params: dict, grid,
                           rel_tol: float = 1e-12,
                           max_terms: int = 1_000_000) -> RatioReport:
    """Evaluate integral/envelope on a radius grid.

    which="ball": params k, alpha; envelope (1-r^2)^alpha.
    which="disk": params alpha, beta; envelope (1-r^2)^alpha, plus the
    refined envelope (1-r^2)^alpha r^beta attached when beta <= 0 (the grid
    must then avoid r = 0).
    """
    grid = np.asarray(grid, dtype=float)
    alpha = float(params["alpha"])
    if not -1.0 < alpha < 0.0:
        raise ValueError("the envelope comparison needs -1 < alpha < 0")
    if which == "ball":
        k = int(params["k"])
        value = np.array([weighted_ball_integral_series(k, alpha, r, rel_tol, max_terms)
                          for r in grid])
        return RatioReport("ball", dict(params), grid, value, (1.0 - grid ** 2) ** alpha)
    if which == "disk":
        beta = float(params["beta"])
        value = np.array([weighted_disk_integral_series(alpha, beta, r, rel_tol, max_terms)
                          for r in grid])
        report = RatioReport("disk", dict(params), grid, value, (1.0 - grid ** 2) ** alpha)
        if beta <= 0.0:
            if np.any(grid == 0.0):
                raise ValueError("refined envelope needs a grid bounded away from r=0")
            report.refined = RatioReport(
                "disk-refined", dict(params), grid, value,
                (1.0 - grid ** 2) ** alpha * grid ** beta)
        return report
    raise ValueError(f"unknown integral family {which!r}")
