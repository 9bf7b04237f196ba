"""Closed-form Bergman kernels and their truncated orthonormal expansions.

Kernels are taken with respect to normalized volume (every disk and ball
factor has measure 1):

    punctured disk:  1 / (1 - w conj(eta))^2
    ball in C^k:     1 / (1 - <w, eta>)^(k+1)
    product model:   product of the factor kernels
    Hartogs domain:  product kernel divided by the quotient-chart Jacobians

Integer powers are computed by repeated multiplication, never through the
complex logarithm, so there is no branch ambiguity.
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement
from typing import Callable, Iterator, Sequence, Tuple

import numpy as np

from . import mc
from .domains import (HartogsDomainSpec, contains, from_product_model,
                      jacobian_det_from_product, product_points,
                      to_product_model, to_standard_model)
from .special import log_factorial

Model = str | Tuple[str, object]


def _int_power(x: np.ndarray, e: int) -> np.ndarray:
    """x**e for integer e >= 0 by binary repeated multiplication."""
    if e < 0:
        raise ValueError("negative exponent")
    result = np.ones_like(np.asarray(x))
    base = np.asarray(x)
    while e:
        if e & 1:
            result = result * base
        base = base * base
        e >>= 1
    return result


def kernel_punctured_disk(w, eta) -> complex | np.ndarray:
    w = np.asarray(w, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    base = 1.0 - w * np.conj(eta)
    val = 1.0 / (base * base)
    return complex(val) if val.ndim == 0 else val


def kernel_ball(k: int, w, eta) -> complex | np.ndarray:
    w = np.asarray(w, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    if w.shape[-1] != k or eta.shape[-1] != k:
        raise ValueError(f"expected points in C^{k}")
    ip = np.sum(w * np.conj(eta), axis=-1)
    val = 1.0 / _int_power(1.0 - ip, k + 1)
    return complex(val) if val.ndim == 0 else val


def kernel_product(spec: HartogsDomainSpec, w, eta) -> complex | np.ndarray:
    w = np.asarray(w, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    if w.shape[-1] != spec.n or eta.shape[-1] != spec.n:
        raise ValueError(f"expected points in C^{spec.n}")
    val = np.ones(np.broadcast_shapes(w.shape[:-1], eta.shape[:-1]), dtype=complex)
    offs = spec.offsets
    for i, (kj, _) in enumerate(spec.blocks):
        val = val * kernel_ball(kj, w[..., offs[i]:offs[i + 1]], eta[..., offs[i]:offs[i + 1]])
    for j in range(spec.k, spec.n):
        val = val * kernel_punctured_disk(w[..., j], eta[..., j])
    return complex(val) if val.ndim == 0 else val


def kernel_hartogs(spec: HartogsDomainSpec, z, zeta, check_membership: bool = True) -> complex | np.ndarray:
    """Bergman kernel of the spec's domain via the product-model transfer.

    For non-identity blocks the evaluation composes with the blockwise map to
    the standard model and multiplies by its Jacobian determinants.
    """
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    if check_membership:
        if not np.all(contains(spec, z)) or not np.all(contains(spec, zeta)):
            raise ValueError("kernel evaluated outside the domain")
    factor = 1.0
    if not spec.is_standard:
        from .transfer import jacobian_det_to_standard  # local import, cycle-free at call time
        factor = jacobian_det_to_standard(spec, z) * np.conj(jacobian_det_to_standard(spec, zeta))
        z = to_standard_model(spec, z)
        zeta = to_standard_model(spec, zeta)
    n, k = spec.n, spec.k
    fz = to_product_model(n, k, z)
    fzeta = to_product_model(n, k, zeta)
    det_z = jacobian_det_from_product(n, k, fz)
    det_zeta = jacobian_det_from_product(n, k, fzeta)
    val = factor * kernel_product(spec, fz, fzeta) / (det_z * np.conj(det_zeta))
    val = np.asarray(val)
    return complex(val) if val.ndim == 0 else val


# --- orthonormal monomial machinery ------------------------------------


def monomial_norm_sq_disk(m: int) -> float:
    """Squared norm of w^m on the normalized disk: 1/(m+1)."""
    if m < 0:
        raise ValueError("monomial degree must be >= 0")
    return 1.0 / (m + 1)


def monomial_norm_sq_ball(k: int, nu: Sequence[int]) -> float:
    """Squared norm of the monomial eta^nu on the normalized ball: k! nu!/(|nu|+k)!."""
    nu = tuple(int(v) for v in nu)
    if len(nu) != k or any(v < 0 for v in nu):
        raise ValueError("multi-index must have length k with non-negative entries")
    total = sum(nu)
    return math.exp(log_factorial(k) + sum(log_factorial(v) for v in nu)
                    - log_factorial(total + k))


def multi_indices(k: int, max_degree: int) -> Iterator[tuple[int, ...]]:
    """Multi-indices of length k with total degree <= max_degree.

    Ordered by total degree, ties broken lexicographically (ordering is part
    of the test contract only).
    """
    for degree in range(max_degree + 1):
        seen = sorted(set(
            _composition(c, k, degree)
            for c in combinations_with_replacement(range(k), degree)))
        for nu in seen:
            yield nu


def _composition(positions: tuple[int, ...], k: int, degree: int) -> tuple[int, ...]:
    out = [0] * k
    for p in positions:
        out[p] += 1
    return tuple(out)


def _degree_parts_disk(N: int, w, eta) -> np.ndarray:
    """parts[m] = (m+1) (w conj(eta))^m, the degree-m slice of the disk kernel."""
    x = np.asarray(w, dtype=complex) * np.conj(np.asarray(eta, dtype=complex))
    m = np.arange(N + 1)
    return (m + 1) * x[..., None] ** m


def _degree_parts_ball(k: int, N: int, w, eta) -> np.ndarray:
    """parts[m] = C(m+k, k) <w, eta>^m, the degree-m slice of the ball kernel."""
    w = np.asarray(w, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    ip = np.sum(w * np.conj(eta), axis=-1)
    m = np.arange(N + 1)
    coeff = np.array([math.comb(mm + k, k) for mm in range(N + 1)], dtype=float)
    return coeff * ip[..., None] ** m


def kernel_truncated(model: Model, N: int, w, eta) -> complex | np.ndarray:
    """Orthonormal-basis kernel truncated at total degree N.

    `model` is "disk", ("ball", k) or ("product", spec). For the product the
    truncation is by total degree across all factors (the factor degree parts
    are convolved).
    """
    if N < 0:
        raise ValueError("truncation degree must be >= 0")
    if model == "disk":
        parts = _degree_parts_disk(N, w, eta)
    elif isinstance(model, tuple) and model[0] == "ball":
        parts = _degree_parts_ball(int(model[1]), N, np.asarray(w), np.asarray(eta))
    elif isinstance(model, tuple) and model[0] == "product":
        spec: HartogsDomainSpec = model[1]
        w = np.asarray(w, dtype=complex)
        eta = np.asarray(eta, dtype=complex)
        offs = spec.offsets
        factor_parts = [
            _degree_parts_ball(kj, N, w[..., offs[i]:offs[i + 1]], eta[..., offs[i]:offs[i + 1]])
            for i, (kj, _) in enumerate(spec.blocks)
        ] + [
            _degree_parts_disk(N, w[..., j], eta[..., j])
            for j in range(spec.k, spec.n)
        ]
        parts = factor_parts[0]
        for nxt in factor_parts[1:]:
            acc = np.zeros_like(parts)
            for m in range(N + 1):
                # degree-m slice of the product, truncated at total degree N
                acc[..., m] = np.sum(parts[..., :m + 1] * nxt[..., m::-1], axis=-1)
            parts = acc
    else:
        raise ValueError(f"unknown truncated-kernel model {model!r}")
    val = parts.sum(axis=-1)
    return complex(val) if val.ndim == 0 else val


# --- Monte-Carlo Bergman projection -------------------------------------


def mc_bergman_projection(spec: HartogsDomainSpec, f: Callable[[np.ndarray], np.ndarray],
                          z, samples: int, seed: int,
                          chunk_size: int = 1 << 15, workers: int = 1
                          ) -> tuple[complex, float]:
    """Monte-Carlo estimate of the Bergman projection of f at the point z.

    Integrates K(z, .) f(.) over the domain by sampling the product model and
    weighting with the quotient-chart Jacobian. Returns (estimate, stderr).
    Requires a standard-model spec.
    """
    if not spec.is_standard:
        raise ValueError("projection quadrature is implemented on the standard model")
    z = np.asarray(z, dtype=complex)
    if not contains(spec, z):
        raise ValueError("projection point lies outside the domain")
    n, k = spec.n, spec.k
    fz = to_product_model(n, k, z)
    det_z = jacobian_det_from_product(n, k, fz)

    def values(rng: np.random.Generator, count: int) -> np.ndarray:
        w = product_points(spec, rng, count)
        kern = kernel_product(spec, fz, w)
        det_w = jacobian_det_from_product(n, k, w)
        return kern * det_w * f(from_product_model(n, k, w))

    est, stderr = mc.mc_mean(values, samples, seed, chunk_size, workers)
    return complex(est) / complex(det_z), stderr / abs(complex(det_z))
