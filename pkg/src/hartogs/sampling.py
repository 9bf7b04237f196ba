"""Uniform samplers on disks, balls and spheres with a fixed per-sample draw layout.

Every sampler consumes a fixed number of uniform deviates per sample (one
matrix row), so sample i is a pure function of the generator state and i.
Combined with the per-chunk generators in `mc`, this makes each sample a pure
function of (seed, global index): prefixes are stable when the requested count
changes, and chunk partials reduce deterministically regardless of worker
count. Normals come from Box-Muller rather than the ziggurat for exactly this
reason (the ziggurat's rejection loop has a data-dependent draw budget).

Measure convention: the disk and every ball carry normalized volume,
V(disk) = V(ball) = 1.
"""

from __future__ import annotations

import numpy as np


def normals_from_uniform(u: np.ndarray) -> np.ndarray:
    """Box-Muller transform; u has even last-axis length, entries in [0, 1)."""
    u1 = u[..., 0::2]
    u2 = u[..., 1::2]
    # 1-u1 lies in (0, 1], so the log is finite.
    rad = np.sqrt(-2.0 * np.log1p(-u1))
    ang = 2.0 * np.pi * u2
    out = np.empty_like(u)
    out[..., 0::2] = rad * np.cos(ang)
    out[..., 1::2] = rad * np.sin(ang)
    return out


def _as_complex(x: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(x).view(np.complex128)


def disk_draws_per_point() -> int:
    return 2


def disk_from_uniform(u: np.ndarray, r_min: float = 0.0, r_max: float = 1.0) -> np.ndarray:
    """Uniform points of the annulus r_min <= |w| <= r_max; u shape (count, 2)."""
    rho2 = r_min * r_min + u[:, 0] * (r_max * r_max - r_min * r_min)
    r = np.sqrt(rho2)
    return r * np.exp(2j * np.pi * u[:, 1])


def ball_draws_per_point(k: int) -> int:
    return 2 * k + 1


def ball_from_uniform(u: np.ndarray, k: int, r_max: float = 1.0) -> np.ndarray:
    """Uniform points of the ball |w| <= r_max in C^k; u shape (count, 2k+1)."""
    if k == 1:
        return disk_from_uniform(u[:, :2], 0.0, r_max)[:, None]
    x = normals_from_uniform(u[:, : 2 * k])
    z = _as_complex(x)
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    radius = r_max * u[:, 2 * k] ** (1.0 / (2 * k))
    return z / norms * radius[:, None]


def sphere_draws_per_point(k: int) -> int:
    return 2 * k


def sphere_from_uniform(u: np.ndarray, k: int) -> np.ndarray:
    """Uniform points of the unit sphere in C^k; u shape (count, 2k)."""
    x = normals_from_uniform(u)
    z = _as_complex(x)
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return z / norms


def disk_points(rng: np.random.Generator, count: int,
                r_min: float = 0.0, r_max: float = 1.0) -> np.ndarray:
    return disk_from_uniform(rng.random((count, 2)), r_min, r_max)


def ball_points(rng: np.random.Generator, count: int, k: int,
                r_max: float = 1.0) -> np.ndarray:
    return ball_from_uniform(rng.random((count, ball_draws_per_point(k))), k, r_max)


def sphere_points(rng: np.random.Generator, count: int, k: int) -> np.ndarray:
    return sphere_from_uniform(rng.random((count, sphere_draws_per_point(k))), k)
