"""Deterministic samplers for balls, cones, caps and weighted spheres.

Random streams come from the counter-based Philox generator keyed by
``(seed, shard)``, so a sample plan is reproducible bit-for-bit and shards
can be evaluated in any order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RegionEmpty

DEFAULT_SHARD = 4096


def rng_for(seed, shard=0, stream=0):
    key = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, int(shard), int(stream)]).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def unit_sphere(rng, n):
    """Uniform points on the unit sphere of C^2 as an (n, 2) complex array."""
    x = rng.standard_normal((n, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x[:, 0::2] + 1j * x[:, 1::2]


def log_uniform(rng, n, rmin, rmax):
    return np.exp(rng.uniform(np.log(rmin), np.log(rmax), n))


def sample_weighted_sphere(w, n, seed, shard=0):
    """Points with |z1|^m1 + |z2|^m2 = 1."""
    rng = rng_for(seed, shard, 11)
    z = unit_sphere(rng, n)
    lam = 1.0 / (np.abs(z[:, 0]) ** w.m1 + np.abs(z[:, 1]) ** w.m2)
    z[:, 0] *= lam ** (1.0 / w.m1)
    z[:, 1] *= lam ** (1.0 / w.m2)
    return z


def frame_points(ell, s, xi):
    """Map local coordinates (ell, s) of a line to ambient points.

    ``xi`` is a finite slope (line t1 = xi t2, ell = t1 - xi t2, s = t2) or
    ``None`` for the axis t2 = 0 (ell = t2, s = t1).
    """
    if xi is None:
        return np.stack([s, ell], axis=1)
    return np.stack([ell + xi * s, s], axis=1)


def local_coords(z, xi):
    if xi is None:
        return z[:, 1], z[:, 0]
    return z[:, 0] - xi * z[:, 1], z[:, 1]


@dataclass
class Region:
    """Base class; subclasses implement ``_draw(rng, n)``."""

    rmin: float = 1e-3
    rmax: float = 1.0
    radial: str = "log"

    def _radii(self, rng, n):
        if self.rmax <= 0 or self.rmin > self.rmax:
            raise RegionEmpty("empty radial range")
        if self.radial == "fixed" or self.rmin == self.rmax:
            return np.full(n, self.rmax)
        return log_uniform(rng, n, self.rmin, self.rmax)

    def sample(self, n, seed, shard=0):
        rng = rng_for(seed, shard, 7)
        z = self._draw(rng, n)
        z = z / np.linalg.norm(z, axis=1, keepdims=True)
        return z * self._radii(rng, n)[:, None]

    def describe(self):
        return {"kind": type(self).__name__, **{k: v for k, v in self.__dict__.items() if not k.startswith("_")}}


@dataclass
class Ball(Region):
    def _draw(self, rng, n):
        return unit_sphere(rng, n)


@dataclass
class Cone(Region):
    """Shell {t*aperture < |ell| / |s| < aperture} around a line (t = inner ratio)."""

    xi: complex | None = 0.0
    aperture: float = 0.1
    inner: float = 0.0
    core_fraction: float = 0.15

    def _draw(self, rng, n):
        if self.aperture <= 0 or self.inner >= 1:
            raise RegionEmpty("cone has empty interior")
        s = np.exp(2j * np.pi * rng.random(n))
        lo = max(self.inner * self.aperture, 1e-9 * self.aperture)
        ratio = np.exp(rng.uniform(np.log(lo), np.log(self.aperture), n))
        if self.inner == 0:
            # keep a fixed share of points very close to the core line
            ncore = int(self.core_fraction * n)
            ratio[:ncore] = self.aperture * 10.0 ** rng.uniform(-6, -1, ncore)
        ell = ratio * np.exp(2j * np.pi * rng.random(n)) * s
        return frame_points(ell, s, self.xi)


@dataclass
class Cap(Region):
    """Cone of directions within Fubini-Study distance d < radius2 of a unit vector."""

    center: tuple = (0.0, 1.0)
    radius2: float = 0.1
    inner2: float = 0.0

    def _draw(self, rng, n):
        e = np.asarray(self.center, dtype=complex)
        e = e / np.linalg.norm(e)
        eperp = np.array([-np.conj(e[1]), np.conj(e[0])])
        d = rng.uniform(self.inner2, self.radius2, n)
        phase = np.exp(2j * np.pi * rng.random(n))
        glob = np.exp(2j * np.pi * rng.random(n))
        v = np.sqrt(1 - d)[:, None] * e[None, :] + (np.sqrt(d) * phase)[:, None] * eperp[None, :]
        return v * glob[:, None]


@dataclass
class PointSet(Region):
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=complex))

    def sample(self, n, seed, shard=0):
        if not len(self.points):
            raise RegionEmpty("no points")
        return np.asarray(self.points)[:n]


def sharded(region, n, seed, shard_size=DEFAULT_SHARD):
    """Yield (shard_index, points) chunks that together form the sample plan."""
    if n <= 0:
        raise RegionEmpty("sample count must be positive")
    k = 0
    done = 0
    while done < n:
        m = min(shard_size, n - done)
        yield k, region.sample(m, seed, k)
        done += m
        k += 1
