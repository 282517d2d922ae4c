"""Mollified distance ``g_{C,eps} = rho_eps * d_C`` and the smoothed body ``C^eps = {g <= eps}``.

The mollifier is the exponential bump ``rho(u) = c_d exp(-1/(1-|u|^2))`` on the
unit ball.  In dimension at most 3 the convolution is a product quadrature
in spherical coordinates (Gauss-Legendre radially and in ``cos(theta)``,
trapezoidal in the azimuth); above that it is a self-normalized Monte-Carlo
average over ball samples.  All weights are positive and sum to one.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from ._sampling import ball_samples, rng_for
from .bodies.families import Body
from .growth import boundary_cloud
from .measure import sphere_area

NORMALIZATION_TOL = 1e-6


def bump(s):
    """Unnormalized radial profile ``exp(-1/(1-s^2))`` on ``[0, 1)``, zero outside."""
    s = np.asarray(s, dtype=float)
    inside = s < 1.0
    out = np.zeros_like(s)
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


@lru_cache(maxsize=None)
def bump_constant(d: int) -> float:
    """``c_d`` with ``int_{|u|<1} c_d exp(-1/(1-|u|^2)) du = 1``."""
    radial, _ = quad(lambda s: s ** (d - 1) * float(bump(np.array(s))), 0.0, 1.0,
                     epsabs=0.0, epsrel=1e-13, limit=200)
    return 1.0 / (sphere_area(d) * radial) if d > 1 else 1.0 / (2.0 * radial)


@dataclass(frozen=True)
class MollifierCfg:
    epsilon: float
    radial: int = 24
    polar: int = 12
    azimuthal: int = 24
    mc_samples: int = 100_000
    seed: int = 0x5EED

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@lru_cache(maxsize=32)
def _nodes(d, radial, polar, azimuthal, mc_samples, seed):
    """Unit-ball nodes and positive weights summing to 1 for ``rho``."""
    xr, wr = np.polynomial.legendre.leggauss(radial)
    s, ws = 0.5 * (xr + 1.0), 0.5 * wr
    if d == 1:
        x, w = np.polynomial.legendre.leggauss(2 * radial)
        U, W = x[:, None], w * bump(np.abs(x))
        c = bump_constant(1)
    elif d == 2:
        phi = 2 * np.pi * np.arange(azimuthal) / azimuthal
        S, P = np.meshgrid(s, phi, indexing="ij")
        U = np.stack([S * np.cos(P), S * np.sin(P)], axis=-1).reshape(-1, 2)
        W = (np.outer(ws * s * bump(s), np.full(azimuthal, 2 * np.pi / azimuthal))).ravel()
        c = bump_constant(2)
    elif d == 3:
        xc, wc = np.polynomial.legendre.leggauss(polar)
        phi = 2 * np.pi * np.arange(azimuthal) / azimuthal
        S, C, P = np.meshgrid(s, xc, phi, indexing="ij")
        Sn = np.sqrt(1.0 - C ** 2)
        U = np.stack([S * Sn * np.cos(P), S * Sn * np.sin(P), S * C], axis=-1).reshape(-1, 3)
        W = (ws * s ** 2 * bump(s))[:, None, None] * wc[None, :, None] * (2 * np.pi / azimuthal)
        W = np.broadcast_to(W, S.shape).ravel()
        c = bump_constant(3)
    else:
        U = np.array(ball_samples(d, mc_samples, seed))
        W = bump(np.linalg.norm(U, axis=1))
        W = W / W.sum()
        return U, W
    total = c * W.sum()
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ArithmeticError(f"mollifier quadrature integrates to {total}, not 1")
    return U, W / W.sum()


def mollified_distance(body: Body, x, cfg: MollifierCfg, batch: int = 256):
    """``g_{C,eps}(x) = int rho_eps(x - y) d_C(y) dy``; vectorised over points."""
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    U, W = _nodes(body.dim, cfg.radial, cfg.polar, cfg.azimuthal, cfg.mc_samples, cfg.seed)
    E = cfg.epsilon * U
    out = np.empty(X.shape[0])
    for i in range(0, X.shape[0], batch):
        chunk = X[i:i + batch]
        pts = (chunk[:, None, :] - E[None, :, :]).reshape(-1, body.dim)
        dist = body.distance(pts).reshape(chunk.shape[0], -1)
        out[i:i + batch] = dist @ W
    return float(out[0]) if single else out


def in_smoothed(body: Body, eps: float, x, cfg: MollifierCfg | None = None):
    """Membership in ``C^eps = {g_{C,eps} <= eps}``."""
    cfg = cfg or MollifierCfg(eps)
    g = mollified_distance(body, x, cfg)
    return g <= eps


@dataclass(frozen=True)
class SandwichCheck:
    """Outcome of testing ``C ⊂ C^eps ⊂ C + 2 eps B`` on sampled points."""

    epsilon: float
    samples: int
    inner_violations: int   # x in C but g(x) > eps
    outer_violations: int   # g(x) <= eps but d_C(x) > 2 eps
    worst_margin: float
    seed: int

    @property
    def violations(self) -> int:
        return self.inner_violations + self.outer_violations


def sandwich_points(body: Body, eps: float, samples: int, seed: int, window: float = 1.0):
    """Half uniform in a box about an interior point, half within ``3 eps`` of the boundary."""
    rng = rng_for(seed, 31)
    d = body.dim
    x0 = body.interior_point()
    half = samples // 2
    box = x0 + window * (2.0 * rng.random((half, d)) - 1.0)
    bnd = boundary_cloud(body, samples - half, window, seed)
    jitter = rng.standard_normal((samples - half, d))
    jitter *= (3.0 * eps * rng.random(samples - half) / np.linalg.norm(jitter, axis=1))[:, None]
    return np.vstack([box, bnd + jitter])


def check_sandwich(body: Body, eps: float, samples: int = 10_000, seed: int = 0x5EED,
                   cfg: MollifierCfg | None = None) -> SandwichCheck:
    cfg = cfg or MollifierCfg(eps)
    X = sandwich_points(body, eps, samples, seed)
    g = mollified_distance(body, X, cfg)
    dC = body.distance(X)
    inC = body.contains(X)
    inner = inC & (g > eps)
    outer = (g <= eps) & (dC > 2.0 * eps + 1e-12)
    margins = np.concatenate([np.where(inC, g - eps, -np.inf), np.where(g <= eps, dC - 2 * eps, -np.inf)])
    return SandwichCheck(eps, samples, int(inner.sum()), int(outer.sum()), float(margins.max()), seed)
