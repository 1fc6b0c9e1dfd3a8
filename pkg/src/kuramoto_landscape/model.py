"""Hebbian Kuramoto model with second-order Fourier coupling.

    dphi_i/dt = (1/N) sum_j C_ij sin(phi_j - phi_i) + (eps/N) sum_j sin 2(phi_j - phi_i)

with C = xi1 xi1^T + xi2 xi2^T. The flow is the negative gradient of

    V(phi) = -(1/2N) sum_ij C_ij cos(phi_j - phi_i) - (eps/4N) sum_ij cos 2(phi_j - phi_i).

All functions accept a single state of shape (N,) or a stack of shape (K, N).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .patterns import BinaryPattern, MemoryPair, PatternError


def build_connection(pair: MemoryPair) -> np.ndarray:
    """Hebbian coupling matrix; symmetric with diagonal 2."""
    a, b = pair.xi1.array, pair.xi2.array
    return np.outer(a, a) + np.outer(b, b)


@dataclass(frozen=True)
class ModelConfig:
    pair: MemoryPair
    epsilon: float
    coupling: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.epsilon):
            raise PatternError(f"epsilon must be finite, got {self.epsilon}")
        object.__setattr__(self, "epsilon", float(self.epsilon))
        c = build_connection(self.pair)
        c.flags.writeable = False
        object.__setattr__(self, "coupling", c)

    @property
    def n(self) -> int:
        return self.pair.n


def _check(cfg: ModelConfig, phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if phi.shape[-1] != cfg.n:
        raise PatternError(f"state length {phi.shape[-1]} != {cfg.n}")
    return phi


def velocity_and_energy(cfg: ModelConfig, phi) -> tuple[np.ndarray, np.ndarray]:
    """Vector field and energy evaluated together (shares the trig work).

    Uses sum_j C_ij sin(phi_j - phi_i) = cos(phi_i) (C sin)_i - sin(phi_i) (C cos)_i
    and the analogous identity for the second harmonic, so the cost is two
    matrix-vector products instead of an N x N table of sines.
    """
    phi = _check(cfg, phi)
    n, eps, C = cfg.n, cfg.epsilon, cfg.coupling
    c, s = np.cos(phi), np.sin(phi)
    cc, cs = c @ C, s @ C
    c2, s2 = c * c - s * s, 2.0 * c * s
    sum_c2 = c2.sum(axis=-1, keepdims=True)
    sum_s2 = s2.sum(axis=-1, keepdims=True)
    vel = (c * cs - s * cc) / n + eps / n * (c2 * sum_s2 - s2 * sum_c2)
    en = (-(c * cc + s * cs).sum(axis=-1) / (2 * n)
          - eps / (4 * n) * (sum_c2[..., 0] ** 2 + sum_s2[..., 0] ** 2))
    return vel, en


def velocity(cfg: ModelConfig, phi) -> np.ndarray:
    return velocity_and_energy(cfg, phi)[0]


def energy(cfg: ModelConfig, phi):
    """Potential V(phi); a float for a single state, an array for a stack."""
    en = velocity_and_energy(cfg, phi)[1]
    return float(en) if np.ndim(en) == 0 else en


def velocity_direct(cfg: ModelConfig, phi) -> np.ndarray:
    """Term-by-term evaluation of the vector field (reference for the fast path)."""
    phi = _check(cfg, phi)
    diff = phi[..., None, :] - phi[..., :, None]  # [i, j] = phi_j - phi_i
    terms = cfg.coupling * np.sin(diff) + cfg.epsilon * np.sin(2 * diff)
    return terms.sum(axis=-1) / cfg.n


def energy_direct(cfg: ModelConfig, phi):
    phi = _check(cfg, phi)
    diff = phi[..., None, :] - phi[..., :, None]
    total = (-(cfg.coupling * np.cos(diff)).sum(axis=(-2, -1)) / (2 * cfg.n)
             - cfg.epsilon * np.cos(2 * diff).sum(axis=(-2, -1)) / (4 * cfg.n))
    return float(total) if np.ndim(total) == 0 else total


def binary_energy(cfg: ModelConfig, eta: BinaryPattern) -> float:
    """Closed-form energy at arccos(eta): -(1/2N) sum_k (eta . xi_k)^2 - N eps / 4."""
    e = eta.array
    overlaps = (e @ cfg.pair.xi1.array) ** 2 + (e @ cfg.pair.xi2.array) ** 2
    return -overlaps / (2 * cfg.n) - cfg.n * cfg.epsilon / 4


def jacobian(cfg: ModelConfig, phi) -> np.ndarray:
    """Jacobian of the vector field (the negative Hessian of V).

    Off-diagonal entries are (1/N) C_ij cos(phi_j - phi_i) + (2 eps/N) cos 2(phi_j - phi_i);
    the diagonal is the negated sum of the computed off-diagonal entries, so every
    row sums to zero exactly.
    """
    phi = _check(cfg, phi)
    n = cfg.n
    diff = phi[..., None, :] - phi[..., :, None]
    jac = (cfg.coupling * np.cos(diff) + 2 * cfg.epsilon * np.cos(2 * diff)) / n
    idx = np.arange(n)
    jac[..., idx, idx] = 0.0
    jac = 0.5 * (jac + np.swapaxes(jac, -1, -2))
    jac[..., idx, idx] = -jac.sum(axis=-1)
    return jac
