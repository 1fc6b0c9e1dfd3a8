"""Dense symmetric eigensolver (cyclic Jacobi) and numeric Morse classification.

The solver works on a stack of matrices at once. Each rotation is applied to
every matrix that has not yet converged; converged matrices receive the
identity rotation, which leaves them bit-for-bit unchanged, so a matrix's
result never depends on what else is in the batch.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConvergenceError, NotSymmetric

OFFDIAG_RTOL = 1e-13
MAX_SWEEPS = 50


@dataclass(frozen=True)
class NumericSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray]
    residual: float
    sweeps: int

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class MorseReport:
    index: int
    zero_count: int
    degenerate: bool
    stable: bool
    marginal: bool = False


def _check_symmetric(a: np.ndarray, tol: float = 1e-12):
    if a.shape[-1] != a.shape[-2]:
        raise NotSymmetric(f"matrix is not square: {a.shape}")
    scale = np.maximum(1.0, np.abs(a).max(axis=(-2, -1)))
    asym = np.abs(a - np.swapaxes(a, -1, -2)).max(axis=(-2, -1))
    if np.any(asym > tol * scale):
        raise NotSymmetric(f"matrix is not symmetric (max asymmetry {asym.max():.3e})")


def jacobi_eigh(a: np.ndarray, want_vectors: bool = True,
                rtol: float = OFFDIAG_RTOL, max_sweeps: int = MAX_SWEEPS):
    """Cyclic Jacobi on a stack ``(K, N, N)`` of symmetric matrices.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with eigenvalues sorted
    ascending per matrix; ``eigenvectors[k][:, i]`` belongs to ``eigenvalues[k, i]``.
    Raises :class:`ConvergenceError` if some matrix still has an off-diagonal
    entry above ``rtol * ||A||_F`` after ``max_sweeps`` sweeps.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 3:
        raise ValueError("expected a stack of matrices with shape (K, N, N)")
    _check_symmetric(a)
    k, n, _ = a.shape
    v = np.broadcast_to(np.eye(n), (k, n, n)).copy() if want_vectors else None
    threshold = rtol * np.sqrt((a * a).sum(axis=(1, 2)))
    upper = np.triu_indices(n, 1)

    sweeps = 0
    while True:
        off = np.abs(a[:, upper[0], upper[1]]).max(axis=1) if n > 1 else np.zeros(k)
        active = off >= threshold
        active &= off > 0.0
        if not active.any():
            break
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(max off-diagonal {off.max():.3e})")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                rotate = active & (apq != 0.0)
                if not rotate.any():
                    continue
                safe = np.where(rotate, apq, 1.0)
                theta = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
                t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(theta == 0.0, 1.0, t)
                c = np.where(rotate, 1.0 / np.sqrt(t * t + 1.0), 1.0)
                s = np.where(rotate, t * c, 0.0)
                cc, ss = c[:, None], s[:, None]

                col_p, col_q = a[:, :, p].copy(), a[:, :, q].copy()
                a[:, :, p] = cc * col_p - ss * col_q
                a[:, :, q] = ss * col_p + cc * col_q
                row_p, row_q = a[:, p, :].copy(), a[:, q, :].copy()
                a[:, p, :] = cc * row_p - ss * row_q
                a[:, q, :] = ss * row_p + cc * row_q
                a[rotate, p, q] = 0.0
                a[rotate, q, p] = 0.0
                if want_vectors:
                    vp, vq = v[:, :, p].copy(), v[:, :, q].copy()
                    v[:, :, p] = cc * vp - ss * vq
                    v[:, :, q] = ss * vp + cc * vq

    w = np.diagonal(a, axis1=1, axis2=2).copy()
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    if want_vectors:
        v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, v, sweeps


def symmetric_spectrum(matrix, want_vectors: bool = False) -> NumericSpectrum:
    """Full spectrum of one symmetric matrix via cyclic Jacobi rotations."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    w, v, sweeps = jacobi_eigh(matrix[None], want_vectors=True)
    w, v = w[0], v[0]
    residual = float(np.abs(matrix @ v - v * w).max()) if matrix.size else 0.0
    return NumericSpectrum(w, v if want_vectors else None, residual, sweeps)


def batch_eigenvalues(matrices) -> np.ndarray:
    """Sorted eigenvalues for a stack of symmetric matrices, shape (K, N)."""
    matrices = np.asarray(matrices, dtype=float)
    if len(matrices) == 0:
        return np.zeros((0, matrices.shape[-1]))
    return jacobi_eigh(matrices, want_vectors=False)[0]


def default_zero_tol(matrix) -> float:
    """1e-8 * max(1, ||J||_inf) with the infinity norm taken as the max row sum."""
    norm = float(np.abs(np.asarray(matrix)).sum(axis=-1).max()) if np.size(matrix) else 0.0
    return 1e-8 * max(1.0, norm)


def morse_classify(eigenvalues, zero_tol: float) -> MorseReport:
    """Count positive eigenvalues; ties at exactly +-zero_tol count as zero."""
    if zero_tol <= 0:
        raise ValueError("zero_tol must be positive")
    if isinstance(eigenvalues, NumericSpectrum):
        eigenvalues = eigenvalues.eigenvalues
    lam = np.asarray(eigenvalues, dtype=float)
    index = int((lam > zero_tol).sum())
    zeros = int((np.abs(lam) <= zero_tol).sum())
    mag = np.abs(lam)
    marginal = bool(np.any((mag >= 0.1 * zero_tol) & (mag <= 10 * zero_tol)))
    return MorseReport(index=index, zero_count=zeros, degenerate=zeros > 1,
                       stable=index == 0 and zeros == 1, marginal=marginal)
