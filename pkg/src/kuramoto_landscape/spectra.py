"""Closed-form Jacobian spectra and Morse indices for two stored memories.

Covers binary-pattern critical points (every point of {0, pi}^N), the
criticality test for ternary points in {0, pi/2, pi}^N, and the spectra of
memory-compatible ternary points (pi/2 exactly on I2, or exactly on I1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (BoundaryCase, MemorizedPattern, NotMemoryCompatible,
                     OracleDisagreement, OutsideTheoremRange)
from .patterns import (BinaryPattern, MemoryPair, TernaryPoint, coordinate_classes,
                       epsilon_hat, epsilon_star, memory_shape, partition_eta,
                       partition_ternary)

ANALYTIC_ZERO_TOL = 1e-12
_EQ_TOL = 1e-12


@dataclass(frozen=True)
class SpectrumEntry:
    value: float
    multiplicity: int
    label: str


@dataclass(frozen=True)
class AnalyticSpectrum:
    entries: tuple[SpectrumEntry, ...]

    @classmethod
    def build(cls, raw) -> "AnalyticSpectrum":
        return cls(tuple(SpectrumEntry(float(v), int(m), lab) for v, m, lab in raw if m > 0))

    @property
    def size(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def values(self) -> np.ndarray:
        """Eigenvalues expanded by multiplicity, sorted ascending."""
        out = [e.value for e in self.entries for _ in range(e.multiplicity)]
        return np.sort(np.array(out, dtype=float))

    def positive_count(self, tol: float = ANALYTIC_ZERO_TOL) -> int:
        return sum(e.multiplicity for e in self.entries if e.value > tol)

    def zero_count(self, tol: float = ANALYTIC_ZERO_TOL) -> int:
        return sum(e.multiplicity for e in self.entries if abs(e.value) <= tol)


@dataclass(frozen=True)
class Classification:
    morse_index: int
    case_tag: str
    spectrum: AnalyticSpectrum


@dataclass(frozen=True)
class EigenspaceBasis:
    label: str
    eigenvalue: float
    vectors: tuple[np.ndarray, ...]


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= _EQ_TOL * max(1.0, abs(a), abs(b))


# --------------------------------------------------------------------------- binary points

def binary_spectrum_analytic(pair: MemoryPair, eta: BinaryPattern, epsilon: float) -> AnalyticSpectrum:
    """Jacobian spectrum at a non-memorized binary pattern, valid for any real epsilon."""
    if pair.is_memorized(eta):
        raise MemorizedPattern(f"{eta} is a stored memory or its inverse")
    n, eps = pair.n, epsilon
    a, b, c, d = partition_eta(pair, eta).sizes
    i1, i2 = a + b, c + d
    return AnalyticSpectrum.build([
        (2 * ((-a + b) / n - eps), a - 1 if a else 0, "I11"),
        (2 * ((a - b) / n - eps), b - 1 if b else 0, "I12"),
        (2 * (i1 / n - eps), 1 if a and b else 0, "I11;I12"),
        (2 * ((-c + d) / n - eps), c - 1 if c else 0, "I21"),
        (2 * ((c - d) / n - eps), d - 1 if d else 0, "I22"),
        (2 * (i2 / n - eps), 1 if c and d else 0, "I21;I22"),
        (-2 * eps, 1, "second-order"),
        (0.0, 1, "translation"),
    ])


def memorized_spectrum_orthogonal(n: int, m: int, epsilon: float) -> AnalyticSpectrum:
    """Spectrum at any stored pattern when the m memories are mutually orthogonal."""
    return AnalyticSpectrum.build([
        (-1 - 2 * epsilon, n - m, "bulk"),
        (-2 * epsilon, m - 1, "memories"),
        (0.0, 1, "translation"),
    ])


def memorized_spectrum(pair: MemoryPair, epsilon: float) -> AnalyticSpectrum:
    """Spectrum at +-xi1 or +-xi2 for any pair, orthogonal or not.

    At a stored pattern the Jacobian is ``A/N - diag(1 + 2 eps + s_i S/N)`` with
    ``A = (1 + 2 eps) 11^T + s s^T``, ``s`` the +1/-1 indicator of I1/I2 and
    ``S = |I1| - |I2|``. Zero-sum vectors inside I1 or inside I2 are
    eigenvectors; span{1, s} carries 0 and -2 eps. Reduces to the orthogonal
    formula when S = 0.
    """
    i1, i2 = pair.partition.sizes
    n = pair.n
    base = -(1 + 2 * epsilon)
    shift = (i1 - i2) / n
    return AnalyticSpectrum.build([
        (base - shift, i1 - 1, "I1"),
        (base + shift, i2 - 1, "I2"),
        (-2 * epsilon, 1, "memories"),
        (0.0, 1, "translation"),
    ])


def _check_binary_range(pair: MemoryPair, epsilon: float):
    estar = epsilon_star(pair.partition)
    if _close(epsilon, 0.0) or _close(epsilon, estar):
        raise BoundaryCase(f"epsilon={epsilon} sits on the boundary of (0, {estar:.6g})")
    if not 0 < epsilon < estar:
        raise OutsideTheoremRange(f"epsilon={epsilon} outside (0, eps*={estar:.6g})")


def _case_table(m1: int, d1: int, m2: int, d2: int, eps_n: float) -> tuple[int, str]:
    def small(diff):
        if _close(diff, eps_n):
            raise BoundaryCase(f"|difference| = {diff} equals eps*N = {eps_n:.12g}")
        return diff < eps_n

    if m1 == 0:
        group = "1"
    elif m1 == 1 or small(d1):
        group = "2"
    else:
        group = "3"

    if m2 == 0:
        sub = "a"
    elif m2 == 1:
        sub = "b"
    else:
        sub = "c" if small(d2) else "d"

    if group == "1":
        # sub "a" would mean eta = +-xi1 or +-xi2
        index = {"b": 1, "c": 1, "d": m2}[sub]
        sub = {"b": "a", "c": "b", "d": "c"}[sub]
    elif group == "2":
        index = {"a": 1, "b": 2, "c": 2, "d": m2 + 1}[sub]
    else:
        index = {"a": m1, "b": m1 + 1, "c": m1 + 1, "d": m1 + m2}[sub]
    return index, group + sub


def morse_index_binary(pair: MemoryPair, eta: BinaryPattern, epsilon: float) -> Classification:
    """Morse index of a non-memorized binary pattern for 0 < epsilon < eps*.

    The index is read off the case table (branches 1a..3d) and recomputed as
    the number of positive closed-form eigenvalues; the two must agree.
    """
    if pair.is_memorized(eta):
        raise MemorizedPattern(f"{eta} is a stored memory or its inverse")
    _check_binary_range(pair, epsilon)
    a, b, c, d = partition_eta(pair, eta).sizes
    index, tag = _case_table(min(a, b), abs(a - b), min(c, d), abs(c - d), epsilon * pair.n)
    spectrum = binary_spectrum_analytic(pair, eta, epsilon)
    counted = spectrum.positive_count()
    if counted != index:
        raise OracleDisagreement(
            f"case {tag} gives index {index} but the spectrum has {counted} positive eigenvalues",
            point=eta)
    return Classification(index, tag, spectrum)


def is_index1_binary(pair: MemoryPair, eta: BinaryPattern, epsilon: float) -> tuple[bool, str | None]:
    """Index-1 test by the two cardinality conditions; returns (verdict, condition)."""
    if pair.is_memorized(eta):
        raise MemorizedPattern(f"{eta} is a stored memory or its inverse")
    _check_binary_range(pair, epsilon)
    a, b, c, d = partition_eta(pair, eta).sizes
    groups = {1: (a, b), 2: (c, d)}
    eps_n = epsilon * pair.n
    for ga, gb in ((1, 2), (2, 1)):
        (xa, ya), (xb, yb) = groups[ga], groups[gb]
        if min(xa, ya) != 0:
            continue
        if min(xb, yb) == 1:
            return True, f"(i) a={ga},b={gb}"
        if min(xb, yb) >= 2:
            diff = abs(xb - yb)
            if _close(diff, eps_n):
                raise BoundaryCase(f"|difference| = {diff} equals eps*N = {eps_n:.12g}")
            if diff < eps_n:
                return True, f"(ii) a={ga},b={gb}"
    return False, None


# --------------------------------------------------------------------------- ternary points

def is_ternary_critical(pair: MemoryPair, point: TernaryPoint) -> bool:
    """Four signed-sum conditions on the coordinate classes; independent of epsilon."""
    x0, xpi, xhalf = coordinate_classes(point)
    xi1 = pair.xi1.signs
    part = pair.partition

    def total(indices):
        return sum(xi1[j] for j in indices)

    for block in (part.i1, part.i2):
        if block & (x0 | xpi) and total(block & xhalf) != 0:
            return False
        if block & xhalf and total(block & x0) != total(block & xpi):
            return False
    return True


def is_memory_compatible(pair: MemoryPair, point: TernaryPoint) -> str:
    """``"mid1"``, ``"mid2"`` or ``"no"``."""
    return memory_shape(pair, point)


def _mid1_view(pair: MemoryPair, point: TernaryPoint):
    shape = memory_shape(pair, point)
    if shape == "no":
        raise NotMemoryCompatible(f"{point.label()} is not memory-compatible")
    work = pair.swapped() if shape == "mid2" else pair
    return shape, work, partition_ternary(work, point)


def ternary_spectrum_analytic(pair: MemoryPair, point: TernaryPoint, epsilon: float) -> AnalyticSpectrum:
    """Jacobian spectrum at a memory-compatible ternary point, any real epsilon."""
    _, work, sp = _mid1_view(pair, point)
    n, eps = pair.n, epsilon
    s1, s2, s3, s4 = sp.sizes
    i1, i2 = work.partition.sizes
    shift1 = 2 * eps * (i2 - i1) / n
    shift2 = 2 * eps * (i1 - i2) / n
    return AnalyticSpectrum.build([
        (2 * (-s1 + s2) / n + shift1, s1 - 1 if s1 else 0, "W(S1)"),
        (2 * (s1 - s2) / n + shift1, s2 - 1 if s2 else 0, "W(S2)"),
        (2 * i1 / n + shift1, 1 if s1 and s2 else 0, "W(S1;S2)"),
        (2 * (-s3 + s4) / n + shift2, s3 - 1 if s3 else 0, "W(S3)"),
        (2 * (s3 - s4) / n + shift2, s4 - 1 if s4 else 0, "W(S4)"),
        (2 * i2 / n + shift2, 1 if s3 and s4 else 0, "W(S3;S4)"),
        (0.0, 1, "W[1]"),
        (2 * eps, 1, "W(I1;I2)"),
    ])


def _pair_vector(n: int, s, s_tilde) -> np.ndarray:
    x = np.zeros(n)
    x[sorted(s)] = len(s_tilde)
    x[sorted(s_tilde)] = -len(s)
    return x


def _difference_vectors(n: int, s) -> list[np.ndarray]:
    idx = sorted(s)
    out = []
    for j in idx[1:]:
        x = np.zeros(n)
        x[idx[0]], x[j] = 1.0, -1.0
        out.append(x)
    return out


def eigenspace_bases(pair: MemoryPair, point: TernaryPoint, epsilon: float = 0.0) -> list[EigenspaceBasis]:
    """Explicit spanning vectors for each eigenspace of a memory-compatible point."""
    _, work, sp = _mid1_view(pair, point)
    spectrum = {e.label: e.value for e in ternary_spectrum_analytic(pair, point, epsilon).entries}
    n = pair.n
    p = work.partition
    out = [
        EigenspaceBasis("W[1]", 0.0, (np.ones(n),)),
        EigenspaceBasis("W(I1;I2)", 2 * epsilon, (_pair_vector(n, p.i1, p.i2),)),
    ]
    for label, s in (("W(S1)", sp.s1), ("W(S2)", sp.s2), ("W(S3)", sp.s3), ("W(S4)", sp.s4)):
        if len(s) > 1:
            out.append(EigenspaceBasis(label, spectrum[label], tuple(_difference_vectors(n, s))))
    for label, s, t in (("W(S1;S2)", sp.s1, sp.s2), ("W(S3;S4)", sp.s3, sp.s4)):
        if s and t:
            out.append(EigenspaceBasis(label, spectrum[label], (_pair_vector(n, s, t),)))
    return out


def _check_ternary_range(pair: MemoryPair, epsilon: float):
    i1, i2 = pair.partition.sizes
    if _close(epsilon, 0.0):
        raise BoundaryCase("epsilon = 0 is excluded")
    if i1 == i2:
        if epsilon < 0:
            raise OutsideTheoremRange(f"epsilon={epsilon} must be positive")
        return
    ehat = epsilon_hat(pair.partition)
    if _close(epsilon, ehat):
        raise BoundaryCase(f"epsilon={epsilon} equals eps_hat={ehat:.12g}")
    if not 0 < epsilon < ehat:
        raise OutsideTheoremRange(f"epsilon={epsilon} outside (0, eps_hat={ehat:.6g})")


def is_index1_ternary(pair: MemoryPair, point: TernaryPoint, epsilon: float) -> bool:
    """min(|S1|,|S2|) = min(|S3|,|S4|) = 0, valid for 0 < epsilon < eps_hat."""
    _, _, sp = _mid1_view(pair, point)
    _check_ternary_range(pair, epsilon)
    s1, s2, s3, s4 = sp.sizes
    return min(s1, s2) == 0 and min(s3, s4) == 0


def morse_index_ternary(pair: MemoryPair, point: TernaryPoint, epsilon: float) -> Classification:
    """Morse index of a memory-compatible point from its closed-form spectrum.

    Inside the index-1 theorem's range the cardinality test is evaluated too
    and must agree with the positive count.
    """
    shape, _, _ = _mid1_view(pair, point)
    spectrum = ternary_spectrum_analytic(pair, point, epsilon)
    index = spectrum.positive_count()
    tag = shape
    try:
        index1 = is_index1_ternary(pair, point, epsilon)
    except BoundaryCase:
        pass
    else:
        tag = f"{shape}/index1-test"
        if index1 != (index == 1):
            raise OracleDisagreement(
                f"index-1 test says {index1} but spectrum gives index {index}", point=point)
    return Classification(index, tag, spectrum)


def binary_classification(pair: MemoryPair, eta: BinaryPattern, epsilon: float) -> Classification:
    """Best available closed-form classification for any binary pattern.

    Uses the case table inside (0, eps*), the bare spectrum count elsewhere,
    and the stored-pattern spectrum for the memories.
    """
    if pair.is_memorized(eta):
        spec = memorized_spectrum(pair, epsilon)
        tag = "memorized/orthogonal" if pair.is_orthogonal() else "memorized"
        return Classification(spec.positive_count(), tag, spec)
    try:
        return morse_index_binary(pair, eta, epsilon)
    except OutsideTheoremRange:
        spec = binary_spectrum_analytic(pair, eta, epsilon)
        return Classification(spec.positive_count(), "spectrum", spec)
