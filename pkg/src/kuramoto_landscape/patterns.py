"""Binary patterns, ternary lattice points and the index partitions built from two memories.

Indices are 0-based everywhere in this module; reports convert to 1-based.
Trits are encoded as integers: 0 -> phase 0, 1 -> phase pi/2, 2 -> phase pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import NotMemoryCompatible, PatternError

ZERO, HALF, PI = 0, 1, 2
TRIT_PHASES = (0.0, math.pi / 2, math.pi)
_TRIT_SYMBOLS = ("0", "h", "p")


@dataclass(frozen=True)
class BinaryPattern:
    signs: tuple[int, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if len(signs) < 2:
            raise PatternError(f"pattern length must be >= 2, got {len(signs)}")
        if any(s not in (-1, 1) for s in signs):
            raise PatternError(f"pattern entries must be -1 or +1, got {signs}")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def from_phases(cls, phases) -> "BinaryPattern":
        return cls(tuple(1 if c > 0 else -1 for c in np.cos(phases)))

    def __len__(self):
        return len(self.signs)

    def __neg__(self):
        return BinaryPattern(tuple(-s for s in self.signs))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.signs, dtype=float)

    def to_point(self) -> "TernaryPoint":
        """Lattice point arccos(eta): +1 -> 0, -1 -> pi."""
        return TernaryPoint(tuple(ZERO if s == 1 else PI for s in self.signs))

    def __str__(self):
        return "(" + ",".join(f"{s:+d}" for s in self.signs) + ")"


@dataclass(frozen=True)
class TernaryPoint:
    trits: tuple[int, ...]

    def __post_init__(self):
        trits = tuple(int(t) for t in self.trits)
        if not trits:
            raise PatternError("empty ternary point")
        if any(t not in (ZERO, HALF, PI) for t in trits):
            raise PatternError(f"trits must be 0, 1 or 2, got {trits}")
        object.__setattr__(self, "trits", trits)

    @classmethod
    def from_index(cls, index: int, n: int) -> "TernaryPoint":
        """Inverse of :attr:`index`; the first coordinate is the most significant digit."""
        if not 0 <= index < 3**n:
            raise PatternError(f"index {index} out of range for n={n}")
        digits = []
        for _ in range(n):
            index, r = divmod(index, 3)
            digits.append(r)
        return cls(tuple(reversed(digits)))

    @classmethod
    def parse(cls, text: str) -> "TernaryPoint":
        """Parse ``"000112"``, ``"0,0,h,p"`` or ``"0 pi/2 pi"`` style strings."""
        aliases = {"0": ZERO, "1": HALF, "2": PI, "h": HALF, "p": PI,
                   "pi/2": HALF, "pi": PI}
        text = text.strip().lower()
        if "," in text or " " in text:
            tokens = [t for t in text.replace(",", " ").split() if t]
        else:
            tokens = list(text)
        try:
            return cls(tuple(aliases[t] for t in tokens))
        except KeyError as exc:
            raise PatternError(f"cannot parse ternary point {text!r}") from exc

    def __len__(self):
        return len(self.trits)

    @property
    def index(self) -> int:
        value = 0
        for t in self.trits:
            value = 3 * value + t
        return value

    @property
    def is_binary(self) -> bool:
        return HALF not in self.trits

    def reflect(self) -> "TernaryPoint":
        """The image under phi -> pi - phi."""
        return TernaryPoint(tuple(2 - t for t in self.trits))

    def to_binary(self) -> BinaryPattern:
        if not self.is_binary:
            raise PatternError(f"{self} has a pi/2 entry")
        return BinaryPattern(tuple(1 if t == ZERO else -1 for t in self.trits))

    def __str__(self):
        return "".join(_TRIT_SYMBOLS[t] for t in self.trits)

    def label(self) -> str:
        names = ("0", "pi/2", "pi")
        return "(" + ",".join(names[t] for t in self.trits) + ")"


def to_phase(point: TernaryPoint | BinaryPattern) -> np.ndarray:
    """Exact phase vector of a lattice point (binary patterns embed as arccos)."""
    if isinstance(point, BinaryPattern):
        point = point.to_point()
    return np.array([TRIT_PHASES[t] for t in point.trits])


def from_phase(phases, atol: float = 1e-9) -> TernaryPoint:
    """Round a phase vector that sits on the lattice back to its trits."""
    phases = np.asarray(phases, dtype=float)
    trits = []
    for phi in phases:
        wrapped = math.remainder(phi, 2 * math.pi)
        for t, target in enumerate(TRIT_PHASES):
            if abs(wrapped - target) <= atol:
                trits.append(t)
                break
        else:
            raise PatternError(f"phase {phi} is not on the {{0, pi/2, pi}} lattice")
    return TernaryPoint(tuple(trits))


def canonicalize(point: TernaryPoint) -> TernaryPoint:
    """Lexicographically smaller of ``point`` and its reflection."""
    return min(point, point.reflect(), key=lambda p: p.trits)


def is_canonical(point: TernaryPoint) -> bool:
    return canonicalize(point) == point


def coordinate_classes(point: TernaryPoint) -> tuple[frozenset, frozenset, frozenset]:
    """Index sets (X0, X_pi, X_half) of coordinates equal to 0, pi, pi/2."""
    x0 = frozenset(i for i, t in enumerate(point.trits) if t == ZERO)
    xpi = frozenset(i for i, t in enumerate(point.trits) if t == PI)
    xhalf = frozenset(i for i, t in enumerate(point.trits) if t == HALF)
    return x0, xpi, xhalf


@dataclass(frozen=True)
class IndexPartition:
    """``i1``: coordinates where the memories agree; ``i2``: where they differ."""

    i1: frozenset
    i2: frozenset

    @property
    def n(self):
        return len(self.i1) + len(self.i2)

    @property
    def sizes(self):
        return len(self.i1), len(self.i2)


@dataclass(frozen=True)
class EtaPartition:
    i11: frozenset
    i12: frozenset
    i21: frozenset
    i22: frozenset

    @property
    def sizes(self) -> tuple[int, int, int, int]:
        return len(self.i11), len(self.i12), len(self.i21), len(self.i22)


@dataclass(frozen=True)
class SPartition:
    s1: frozenset
    s2: frozenset
    s3: frozenset
    s4: frozenset

    @property
    def sizes(self) -> tuple[int, int, int, int]:
        return len(self.s1), len(self.s2), len(self.s3), len(self.s4)


@dataclass(frozen=True)
class MemoryPair:
    xi1: BinaryPattern
    xi2: BinaryPattern

    def __post_init__(self):
        if not isinstance(self.xi1, BinaryPattern):
            object.__setattr__(self, "xi1", BinaryPattern(tuple(self.xi1)))
        if not isinstance(self.xi2, BinaryPattern):
            object.__setattr__(self, "xi2", BinaryPattern(tuple(self.xi2)))
        if len(self.xi1) != len(self.xi2):
            raise PatternError("memories must have equal length")
        if self.xi1 == self.xi2 or self.xi1 == -self.xi2:
            raise PatternError("memories must be distinct: xi1 != xi2 and xi1 != -xi2")

    @classmethod
    def from_lists(cls, xi1: Sequence[int], xi2: Sequence[int]) -> "MemoryPair":
        return cls(BinaryPattern(tuple(xi1)), BinaryPattern(tuple(xi2)))

    @property
    def n(self) -> int:
        return len(self.xi1)

    @cached_property
    def partition(self) -> IndexPartition:
        return partition_memories(self)

    def swapped(self) -> "MemoryPair":
        """The pair (xi1, -xi2); exchanges the roles of I1 and I2."""
        return MemoryPair(self.xi1, -self.xi2)

    def memorized(self) -> tuple[BinaryPattern, ...]:
        return (self.xi1, -self.xi1, self.xi2, -self.xi2)

    def is_memorized(self, eta: BinaryPattern) -> bool:
        return eta in self.memorized()

    def is_orthogonal(self) -> bool:
        return int(self.xi1.array @ self.xi2.array) == 0


def partition_memories(pair: MemoryPair) -> IndexPartition:
    i1 = frozenset(i for i, (a, b) in enumerate(zip(pair.xi1.signs, pair.xi2.signs)) if a == b)
    i2 = frozenset(range(pair.n)) - i1
    if not i1 or not i2:
        raise PatternError("memories must be distinct")
    return IndexPartition(i1, i2)


def partition_eta(pair: MemoryPair, eta: BinaryPattern) -> EtaPartition:
    if len(eta) != pair.n:
        raise PatternError(f"pattern length {len(eta)} != {pair.n}")
    part = pair.partition
    xi1, e = pair.xi1.signs, eta.signs
    return EtaPartition(
        i11=frozenset(j for j in part.i1 if xi1[j] == e[j]),
        i12=frozenset(j for j in part.i1 if xi1[j] != e[j]),
        i21=frozenset(j for j in part.i2 if xi1[j] == e[j]),
        i22=frozenset(j for j in part.i2 if xi1[j] != e[j]),
    )


def memory_shape(pair: MemoryPair, point: TernaryPoint) -> str:
    """``"mid1"`` if pi/2 sits exactly on I2, ``"mid2"`` if exactly on I1, else ``"no"``."""
    if len(point) != pair.n:
        raise PatternError(f"point length {len(point)} != {pair.n}")
    half = frozenset(i for i, t in enumerate(point.trits) if t == HALF)
    part = pair.partition
    if half == part.i2:
        return "mid1"
    if half == part.i1:
        return "mid2"
    return "no"


def partition_ternary(pair: MemoryPair, point: TernaryPoint, shape: str = "mid1") -> SPartition:
    """S1..S4 for a memory-compatible point.

    For ``shape="mid2"`` the partition is taken with respect to the swapped
    pair (xi1, -xi2), in which the point has the mid1 shape.
    """
    if shape == "mid2":
        pair = pair.swapped()
    elif shape != "mid1":
        raise ValueError(f"unknown shape {shape!r}")
    if memory_shape(pair, point) != "mid1":
        raise NotMemoryCompatible(f"{point.label()} does not have the {shape} shape")
    part = pair.partition
    xi1, trits = pair.xi1.signs, point.trits
    # on I1: S1 where cos(phi) == xi1, S2 where cos(phi) == -xi1
    s1 = frozenset(i for i in part.i1 if (trits[i] == ZERO) == (xi1[i] == 1))
    return SPartition(
        s1=s1,
        s2=part.i1 - s1,
        s3=frozenset(i for i in part.i2 if xi1[i] == 1),
        s4=frozenset(i for i in part.i2 if xi1[i] == -1),
    )


def epsilon_star(partition: IndexPartition) -> float:
    """Critical second-order coupling strength min(|I1|, |I2|) / N."""
    return min(partition.sizes) / partition.n


def epsilon_hat(partition: IndexPartition) -> float:
    """Upper coupling bound for the ternary index-1 result; ``inf`` for orthogonal memories."""
    a, b = partition.sizes
    if a == b:
        return math.inf
    return min(a, b) / abs(a - b)


def midpoints(pair: MemoryPair) -> list[TernaryPoint]:
    """Midpoints of arccos(xi1) with arccos(xi2) and arccos(-xi2), plus their reflections."""
    out = []
    for other in (pair.xi2, -pair.xi2):
        mid = []
        for a, b in zip(pair.xi1.signs, other.signs):
            if a == b:
                mid.append(ZERO if a == 1 else PI)
            else:
                mid.append(HALF)
        point = TernaryPoint(tuple(mid))
        out.extend([point, point.reflect()])
    return out


def all_binary_patterns(n: int) -> Iterable[BinaryPattern]:
    """All 2^n patterns in lattice order (+1 before -1)."""
    for k in range(2**n):
        yield BinaryPattern(tuple(-1 if (k >> (n - 1 - i)) & 1 else 1 for i in range(n)))


def all_ternary_points(n: int) -> Iterable[TernaryPoint]:
    for k in range(3**n):
        yield TernaryPoint.from_index(k, n)


def memory_compatible_points(pair: MemoryPair) -> list[TernaryPoint]:
    """All 2^|I1| mid1 points followed by all 2^|I2| mid2 points."""
    part = pair.partition
    out = []
    for half_on, free in ((part.i2, sorted(part.i1)), (part.i1, sorted(part.i2))):
        for k in range(2 ** len(free)):
            trits = [HALF] * pair.n
            for bit, i in enumerate(free):
                trits[i] = PI if (k >> bit) & 1 else ZERO
            out.append(TernaryPoint(tuple(trits)))
    return out


def random_pair(rng: np.random.Generator, n: int, i1_size: int | None = None) -> MemoryPair:
    """Random distinct pair; ``i1_size`` fixes the number of agreeing coordinates."""
    if i1_size is None:
        i1_size = int(rng.integers(1, n))
    if not 1 <= i1_size <= n - 1:
        raise PatternError(f"i1_size must be in [1, {n - 1}]")
    xi1 = rng.choice([-1, 1], size=n)
    flip = np.ones(n, dtype=int)
    flip[rng.permutation(n)[: n - i1_size]] = -1
    return MemoryPair.from_lists(xi1.tolist(), (xi1 * flip).tolist())
