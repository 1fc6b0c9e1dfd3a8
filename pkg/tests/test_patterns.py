import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kuramoto_landscape.errors import NotMemoryCompatible, PatternError
from kuramoto_landscape.patterns import (HALF, PI, ZERO, BinaryPattern, MemoryPair, TernaryPoint,
                                         all_ternary_points, canonicalize, coordinate_classes,
                                         epsilon_hat, epsilon_star, from_phase, is_canonical,
                                         memory_compatible_points, memory_shape, midpoints,
                                         partition_eta, partition_memories, partition_ternary,
                                         random_pair, to_phase)

from conftest import MIDPOINT


def P(text):
    return TernaryPoint.parse(text)


def test_partition_memories_reference_pair(pair):
    part = partition_memories(pair)
    # 0-based: I1={1,2,3,6}, I2={4,5} when counting from 1
    assert part.i1 == frozenset({0, 1, 2, 5})
    assert part.i2 == frozenset({3, 4})


def test_partition_memories_small_pairs():
    part = partition_memories(MemoryPair.from_lists([1, -1], [1, 1]))
    assert (part.i1, part.i2) == ({0}, {1})
    part = partition_memories(MemoryPair.from_lists([1, 1, -1, -1], [1, -1, 1, -1]))
    assert (part.i1, part.i2) == ({0, 3}, {1, 2})


@pytest.mark.parametrize("xi2", [(1, 1, -1), (-1, -1, 1)])
def test_pair_rejects_equal_or_opposite(xi2):
    with pytest.raises(PatternError, match="distinct"):
        MemoryPair.from_lists((1, 1, -1), xi2)


def test_pattern_validation():
    with pytest.raises(PatternError):
        BinaryPattern((1, 0, -1))
    with pytest.raises(PatternError):
        BinaryPattern((1,))
    with pytest.raises(PatternError):
        TernaryPoint((0, 3))
    with pytest.raises(PatternError):
        MemoryPair.from_lists((1, 1), (1, -1, 1))


def test_partition_eta_examples(pair):
    e = partition_eta(pair, pair.xi1)
    assert (e.i11, e.i12, e.i21, e.i22) == (pair.partition.i1, frozenset(), pair.partition.i2, frozenset())
    assert partition_eta(pair, BinaryPattern((1, 1, 1, 1, -1, -1))).sizes == (4, 0, 1, 1)
    e = partition_eta(pair, -pair.xi2)
    assert (e.i11, e.i12, e.i21, e.i22) == (frozenset(), pair.partition.i1, pair.partition.i2, frozenset())


def test_partition_ternary_examples(pair):
    sp = partition_ternary(pair, MIDPOINT)
    assert (sp.s1, sp.s2, sp.s3, sp.s4) == ({0, 1, 2, 5}, set(), set(), {3, 4})
    sp = partition_ternary(pair, MIDPOINT.reflect())
    assert (sp.s1, sp.s2, sp.s3, sp.s4) == (set(), {0, 1, 2, 5}, set(), {3, 4})
    with pytest.raises(NotMemoryCompatible):
        partition_ternary(pair, P("000000"))


def test_partition_ternary_mid2_uses_swapped_pair(pair):
    point = P("hhh00h")
    assert memory_shape(pair, point) == "mid2"
    sp = partition_ternary(pair, point, shape="mid2")
    assert sum(sp.sizes) == pair.n


def test_coordinate_classes():
    assert coordinate_classes(TernaryPoint((ZERO, HALF, PI))) == ({0}, {2}, {1})
    x0, xpi, xh = coordinate_classes(MIDPOINT)
    assert (x0, xh, xpi) == ({0, 1, 2}, {3, 4}, {5})
    assert coordinate_classes(P("0000")) == ({0, 1, 2, 3}, set(), set())


def test_epsilon_thresholds(pair):
    assert epsilon_star(pair.partition) == pytest.approx(1 / 3)
    assert epsilon_hat(pair.partition) == pytest.approx(1.0)
    orth = MemoryPair.from_lists([1, 1, -1, -1], [1, -1, 1, -1])
    assert epsilon_star(orth.partition) == 0.5
    assert epsilon_hat(orth.partition) == math.inf
    five = MemoryPair.from_lists([1, 1, 1, 1, 1, 1], [1, 1, 1, 1, 1, -1])
    assert epsilon_star(five.partition) == pytest.approx(1 / 6)
    assert epsilon_hat(five.partition) == pytest.approx(1 / 4)


def test_midpoints_reference_pair(pair):
    mids = midpoints(pair)
    assert len(mids) == 4
    assert P("000hhp") in mids and P("ppphh0") in mids


def test_midpoints_n2():
    mids = midpoints(MemoryPair.from_lists([1, -1], [1, 1]))
    assert set(mids) == {P("0h"), P("ph"), P("h0"), P("hp")}


def test_canonicalize_examples():
    assert canonicalize(P("pp0")) == P("00p")
    assert canonicalize(P("0hp")) == P("0hp")
    assert is_canonical(P("0hp")) and not is_canonical(P("pp0"))


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=2, max_size=10))
def test_canonicalize_idempotent_and_reflection_invariant(trits):
    p = TernaryPoint(tuple(trits))
    c = canonicalize(p)
    assert canonicalize(c) == c
    assert canonicalize(p.reflect()) == c


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=2, max_size=10))
def test_phase_round_trip(trits):
    p = TernaryPoint(tuple(trits))
    assert from_phase(to_phase(p)) == p
    assert TernaryPoint.from_index(p.index, len(p)) == p


def test_to_phase_values():
    assert np.array_equal(to_phase(TernaryPoint((0, 1, 2))), [0.0, math.pi / 2, math.pi])
    eta = BinaryPattern((1, -1, 1))
    assert np.allclose(to_phase(eta), np.arccos(eta.array))


def test_parse_formats():
    assert P("0,h,p") == P("0 pi/2 pi") == P("012") == TernaryPoint((0, 1, 2))
    with pytest.raises(PatternError):
        P("0x1")


def test_memory_compatible_counts(pair):
    points = memory_compatible_points(pair)
    assert len(points) == 20
    shapes = [memory_shape(pair, p) for p in points]
    assert shapes.count("mid1") == 16 and shapes.count("mid2") == 4
    lattice = [memory_shape(pair, p) for p in all_ternary_points(6)]
    assert lattice.count("mid1") == 16 and lattice.count("mid2") == 4
    assert memory_shape(pair, P("hhhhhh")) == "no"


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_partition_properties(n, seed):
    rng = np.random.default_rng(seed)
    pair = random_pair(rng, n)
    part = pair.partition
    assert part.i1 | part.i2 == set(range(n)) and not part.i1 & part.i2
    assert part.i1 and part.i2
    assert 0 < epsilon_star(part) <= 0.5
    eta = BinaryPattern(tuple(rng.choice([-1, 1], size=n).tolist()))
    if not pair.is_memorized(eta):
        a, b, c, d = partition_eta(pair, eta).sizes
        assert not (min(a, b) == 0 and min(c, d) == 0)


def test_random_pair_i1_size(rng):
    for n in range(3, 9):
        for k in range(1, n):
            assert len(random_pair(rng, n, k).partition.i1) == k
    with pytest.raises(PatternError):
        random_pair(rng, 5, 5)
