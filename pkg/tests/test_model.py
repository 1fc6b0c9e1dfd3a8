import math

import numpy as np
import pytest

from kuramoto_landscape.model import (ModelConfig, binary_energy, build_connection, energy,
                                      energy_direct, jacobian, velocity, velocity_direct)
from kuramoto_landscape.patterns import MemoryPair, all_binary_patterns, random_pair, to_phase
from kuramoto_landscape.verify import numeric_gradient

from conftest import MIDPOINT


def test_connection_matrix(pair):
    c = build_connection(pair)
    assert np.array_equal(c, c.T)
    assert np.all(np.diag(c) == 2)
    assert c[0, 3] == 0
    assert set(np.unique(c)) <= {-2, 0, 2}
    assert np.array_equal(c, build_connection(MemoryPair(-pair.xi1, pair.xi2)))


def test_config_coupling_read_only(cfg):
    with pytest.raises(ValueError):
        cfg.coupling[0, 0] = 5.0


def test_velocity_vanishes_at_binary_points_and_midpoint(cfg):
    for eta in all_binary_patterns(6):
        assert np.abs(velocity(cfg, to_phase(eta))).max() < 1e-14
    assert np.abs(velocity(cfg, to_phase(MIDPOINT))).max() < 1e-14


def test_reference_pair_energies(cfg, pair):
    assert energy(cfg, to_phase(pair.xi1)) == pytest.approx(-3.7833, abs=5e-5)
    assert energy(cfg, to_phase(MIDPOINT)) == pytest.approx(-3.3833, abs=5e-5)
    assert binary_energy(cfg, pair.xi1) == pytest.approx(-(36 + 4) / 12 - 0.45, abs=1e-12)


def test_binary_energy_matches_energy_everywhere(cfg):
    for eta in all_binary_patterns(6):
        assert binary_energy(cfg, eta) == pytest.approx(energy(cfg, to_phase(eta)), abs=1e-12)
        assert binary_energy(cfg, eta) == binary_energy(cfg, -eta)


def test_binary_energy_orthogonal(rng):
    n, eps = 8, 0.2
    pair = random_pair(rng, n, n // 2)
    cfg = ModelConfig(pair, eps)
    assert binary_energy(cfg, pair.xi1) == pytest.approx(-n / 2 - n * eps / 4, abs=1e-12)


def test_fast_paths_match_direct(rng):
    for _ in range(20):
        n = int(rng.integers(2, 12))
        cfg = ModelConfig(random_pair(rng, n), float(rng.uniform(-1, 1)))
        phi = rng.uniform(-10, 10, size=(3, n))
        assert np.allclose(velocity(cfg, phi), velocity_direct(cfg, phi), atol=1e-13)
        assert np.allclose(energy(cfg, phi), energy_direct(cfg, phi), atol=1e-12)


def test_symmetries_of_velocity_and_energy(cfg, rng):
    for _ in range(50):
        phi = rng.uniform(-math.pi, math.pi, 6)
        d = rng.uniform(-5, 5)
        assert np.allclose(velocity(cfg, phi + d), velocity(cfg, phi), atol=1e-13)
        e = energy(cfg, phi)
        assert energy(cfg, phi + d) == pytest.approx(e, abs=1e-12)
        assert energy(cfg, -phi) == pytest.approx(e, abs=1e-12)
        assert energy(cfg, phi + 2 * math.pi * rng.integers(-3, 4, 6)) == pytest.approx(e, abs=1e-12)
        assert abs(velocity(cfg, phi).sum()) < 1e-12


def test_velocity_is_negative_gradient(rng):
    for _ in range(100):
        n = int(rng.integers(2, 10))
        cfg = ModelConfig(random_pair(rng, n), float(rng.uniform(-1, 1)))
        phi = rng.uniform(-math.pi, math.pi, n)
        assert np.abs(velocity(cfg, phi) + numeric_gradient(cfg, phi)).max() < 1e-6


def test_jacobian_properties(cfg, rng):
    h = 1e-5
    for _ in range(20):
        phi = rng.uniform(-math.pi, math.pi, 6)
        jac = jacobian(cfg, phi)
        assert np.abs(jac - jac.T).max() < 1e-14
        assert np.abs(jac @ np.ones(6)).max() < 1e-14
        hess = np.empty((6, 6))
        for j in range(6):
            e = np.zeros(6)
            e[j] = h
            hess[:, j] = -(numeric_gradient(cfg, phi + e) - numeric_gradient(cfg, phi - e)) / (2 * h)
        assert np.abs(jac - hess).max() < 1e-4  # nested differences lose about half the digits
        fd = np.column_stack([(velocity(cfg, phi + h * np.eye(6)[j]) - velocity(cfg, phi - h * np.eye(6)[j])) / (2 * h)
                              for j in range(6)])
        assert np.abs(jac - fd).max() < 1e-6


def test_jacobian_stack(cfg, rng):
    phi = rng.uniform(-3, 3, (4, 6))
    stacked = jacobian(cfg, phi)
    for k in range(4):
        assert np.array_equal(stacked[k], jacobian(cfg, phi[k]))


def test_rejects_bad_inputs(cfg):
    from kuramoto_landscape.errors import PatternError
    with pytest.raises(PatternError):
        velocity(cfg, np.zeros(5))
    with pytest.raises(PatternError):
        ModelConfig(cfg.pair, float("nan"))
