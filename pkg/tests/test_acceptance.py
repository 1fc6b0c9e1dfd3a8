"""One test per acceptance criterion; each prints a PASS/FAIL line."""
import math
import time
from collections import Counter

import numpy as np

from kuramoto_landscape.dynamics import (IntegrationConfig, corrupted_memory, integrate_many,
                                         retrieve_many, unstable_manifold)
from kuramoto_landscape.eigen import batch_eigenvalues, default_zero_tol, morse_classify
from kuramoto_landscape.errors import BoundaryCase
from kuramoto_landscape.landscape import census
from kuramoto_landscape.model import ModelConfig, energy, jacobian, velocity
from kuramoto_landscape.patterns import (BinaryPattern, MemoryPair, all_binary_patterns,
                                         epsilon_hat, epsilon_star, memory_compatible_points,
                                         midpoints, random_pair, to_phase)
from kuramoto_landscape.spectra import (binary_spectrum_analytic, is_index1_ternary,
                                        memorized_spectrum, ternary_spectrum_analytic)

from conftest import MIDPOINT, record_criterion

SEED = 20240601


def numeric_spectra(cfg, points):
    jacs = jacobian(cfg, np.array([to_phase(p) for p in points]))
    return batch_eigenvalues(jacs), jacs


def analytic_binary(pair, eta, eps):
    if pair.is_memorized(eta):
        return memorized_spectrum(pair, eps).values()
    return binary_spectrum_analytic(pair, eta, eps).values()


def worst_binary_error(pair, eps):
    etas = list(all_binary_patterns(pair.n))
    eigs, _ = numeric_spectra(ModelConfig(pair, eps), etas)
    return max(np.abs(analytic_binary(pair, e, eps) - lam).max() for e, lam in zip(etas, eigs))


def worst_ternary_error(pair, eps):
    points = memory_compatible_points(pair)
    eigs, _ = numeric_spectra(ModelConfig(pair, eps), points)
    return max(np.abs(ternary_spectrum_analytic(pair, p, eps).values() - lam).max()
               for p, lam in zip(points, eigs))


def away_from_boundaries(rng, pair, lo, hi, margin=1e-3):
    """Uniform epsilon in (lo, hi) that avoids eps*, eps_hat and every k/N."""
    part = pair.partition
    marks = [epsilon_star(part), epsilon_hat(part)] + [k / pair.n for k in range(1, pair.n + 1)]
    while True:
        eps = float(rng.uniform(lo, hi))
        if all(abs(eps - m) > margin for m in marks if math.isfinite(m)):
            return eps


# 1 ------------------------------------------------------------------------------------

def test_criterion_1_census_counts(cfg):
    t0 = time.perf_counter()
    c = census(cfg, workers=1)
    elapsed = time.perf_counter() - t0
    tally = Counter((r.family, r.morse_index) for r in c.critical)
    expected = {("Binary", 0): 4, ("Binary", 1): 32, ("Binary", 2): 28,
                ("Mid1", 1): 2, ("Mid1", 2): 14, ("Mid2", 2): 2, ("Mid2", 3): 2,
                ("Other", 1): 1, ("Other", 3): 18, ("Other", 4): 12}
    ok = (len(c.records) == 729 and c.critical_count == 115 and c.noncritical_count == 614
          and tally == expected and elapsed < 5.0)
    record_criterion(1, ok, f"critical={c.critical_count} noncritical={c.noncritical_count} "
                            f"families match={tally == expected} runtime={elapsed:.2f}s")
    assert ok


# 2 ------------------------------------------------------------------------------------

def test_criterion_2_energy_table(ref_census):
    table = {0: {-3.7833: 4},
             1: {-3.3833: 2, -3.1167: 4, -1.7833: 17, -1.1167: 12},
             2: {-1.3833: 10, -1.1167: 16, -0.7167: 6, -0.4500: 12},
             3: {-0.7167: 20},
             4: {-0.0500: 12}}
    found = {k: Counter() for k in table}
    unmatched = []
    for r in ref_census.critical:
        levels = table.get(r.morse_index, {})
        hit = [v for v in levels if abs(r.energy - v) <= 5e-5]
        if len(hit) == 1:
            found[r.morse_index][hit[0]] += 1
        else:
            unmatched.append(r.point)
    ok = not unmatched and all(dict(found[k]) == table[k] for k in table)
    record_criterion(2, ok, f"energy levels within 5e-5, unmatched points={len(unmatched)}")
    assert ok


# 3 ------------------------------------------------------------------------------------

def test_criterion_3_barriers(cfg, ref_graph):
    mid = unstable_manifold(cfg, MIDPOINT)
    mid_ok = ({mid.plus.kind.memory, mid.minus.kind.memory} == {1, 2}
              and abs(mid.barrier_plus - 0.4) <= 1e-3 and abs(mid.barrier_minus - 0.4) <= 1e-3)
    links = ref_graph.connecting_saddles()
    top_energy = max(node.energy for node, _ in links)
    top = [b for node, b in links if abs(node.energy - top_energy) < 1e-9]
    top_ok = (abs(top_energy + 1.1167) <= 5e-5 and bool(top)
              and all(abs(b - 2.6666) <= 1e-3 for b in top))
    ok = mid_ok and top_ok
    record_criterion(3, ok, f"midpoint dV=({mid.barrier_plus:.4f}, {mid.barrier_minus:.4f}) "
                            f"to {mid.plus.kind.value}/{mid.minus.kind.value}; "
                            f"{len(top)} top saddles at {top_energy:.4f} with dV={sorted(set(round(b, 4) for b in top))}")
    assert ok


# 4 ------------------------------------------------------------------------------------

def test_criterion_4_oracle_equivalence(pair):
    worst_a = max(worst_binary_error(pair, eps) for eps in (0.1, 0.3, 0.45))
    n_compatible = len(memory_compatible_points(pair))
    worst_b = worst_ternary_error(pair, 0.3)
    rng = np.random.default_rng(SEED)
    worst_c = 0.0
    for _ in range(200):
        rp = random_pair(rng, int(rng.integers(4, 11)))
        eps = away_from_boundaries(rng, rp, 0.0, 1.0)
        worst_c = max(worst_c, worst_binary_error(rp, eps), worst_ternary_error(rp, eps))
    ok = max(worst_a, worst_b, worst_c) <= 1e-10 and n_compatible == 20
    record_criterion(4, ok, f"max |analytic - numeric|: binary {worst_a:.1e}, "
                            f"{n_compatible} memory-compatible {worst_b:.1e}, 200 random pairs {worst_c:.1e}")
    assert ok


# 5 ------------------------------------------------------------------------------------

def stable_binary(cfg):
    etas = list(all_binary_patterns(cfg.n))
    eigs, jacs = numeric_spectra(cfg, etas)
    return {e for e, lam, j in zip(etas, eigs, jacs) if morse_classify(lam, default_zero_tol(j)).stable}


def test_criterion_5_stability_regimes():
    rng = np.random.default_rng(SEED + 5)
    bad = []
    for k in range(50):
        n = int(rng.integers(4, 11))
        rp = random_pair(rng, n, int(rng.integers(2, n - 1)))
        estar = epsilon_star(rp.partition)
        memories = set(rp.memorized())
        low = away_from_boundaries(rng, rp, 0.0, estar)
        high = away_from_boundaries(rng, rp, estar, 1.0)
        if stable_binary(ModelConfig(rp, low)) != memories:
            bad.append(f"pair {k} eps={low:.4f}")
        above = stable_binary(ModelConfig(rp, high))
        if not memories < above:
            bad.append(f"pair {k} eps={high:.4f}")
    ok = not bad
    record_criterion(5, ok, f"50 pairs, regime violations: {bad or 'none'}")
    assert ok


# 6 ------------------------------------------------------------------------------------

def test_criterion_6_orthogonal_memories():
    rng = np.random.default_rng(SEED + 6)
    worst, flags = 0.0, []
    for k in range(20):
        n = int(rng.choice([2, 4, 6, 8, 10, 12]))
        rp = random_pair(rng, n, n // 2)
        assert rp.is_orthogonal()
        for eps in (-0.2, 0.0, 0.3):
            ref = np.sort([-1 - 2 * eps] * (n - 2) + [-2 * eps, 0.0])
            eigs, jacs = numeric_spectra(ModelConfig(rp, eps), [rp.xi1, rp.xi2])
            for lam, j in zip(eigs, jacs):
                worst = max(worst, float(np.abs(lam - ref).max()))
                rep = morse_classify(lam, default_zero_tol(j))
                if eps > 0 and not rep.stable:
                    flags.append(f"pair {k} not stable at eps={eps}")
                if eps == 0 and not rep.degenerate:
                    flags.append(f"pair {k} not degenerate at eps=0")
    ok = worst <= 1e-10 and not flags
    record_criterion(6, ok, f"20 orthogonal pairs, max spectrum error {worst:.1e}, flags: {flags or 'none'}")
    assert ok


# 7 ------------------------------------------------------------------------------------

def test_criterion_7_gradient_flow(cfg):
    rng = np.random.default_rng(SEED + 7)
    h = 1e-5
    worst_grad = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 11))
        model = ModelConfig(random_pair(rng, n), float(rng.uniform(-1, 1)))
        phi = rng.uniform(-math.pi, math.pi, n)
        grad = np.array([(energy(model, phi + h * e) - energy(model, phi - h * e)) / (2 * h)
                         for e in np.eye(n)])
        worst_grad = max(worst_grad, float(np.abs(velocity(model, phi) + grad).max()))
    starts = rng.uniform(-math.pi, math.pi, size=(30, 6))
    trajs = integrate_many(cfg, starts, IntegrationConfig(trace_every=0))
    drift = max(t.phase_sum_drift for t in trajs)
    monotone = all(t.energy_monotone for t in trajs)
    converged = all(t.converged for t in trajs)
    ok = worst_grad <= 1e-6 and drift < 1e-8 and monotone and converged
    record_criterion(7, ok, f"max |f + grad V| {worst_grad:.1e} over 100 states; 30 full trajectories: "
                            f"drift {drift:.1e}, monotone={monotone}")
    assert ok


# 8 ------------------------------------------------------------------------------------

def constant_pair(rng, n, which):
    """Pair whose xi1 is constant on I2 (which=1) or on I1 (which=2)."""
    i1 = int(rng.integers(1, n))
    xi1 = rng.choice([-1, 1], size=n)
    region = np.arange(i1, n) if which == 1 else np.arange(i1)
    xi1[region] = rng.choice([-1, 1])
    xi2 = xi1.copy()
    xi2[i1:] *= -1
    perm = rng.permutation(n)
    return MemoryPair.from_lists(xi1[perm].tolist(), xi2[perm].tolist())


def predicted_index1(pair):
    xi1, part = pair.xi1.signs, pair.partition
    mids = midpoints(pair)
    out = set()
    if len({xi1[i] for i in part.i2}) == 1:
        out.update(mids[:2])
    if len({xi1[i] for i in part.i1}) == 1:
        out.update(mids[2:])
    return out


def test_criterion_8_ternary_index1():
    rng = np.random.default_rng(SEED + 8)
    mismatches, set_errors, with_conditions, points = [], [], 0, 0
    for k in range(100):
        n = int(rng.integers(3, 11))
        rp = constant_pair(rng, n, 1 + k % 2) if k % 3 == 0 else random_pair(rng, n)
        ehat = epsilon_hat(rp.partition)
        eps = away_from_boundaries(rng, rp, 0.0, min(ehat, 1.0))
        cfg = ModelConfig(rp, eps)
        compat = memory_compatible_points(rp)
        eigs, jacs = numeric_spectra(cfg, compat)
        found = set()
        for p, lam, j in zip(compat, eigs, jacs):
            points += 1
            num = morse_classify(lam, default_zero_tol(j))
            numeric_one = num.index == 1 and not num.degenerate
            try:
                test = is_index1_ternary(rp, p, eps)
            except BoundaryCase as exc:
                mismatches.append(f"pair {k} {p}: {exc}")
                continue
            if test != numeric_one:
                mismatches.append(f"pair {k} {p}")
            if numeric_one:
                found.add(p)
        expected = predicted_index1(rp)
        if expected:
            with_conditions += 1
        if found != expected:
            set_errors.append(f"pair {k}")
    ok = not mismatches and not set_errors and with_conditions > 0
    record_criterion(8, ok, f"{points} memory-compatible points on 100 pairs, test/numeric mismatches="
                            f"{len(mismatches)}; index-1 set = predicted midpoints on all pairs "
                            f"({with_conditions} with the constancy conditions)")
    assert ok


# 9 ------------------------------------------------------------------------------------

def test_criterion_9_retrieval(cfg, pair):
    # Flips are drawn from I1. Flipping an I2 slot makes the input equally close to
    # both memories, so no single target exists; that rate is reported separately.
    icfg = IntegrationConfig(trace_every=0)
    i1 = sorted(pair.partition.i1)
    inputs, targets, any_inputs, any_targets, any_flips = [], [], [], [], []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        mem = 1 + seed % 2
        inputs.append(corrupted_memory(pair, mem, i1[int(rng.integers(len(i1)))], 0.05, rng))
        targets.append(mem)
        rng = np.random.default_rng(seed)
        flip = int(rng.integers(pair.n))
        any_flips.append(flip)
        any_inputs.append(corrupted_memory(pair, mem, flip, 0.05, rng))
        any_targets.append(mem)
    hits = [r.kind.memory == m for r, m in zip(retrieve_many(cfg, inputs, icfg), targets)]
    any_hits = [r.kind.memory == m for r, m in zip(retrieve_many(cfg, any_inputs, icfg), any_targets)]
    failed = [s for s, h in enumerate(hits) if not h]
    any_failed = [s for s, h in enumerate(any_hits) if not h]
    in_i2 = all(any_flips[s] in pair.partition.i2 for s in any_failed)
    ok = sum(hits) >= 95
    record_criterion(9, ok, f"{sum(hits)}/100 single I1 flips + 0.05 jitter retrieve their memory "
                            f"(failed seeds {failed or 'none'}); flips anywhere: {sum(any_hits)}/100, "
                            f"failed seeds {any_failed}, all I2 flips={in_i2}")
    assert ok
