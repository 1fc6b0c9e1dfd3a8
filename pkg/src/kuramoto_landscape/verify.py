"""Invariant suite over random memory pairs, run by the ``verify`` subcommand."""
from __future__ import annotations

import math
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import IntegrationConfig, integrate_many
from .eigen import batch_eigenvalues, default_zero_tol, morse_classify
from .errors import BoundaryCase, LandscapeError
from .landscape import census, reflection_pairs_consistent, summarize
from .model import ModelConfig, energy, jacobian, velocity, velocity_direct
from .patterns import (MemoryPair, all_binary_patterns, epsilon_star, memory_compatible_points,
                       memory_shape, midpoints, random_pair, to_phase)
from .spectra import (binary_spectrum_analytic, is_index1_ternary, is_ternary_critical,
                      memorized_spectrum, memorized_spectrum_orthogonal, morse_index_binary,
                      ternary_spectrum_analytic)

SPECTRUM_TOL = 1e-10
GRADIENT_TOL = 1e-6
FD_STEP = 1e-5


@dataclass(frozen=True)
class CheckResult:
    name: str
    case: str
    passed: bool
    detail: str = ""


@dataclass
class VerifyReport:
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def add(self, name, case, failures):
        failures = list(failures)
        self.results.append(CheckResult(name, case, not failures, "; ".join(failures[:5])))

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": len(self.results),
                "failures": [{"check": r.name, "case": r.case, "detail": r.detail}
                             for r in self.failures]}


def numeric_gradient(cfg: ModelConfig, phi: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central-difference gradient of V."""
    grad = np.empty_like(phi)
    for i in range(len(phi)):
        e = np.zeros_like(phi)
        e[i] = h
        grad[i] = (energy(cfg, phi + e) - energy(cfg, phi - e)) / (2 * h)
    return grad


def check_gradient(cfg: ModelConfig, states) -> list[str]:
    out = []
    for phi in states:
        v = velocity(cfg, phi)
        err = np.abs(v + numeric_gradient(cfg, phi)).max()
        if err > GRADIENT_TOL:
            out.append(f"velocity vs -grad V differs by {err:.2e}")
        err = np.abs(v - velocity_direct(cfg, phi)).max()
        if err > 1e-12:
            out.append(f"fast vs direct velocity differ by {err:.2e}")
    return out


def check_jacobian(cfg: ModelConfig, states) -> list[str]:
    out = []
    for phi in states:
        jac = jacobian(cfg, phi)
        if np.abs(jac - jac.T).max() > 0:
            out.append("jacobian not symmetric")
        if np.abs(jac.sum(axis=1)).max() > 1e-12:
            out.append("jacobian rows do not sum to zero")
        fd = np.empty_like(jac)
        for j in range(len(phi)):
            e = np.zeros_like(phi)
            e[j] = FD_STEP
            fd[:, j] = (velocity(cfg, phi + e) - velocity(cfg, phi - e)) / (2 * FD_STEP)
        if np.abs(fd - jac).max() > GRADIENT_TOL:
            out.append(f"jacobian vs finite differences {np.abs(fd - jac).max():.2e}")
    return out


def _spectra(cfg: ModelConfig, phases) -> tuple[np.ndarray, np.ndarray]:
    jacs = jacobian(cfg, np.asarray(phases))
    return batch_eigenvalues(jacs), jacs


def check_binary_spectra(cfg: ModelConfig) -> list[str]:
    """Closed-form vs numeric spectra at every binary point, plus case-table indices."""
    pair, eps = cfg.pair, cfg.epsilon
    etas = list(all_binary_patterns(pair.n))
    eigs, jacs = _spectra(cfg, [to_phase(e) for e in etas])
    out = []
    for eta, lam, jac in zip(etas, eigs, jacs):
        if pair.is_memorized(eta):
            err = np.abs(memorized_spectrum(pair, eps).values() - lam).max()
            if err > SPECTRUM_TOL:
                out.append(f"{eta}: stored-pattern spectrum error {err:.2e}")
            continue
        ref = binary_spectrum_analytic(pair, eta, eps).values()
        err = np.abs(ref - lam).max()
        if err > SPECTRUM_TOL:
            out.append(f"{eta}: spectrum error {err:.2e}")
            continue
        try:
            cls = morse_index_binary(pair, eta, eps)
        except BoundaryCase:
            continue
        num = morse_classify(lam, default_zero_tol(jac)).index
        if cls.morse_index != num:
            out.append(f"{eta}: case {cls.case_tag} index {cls.morse_index} vs numeric {num}")
    return out


def stable_binary_patterns(cfg: ModelConfig) -> list:
    """Binary patterns whose numeric Jacobian has no positive and exactly one zero eigenvalue."""
    etas = list(all_binary_patterns(cfg.n))
    eigs, jacs = _spectra(cfg, [to_phase(e) for e in etas])
    return [eta for eta, lam, jac in zip(etas, eigs, jacs)
            if morse_classify(lam, default_zero_tol(jac)).stable]


def check_stability_regimes(pair: MemoryPair, eps_low: float, eps_high: float) -> list[str]:
    """Below eps* only the memories are stable; above it some other binary pattern is too."""
    i1, _ = pair.partition.sizes
    if not 1 < i1 < pair.n - 1:
        return []
    out = []
    stable = set(stable_binary_patterns(ModelConfig(pair, eps_low)))
    if stable != set(pair.memorized()):
        out.append(f"eps={eps_low:.4g}: stable set has {len(stable)} patterns, expected the 4 memories")
    stable = set(stable_binary_patterns(ModelConfig(pair, eps_high)))
    if not set(pair.memorized()) <= stable:
        out.append(f"eps={eps_high:.4g}: a memory is not stable")
    if not stable - set(pair.memorized()):
        out.append(f"eps={eps_high:.4g}: no stable non-memorized binary pattern")
    return out


def check_orthogonal(pair: MemoryPair, eps: float) -> list[str]:
    if not pair.is_orthogonal():
        return []
    cfg = ModelConfig(pair, eps)
    ref = memorized_spectrum_orthogonal(pair.n, 2, eps).values()
    eigs, jacs = _spectra(cfg, [to_phase(x) for x in (pair.xi1, pair.xi2)])
    out = []
    for lam, jac in zip(eigs, jacs):
        if np.abs(lam - ref).max() > SPECTRUM_TOL:
            out.append(f"eps={eps}: memorized spectrum error {np.abs(lam - ref).max():.2e}")
        rep = morse_classify(lam, default_zero_tol(jac))
        if eps > 0 and not rep.stable:
            out.append(f"eps={eps}: memory not stable")
        if eps == 0 and not rep.degenerate:
            out.append("eps=0: memory not flagged degenerate")
    return out


def expected_ternary_index1(pair: MemoryPair) -> set:
    """Midpoints that the constancy conditions predict to be index-1 memory-compatible saddles."""
    part = pair.partition
    xi1 = pair.xi1.signs
    mids = midpoints(pair)
    expected = set()
    if len({xi1[i] for i in part.i2}) == 1:
        expected.update(mids[:2])
    if len({xi1[i] for i in part.i1}) == 1:
        expected.update(mids[2:])
    return expected


def check_memory_compatible(cfg: ModelConfig) -> list[str]:
    pair, eps = cfg.pair, cfg.epsilon
    points = memory_compatible_points(pair)
    phases = [to_phase(p) for p in points]
    eigs, jacs = _spectra(cfg, phases)
    out = []
    found = set()
    in_range = True
    for p, phi, lam, jac in zip(points, phases, eigs, jacs):
        if not is_ternary_critical(pair, p) or np.abs(velocity(cfg, phi)).max() >= 1e-12:
            out.append(f"{p}: memory-compatible point not critical")
        ref = ternary_spectrum_analytic(pair, p, eps).values()
        if np.abs(ref - lam).max() > SPECTRUM_TOL:
            out.append(f"{p}: spectrum error {np.abs(ref - lam).max():.2e}")
        num = morse_classify(lam, default_zero_tol(jac))
        if num.index == 1 and not num.degenerate:
            found.add(p)
        try:
            test = is_index1_ternary(pair, p, eps)
        except BoundaryCase:
            in_range = False
            continue
        if test != (num.index == 1 and not num.degenerate):
            out.append(f"{p} ({memory_shape(pair, p)}): index-1 test {test}, numeric index {num.index}")
    if in_range and found != expected_ternary_index1(pair):
        out.append(f"index-1 set {sorted(map(str, found))} != predicted midpoints")
    return out


def check_flow(cfg: ModelConfig, starts, icfg: IntegrationConfig) -> list[str]:
    out = []
    for traj in integrate_many(cfg, starts, icfg):
        if traj.phase_sum_drift >= 1e-8:
            out.append(f"phase-sum drift {traj.phase_sum_drift:.2e}")
        if not traj.energy_monotone:
            out.append(f"energy rose by {traj.max_energy_increase:.2e}")
    return out


def check_census(cfg: ModelConfig) -> list[str]:
    from .export import read_census_jsonl, write_census_jsonl

    c = census(cfg)
    out = reflection_pairs_consistent(c)
    if sum(r.count for r in c.summary) != 3 ** cfg.n:
        out.append("summary counts do not add up to 3^N")
    for r in c.records:
        if (r.morse_index is not None) != (r.critical and not r.degenerate):
            out.append(f"{r.point}: index presence inconsistent")
        if (r.family == "Binary") != r.point.is_binary:
            out.append(f"{r.point}: family tag inconsistent")
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "census.jsonl"
        write_census_jsonl(c, path)
        again = read_census_jsonl(path)
    if summarize(again.records) != c.summary or again.records != c.records:
        out.append("JSONL round trip changed the census")
    return out


def _safe(fn, *args) -> list[str]:
    try:
        return fn(*args)
    except LandscapeError as exc:
        return [f"{type(exc).__name__}: {exc}"]


def _interior(rng, lo: float, hi: float) -> float:
    return lo + (hi - lo) * rng.uniform(0.05, 0.95)


def run_suite(n_pairs: int = 50, max_n: int = 10, seed: int = 0, census_max_n: int = 6,
              icfg: IntegrationConfig = IntegrationConfig(t_max=20.0, trace_every=0)) -> VerifyReport:
    """Run every invariant on ``n_pairs`` random pairs with 4 <= N <= max_n."""
    rng = np.random.default_rng(seed)
    report = VerifyReport()
    for k in range(n_pairs):
        n = int(rng.integers(4, max_n + 1))
        i1 = int(rng.integers(2, n - 1)) if n > 4 or rng.random() < 0.5 else 2
        pair = random_pair(rng, n, i1)
        estar = epsilon_star(pair.partition)
        eps = _interior(rng, 0.0, estar)
        eps_high = _interior(rng, estar, 1.0)
        case = f"pair {k} N={n} |I1|={i1} eps={eps:.4g}"
        cfg = ModelConfig(pair, eps)
        states = rng.uniform(-math.pi, math.pi, size=(2, n))
        report.add("gradient", case, _safe(check_gradient, cfg, states))
        report.add("jacobian", case, _safe(check_jacobian, cfg, states))
        report.add("binary-spectra", case, _safe(check_binary_spectra, cfg))
        report.add("binary-spectra-high", case, _safe(check_binary_spectra, ModelConfig(pair, eps_high)))
        report.add("stability-regimes", case, _safe(check_stability_regimes, pair, eps, eps_high))
        report.add("memory-compatible", case, _safe(check_memory_compatible, cfg))
        for e in (-0.2, 0.0, 0.3):
            report.add("orthogonal", f"{case} eps'={e}", _safe(check_orthogonal, pair, e))
        starts = to_phase(pair.xi1) + rng.uniform(-0.5, 0.5, size=(2, n))
        report.add("flow", case, _safe(check_flow, cfg, starts, icfg))
        if n <= census_max_n:
            report.add("census", case, _safe(check_census, cfg))
    return report
