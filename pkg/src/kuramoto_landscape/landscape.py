"""Exhaustive census of the ternary lattice {0, pi/2, pi}^N and the saddle transition graph."""
from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .dynamics import IntegrationConfig, unstable_manifolds
from .eigen import batch_eigenvalues, default_zero_tol, morse_classify
from .errors import BoundaryCase, CensusCapExceeded, IntegrationError, OracleDisagreement
from .model import ModelConfig, jacobian, velocity_and_energy
from .patterns import (MemoryPair, TernaryPoint, is_canonical,
                       memory_shape, to_phase)
from .spectra import (binary_classification, binary_spectrum_analytic, is_ternary_critical,
                      morse_index_ternary)

DEFAULT_CAP = 14
CRITICAL_TOL = 1e-12
ORACLE_TOL = 1e-10
FAMILIES = ("Binary", "Mid1", "Mid2", "Other")
WORKERS_ENV = "KURAMOTO_LANDSCAPE_WORKERS"


@dataclass(frozen=True)
class CensusRecord:
    point: TernaryPoint
    canonical: bool
    critical: bool
    morse_index: Optional[int]
    degenerate: bool
    energy: float
    family: str
    branch: Optional[str] = None
    analytic: bool = False
    shift_equivalent_binary: Optional[TernaryPoint] = None

    @property
    def status(self) -> str:
        if not self.critical:
            return "noncritical"
        return "degenerate" if self.degenerate else "critical"


@dataclass(frozen=True)
class SummaryRow:
    status: str
    family: str
    morse_index: Optional[int]
    energy: Optional[float]
    count: int


@dataclass(frozen=True)
class Census:
    pair: MemoryPair
    epsilon: float
    records: tuple[CensusRecord, ...]

    @property
    def n(self) -> int:
        return self.pair.n

    @property
    def critical(self) -> list[CensusRecord]:
        return [r for r in self.records if r.critical]

    @property
    def critical_count(self) -> int:
        return sum(r.critical for r in self.records)

    @property
    def noncritical_count(self) -> int:
        return len(self.records) - self.critical_count

    def record(self, point: TernaryPoint) -> CensusRecord:
        return self.records[point.index]

    @property
    def summary(self) -> list[SummaryRow]:
        return summarize(self.records)


def family_of(pair: MemoryPair, point: TernaryPoint) -> str:
    if point.is_binary:
        return "Binary"
    return {"mid1": "Mid1", "mid2": "Mid2"}.get(memory_shape(pair, point), "Other")


def summarize(records) -> list[SummaryRow]:
    """Counts by (status, family, index, energy to 4 decimals); non-critical rows pool energies."""
    tally = Counter()
    for r in records:
        if r.critical:
            tally[(r.status, r.family, r.morse_index, round(r.energy, 4) + 0.0)] += 1
        else:
            tally[(r.status, r.family, None, None)] += 1
    status_order = {"critical": 0, "degenerate": 1, "noncritical": 2}

    def key(item):
        (status, fam, idx, en), _ = item
        return (status_order[status], FAMILIES.index(fam),
                -1 if idx is None else idx, 0.0 if en is None else en)

    return [SummaryRow(s, f, i, e, c) for (s, f, i, e), c in sorted(tally.items(), key=key)]


def _spectra_agree(analytic: np.ndarray, numeric: np.ndarray, tol: float) -> bool:
    return analytic.shape == numeric.shape and bool(np.all(np.abs(analytic - numeric) <= tol))


def _classify_critical(cfg: ModelConfig, point: TernaryPoint, family: str,
                       eigs: np.ndarray, zero_tol: float, oracle_tol: float):
    """Return (morse_index, degenerate, branch, analytic) for one critical point."""
    pair, eps = cfg.pair, cfg.epsilon
    report = morse_classify(eigs, zero_tol)
    cls = None
    theorem = False
    if family == "Binary":
        eta = point.to_binary()
        try:
            cls = binary_classification(pair, eta, eps)
            theorem = cls.case_tag not in ("spectrum",)
        except BoundaryCase:
            if not pair.is_memorized(eta):
                spec = binary_spectrum_analytic(pair, eta, eps)
                cls = None
                if not _spectra_agree(spec.values(), eigs, oracle_tol):
                    raise OracleDisagreement(
                        f"closed-form and numeric spectra differ at {point.label()}", point=point)
    elif family in ("Mid1", "Mid2"):
        cls = morse_index_ternary(pair, point, eps)
        theorem = True

    if cls is not None and cls.spectrum.size:
        if not _spectra_agree(cls.spectrum.values(), eigs, oracle_tol):
            raise OracleDisagreement(
                f"closed-form spectrum {np.round(cls.spectrum.values(), 12).tolist()} differs from "
                f"numeric {np.round(eigs, 12).tolist()} at {point.label()}", point=point)

    if report.degenerate:
        return None, True, cls.case_tag if cls else None, cls is not None
    if cls is not None and cls.morse_index != report.index:
        raise OracleDisagreement(
            f"closed-form index {cls.morse_index} ({cls.case_tag}) but numeric index "
            f"{report.index} at {point.label()}", point=point)
    return report.index, False, cls.case_tag if cls else None, theorem


def _evaluate_range(pair: MemoryPair, epsilon: float, start: int, stop: int,
                    oracle_tol: float) -> list[CensusRecord]:
    cfg = ModelConfig(pair, epsilon)
    n = pair.n
    points = [TernaryPoint.from_index(i, n) for i in range(start, stop)]
    rows = []
    crit_phases = []
    for p in points:
        phi = to_phase(p)
        # one state at a time so results do not depend on shard boundaries
        vel, en = velocity_and_energy(cfg, phi)
        numeric = float(np.abs(vel).max()) < CRITICAL_TOL
        analytic = is_ternary_critical(pair, p)
        if numeric != analytic:
            raise OracleDisagreement(
                f"criticality test disagrees at {p.label()}: closed form {analytic}, "
                f"max |f| = {np.abs(vel).max():.3e}", point=p)
        rows.append((p, analytic, float(en)))
        if analytic:
            crit_phases.append(phi)

    if crit_phases:
        jacs = jacobian(cfg, np.array(crit_phases))
        eigs = batch_eigenvalues(jacs)
    out = []
    k = 0
    for p, crit, en in rows:
        fam = family_of(pair, p)
        if crit:
            index, degenerate, branch, theorem = _classify_critical(
                cfg, p, fam, eigs[k], default_zero_tol(jacs[k]), oracle_tol)
            k += 1
        else:
            index, degenerate, branch, theorem = None, False, None, False
        out.append(CensusRecord(p, is_canonical(p), crit, index, degenerate, en, fam,
                                branch, theorem))
    return out


def _shards(total: int, pieces: int) -> list[tuple[int, int]]:
    size = -(-total // pieces)
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def resolve_workers(workers: Optional[int]) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else 1
    return max(1, int(workers))


def census(cfg: ModelConfig, cap: int = DEFAULT_CAP, workers: Optional[int] = None,
           oracle_tol: float = ORACLE_TOL) -> Census:
    """Classify every point of {0, pi/2, pi}^N.

    Criticality is decided twice, by the closed-form sign-sum conditions and by
    ``max |f| < 1e-12``; the two must agree. Every critical point gets a
    numeric spectrum, compared against the closed form wherever one exists.
    Any mismatch raises :class:`OracleDisagreement` naming the point.

    Points are processed in base-3 order (first coordinate most significant).
    With several workers the range is cut into contiguous shards led by the
    leading trits and merged in order, so output is identical for any worker count.
    """
    n = cfg.n
    if n > cap:
        raise CensusCapExceeded(f"N={n} exceeds the census cap {cap} (3^{n} points)")
    total = 3 ** n
    workers = resolve_workers(workers)
    pieces = 1
    while pieces < workers and pieces < total:
        pieces *= 3
    shards = _shards(total, pieces)
    if workers == 1 or len(shards) == 1:
        parts = [_evaluate_range(cfg.pair, cfg.epsilon, a, b, oracle_tol) for a, b in shards]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_evaluate_range, cfg.pair, cfg.epsilon, a, b, oracle_tol)
                       for a, b in shards]
            parts = [f.result() for f in futures]
    records = tuple(r for part in parts for r in part)
    return Census(cfg.pair, cfg.epsilon, records)


def shift_image(point: TernaryPoint) -> Optional[TernaryPoint]:
    """Binary lattice point equal to ``point + (pi/2) 1`` modulo 2 pi, if there is one."""
    shifted = [(t + 1) % 4 for t in point.trits]
    if all(t in (0, 2) for t in shifted):
        return TernaryPoint(tuple(shifted))
    return None


def shift_equivalence_scan(c: Census) -> Census:
    """Attach the binary image of every record that a global pi/2 shift maps onto {0, pi}^N.

    Only the all-pi/2 point qualifies; its image is pi*1.
    """
    records = tuple(
        replace(r, shift_equivalent_binary=img) if (img := shift_image(r.point)) else r
        for r in c.records)
    return replace(c, records=records)


# --------------------------------------------------------------------------- transition graph

@dataclass(frozen=True)
class GraphNode:
    point: TernaryPoint
    morse_index: int
    energy: float
    family: str
    memory: Optional[int] = None


@dataclass(frozen=True)
class GraphEdge:
    saddle: TernaryPoint
    target: TernaryPoint
    delta_v: float
    branch: str
    via: tuple[float, ...] = ()


@dataclass
class TransitionGraph:
    pair: MemoryPair
    epsilon: float
    nodes: dict = field(default_factory=dict)
    edges: list = field(default_factory=list)

    def saddles(self) -> list[GraphNode]:
        return [v for v in self.nodes.values() if v.morse_index == 1]

    def edges_from(self, saddle: TernaryPoint) -> list[GraphEdge]:
        return [e for e in self.edges if e.saddle == saddle]

    def connecting_saddles(self) -> list[tuple[GraphNode, float]]:
        """Index-1 nodes whose two branches end in different memories, with their barrier."""
        out = []
        for node in self.saddles():
            edges = self.edges_from(node.point)
            classes = {self.nodes[e.target].memory for e in edges}
            if classes == {1, 2}:
                out.append((node, min(e.delta_v for e in edges)))
        return sorted(out, key=lambda item: (item[1], item[0].point.index))

    def memory_barrier(self) -> Optional[float]:
        """Smallest energy barrier over saddles linking the two memories."""
        links = self.connecting_saddles()
        return links[0][1] if links else None

    def problems(self) -> list[str]:
        issues = []
        for node in self.saddles():
            edges = self.edges_from(node.point)
            if len(edges) != 2:
                issues.append(f"{node.point.label()} has {len(edges)} outgoing edges")
        for e in self.edges:
            target = self.nodes.get(e.target)
            if target is None or target.morse_index != 0:
                issues.append(f"edge {e.saddle.label()} -> {e.target.label()} does not end at a minimum")
            if not e.delta_v > 0:
                issues.append(f"edge {e.saddle.label()} -> {e.target.label()} has dV={e.delta_v}")
        return issues


def _memory_class(pair: MemoryPair, point: TernaryPoint) -> Optional[int]:
    if not point.is_binary:
        return None
    eta = point.to_binary()
    if eta in (pair.xi1, -pair.xi1):
        return 1
    if eta in (pair.xi2, -pair.xi2):
        return 2
    return None


def transition_graph(cfg: ModelConfig, c: Census,
                     icfg: IntegrationConfig = IntegrationConfig(),
                     delta: float = 1e-3) -> TransitionGraph:
    """Trace the unstable manifold of every canonical index-1 record.

    Each branch contributes one edge to the index-0 census point its endpoint
    rounds to. A branch that ends anywhere else raises :class:`IntegrationError`.
    """
    graph = TransitionGraph(cfg.pair, cfg.epsilon)
    for r in c.records:
        if r.critical and r.morse_index == 0:
            graph.nodes[r.point] = GraphNode(r.point, 0, r.energy, r.family,
                                             _memory_class(cfg.pair, r.point))
    saddles = [r for r in c.records if r.critical and r.morse_index == 1 and r.canonical]
    results = unstable_manifolds(cfg, [to_phase(r.point) for r in saddles], delta, icfg)
    for r, m in zip(saddles, results):
        graph.nodes[r.point] = GraphNode(r.point, 1, r.energy, r.family)
        for tag, branch, dv in (("+", m.plus, m.barrier_plus), ("-", m.minus, m.barrier_minus)):
            if branch.matched_pattern is None:
                raise IntegrationError(
                    f"{tag} branch from {r.point.label()} ended at {branch.kind.value} "
                    f"(residual {branch.residual:.3g})")
            target = branch.matched_pattern.to_point()
            if target not in graph.nodes:
                raise IntegrationError(
                    f"{tag} branch from {r.point.label()} reached {target.label()}, "
                    "which is not an index-0 census point")
            graph.edges.append(GraphEdge(r.point, target, dv, tag,
                                         tuple(v[1] for v in branch.via)))
    return graph


def reflection_pairs_consistent(c: Census, tol: float = 1e-12) -> list[str]:
    """Points and their reflections must share energy and Morse index."""
    issues = []
    for r in c.records:
        m = c.record(r.point.reflect())
        if abs(r.energy - m.energy) > tol or r.morse_index != m.morse_index or r.critical != m.critical:
            issues.append(f"{r.point.label()} vs {m.point.label()}")
    return issues


def format_summary(c: Census) -> str:
    lines = [f"critical={c.critical_count} noncritical={c.noncritical_count}"]
    degenerate = sum(r.degenerate for r in c.records)
    if degenerate:
        lines.append(f"degenerate={degenerate} (excluded from index tallies)")
    lines.append(f"{'family':<8} {'index':>5} {'energy':>10} {'count':>6}")
    for row in c.summary:
        if row.status != "critical":
            continue
        lines.append(f"{row.family:<8} {row.morse_index:>5} {row.energy:>10.4f} {row.count:>6}")
    for row in c.summary:
        if row.status == "degenerate":
            lines.append(f"{row.family:<8} {'deg':>5} {row.energy:>10.4f} {row.count:>6}")
    return "\n".join(lines)
