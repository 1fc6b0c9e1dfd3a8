"""Serialization: census JSON Lines, summary CSV, transition-graph DOT, trajectory CSV."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .dynamics import TrajectoryResult
from .errors import ConfigError
from .landscape import Census, CensusRecord, TransitionGraph, summarize
from .patterns import MemoryPair, TernaryPoint


def _record_dict(r: CensusRecord) -> dict:
    return {
        "index": r.point.index,
        "point": str(r.point),
        "canonical": r.canonical,
        "critical": r.critical,
        "morse_index": r.morse_index,
        "degenerate": r.degenerate,
        "energy": r.energy,
        "family": r.family,
        "branch": r.branch,
        "analytic": r.analytic,
        "shift_equivalent_binary": str(r.shift_equivalent_binary) if r.shift_equivalent_binary else None,
    }


def census_lines(c: Census):
    """Header line with the configuration, then one line per lattice point in base-3 order."""
    yield json.dumps({"kind": "census", "xi1": list(c.pair.xi1.signs),
                      "xi2": list(c.pair.xi2.signs), "epsilon": c.epsilon, "n": c.n})
    for r in c.records:
        yield json.dumps(_record_dict(r))


def write_census_jsonl(c: Census, path) -> None:
    with open(path, "w") as fh:
        for line in census_lines(c):
            fh.write(line + "\n")


def read_census_jsonl(path) -> Census:
    with open(path) as fh:
        lines = [ln for ln in fh if ln.strip()]
    if not lines:
        raise ConfigError(f"{path} is empty")
    try:
        head = json.loads(lines[0])
        if head.get("kind") != "census":
            raise ConfigError(f"{path} does not start with a census header")
        pair = MemoryPair.from_lists(head["xi1"], head["xi2"])
        records = []
        for ln in lines[1:]:
            d = json.loads(ln)
            shift = d["shift_equivalent_binary"]
            records.append(CensusRecord(
                point=TernaryPoint.parse(d["point"]),
                canonical=d["canonical"],
                critical=d["critical"],
                morse_index=d["morse_index"],
                degenerate=d["degenerate"],
                energy=float(d["energy"]),
                family=d["family"],
                branch=d["branch"],
                analytic=d["analytic"],
                shift_equivalent_binary=TernaryPoint.parse(shift) if shift else None,
            ))
    except (KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: malformed census file ({exc})") from exc
    if len(records) != 3 ** pair.n:
        raise ConfigError(f"{path}: expected {3 ** pair.n} records, found {len(records)}")
    return Census(pair, float(head["epsilon"]), tuple(records))


def summary_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["status", "family", "morse_index", "energy", "count"])
    for row in summarize(records):
        w.writerow([row.status, row.family,
                    "" if row.morse_index is None else row.morse_index,
                    "" if row.energy is None else f"{row.energy:.4f}", row.count])
    return buf.getvalue()


def write_summary_csv(c: Census, path) -> None:
    Path(path).write_text(summary_csv(c.records))


def _node_id(point: TernaryPoint) -> str:
    return f"p{point}"


def graph_dot(g: TransitionGraph) -> str:
    """DOT text: nodes labelled "pattern / index / energy", edges labelled with the barrier."""
    out = ["digraph transitions {", "  rankdir=BT;", "  node [shape=box, fontname=monospace];"]
    barrier = g.memory_barrier()
    if barrier is not None:
        out.append(f'  label="min memory-to-memory barrier {barrier:.4f}";')
    for node in sorted(g.nodes.values(), key=lambda v: (v.morse_index, v.energy, v.point.index)):
        attrs = [f'label="{node.point} / {node.morse_index} / {node.energy:.4f}"']
        if node.morse_index == 0:
            attrs.append("shape=ellipse")
            if node.memory:
                attrs.append("peripheries=2")
        out.append(f"  {_node_id(node.point)} [{', '.join(attrs)}];")
    for e in g.edges:
        attrs = [f'label="{e.delta_v:.4f}"']
        if e.via:
            attrs.append(f'tooltip="via saddle at {", ".join(f"{v:.4f}" for v in e.via)}"')
            attrs.append("style=dashed")
        out.append(f"  {_node_id(e.saddle)} -> {_node_id(e.target)} [{', '.join(attrs)}];")
    out.append("}")
    return "\n".join(out) + "\n"


def write_graph_dot(g: TransitionGraph, path) -> None:
    Path(path).write_text(graph_dot(g))


def trajectory_csv(traj: TrajectoryResult) -> str:
    """Columns t, phi1..phiN, V from the samples recorded during integration."""
    if not traj.samples:
        raise ConfigError("trajectory has no recorded samples (set record_every > 0)")
    n = len(traj.samples[0][1])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"phi{i + 1}" for i in range(n)] + ["V"])
    for t, phi, v in traj.samples:
        w.writerow([repr(float(t))] + [repr(float(x)) for x in phi] + [repr(float(v))])
    return buf.getvalue()


def write_trajectory_csv(traj: TrajectoryResult, path) -> None:
    Path(path).write_text(trajectory_csv(traj))
