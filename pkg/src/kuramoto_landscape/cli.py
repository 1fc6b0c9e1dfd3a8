"""Command-line front end.

Exit codes: 0 ok, 1 configuration error, 2 closed-form/numeric disagreement
(or failed invariants in ``verify``), 3 boundary case, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dynamics, landscape
from .config import RunConfig, load_config
from .eigen import default_zero_tol, morse_classify, symmetric_spectrum
from .errors import ConfigError, LandscapeError, OracleDisagreement, OutsideTheoremRange
from .export import (graph_dot, summary_csv, write_census_jsonl, write_graph_dot,
                     write_trajectory_csv)
from .model import energy, jacobian, velocity
from .patterns import BinaryPattern, TernaryPoint, to_phase
from .spectra import (binary_classification, binary_spectrum_analytic, eigenspace_bases,
                      is_index1_ternary, is_ternary_critical, memorized_spectrum,
                      morse_index_ternary,
                      ternary_spectrum_analytic)
from .verify import run_suite

EXIT_OK, EXIT_CONFIG, EXIT_ORACLE, EXIT_BOUNDARY, EXIT_NUMERIC = 0, 1, 2, 3, 4
DEFAULT_NAMES = {"census": "census.jsonl", "summary": "summary.csv",
                 "graph": "graph.dot", "trajectory": "trajectory.csv"}


def parse_point(text: str) -> TernaryPoint:
    """``+`` / ``-`` signs (``"++-"`` or ``"1,-1,1"``) give a binary point; anything else is trits."""
    raw = text.strip()
    if "-" in raw or "+" in raw:
        if "," in raw or " " in raw:
            signs = [int(t) for t in raw.replace(",", " ").split()]
        else:
            signs = [1 if ch == "+" else -1 for ch in raw]
        return BinaryPattern(tuple(signs)).to_point()
    return TernaryPoint.parse(raw)


def _fmt(x: float) -> str:
    return repr(float(x) + 0.0)


def _out_path(cfg: RunConfig, key: str, out_dir) -> Path:
    name = cfg.outputs.get(key, DEFAULT_NAMES[key])
    return Path(out_dir) / Path(name).name if out_dir else Path(name)


def _emit(cfg: RunConfig, text: str, payload: dict):
    if cfg.format == "json":
        print(json.dumps(payload))
    else:
        print(text)


def _load(args) -> RunConfig:
    cfg = load_config(args.config)
    return cfg.with_overrides(epsilon=getattr(args, "epsilon", None),
                              format=getattr(args, "format", None),
                              census_cap=getattr(args, "cap", None),
                              dt=getattr(args, "dt", None),
                              t_max=getattr(args, "t_max", None),
                              stop_tol=getattr(args, "stop_tol", None))


def _check_length(cfg: RunConfig, point: TernaryPoint):
    if len(point) != cfg.pair.n:
        raise ConfigError(f"point has {len(point)} entries, memories have {cfg.pair.n}")


# --------------------------------------------------------------------------- commands

def cmd_census(args) -> int:
    cfg = _load(args)
    c = landscape.shift_equivalence_scan(
        landscape.census(cfg.model, cap=cfg.census_cap, workers=args.workers))
    jsonl = _out_path(cfg, "census", args.out)
    csv_path = _out_path(cfg, "summary", args.out)
    jsonl.parent.mkdir(parents=True, exist_ok=True)
    write_census_jsonl(c, jsonl)
    csv_path.write_text(summary_csv(c.records))
    payload = {"critical": c.critical_count, "noncritical": c.noncritical_count,
               "summary": [row.__dict__ for row in c.summary],
               "census": str(jsonl), "summary_csv": str(csv_path)}
    _emit(cfg, landscape.format_summary(c), payload)
    return EXIT_OK


def classify_point(cfg: RunConfig, point: TernaryPoint) -> dict:
    """Everything ``classify`` reports about one lattice point."""
    model = cfg.model
    pair, eps = model.pair, model.epsilon
    phi = to_phase(point)
    fam = landscape.family_of(pair, point)
    vel = float(np.abs(velocity(model, phi)).max())
    info = {"point": str(point), "family": fam, "energy": energy(model, phi),
            "critical": bool(vel < landscape.CRITICAL_TOL), "max_velocity": vel}
    if is_ternary_critical(pair, point) != info["critical"]:
        raise OracleDisagreement(f"criticality tests disagree at {point.label()}", point=point)
    if not info["critical"]:
        return info
    jac = jacobian(model, phi)
    numeric = symmetric_spectrum(jac).eigenvalues
    report = morse_classify(numeric, default_zero_tol(jac))
    info["numeric_spectrum"] = [float(x) for x in numeric]
    cls = None
    if fam == "Binary":
        try:
            cls = binary_classification(pair, point.to_binary(), eps)
        except OutsideTheoremRange:
            cls = None
    elif fam in ("Mid1", "Mid2"):
        try:
            is_index1_ternary(pair, point, eps)
        except OutsideTheoremRange:
            pass
        cls = morse_index_ternary(pair, point, eps)
    if cls is not None:
        info["branch"] = cls.case_tag
        info["analytic_spectrum"] = [
            {"value": e.value, "multiplicity": e.multiplicity, "label": e.label}
            for e in cls.spectrum.entries]
        if cls.spectrum.size and np.abs(cls.spectrum.values() - numeric).max() > landscape.ORACLE_TOL:
            raise OracleDisagreement(f"closed-form and numeric spectra differ at {point.label()}",
                                     point=point)
    info["degenerate"] = report.degenerate
    if report.degenerate:
        info["index"] = None
    else:
        info["index"] = cls.morse_index if cls is not None else report.index
        if cls is not None and cls.morse_index != report.index:
            raise OracleDisagreement(
                f"closed-form index {cls.morse_index} vs numeric {report.index} at {point.label()}",
                point=point)
    info["stable"] = report.stable
    return info


def _classify_text(info: dict) -> str:
    lines = [f"point={info['point']} family={info['family']} critical={'yes' if info['critical'] else 'no'}"]
    if not info["critical"]:
        lines.append(f"max|f|={info['max_velocity']:.3e} energy={info['energy']:.4f}")
        return "\n".join(lines)
    if "branch" in info:
        lines.append(f"branch={info['branch']}")
    for e in info.get("analytic_spectrum", []):
        lines.append(f"  analytic {e['value']:+.10f} x{e['multiplicity']} {e['label']}")
    lines.append("  numeric  " + " ".join(f"{x:+.10f}" for x in info["numeric_spectrum"]))
    if info["index"] is None:
        head = "index=degenerate"
    else:
        head = f"index={info['index']}" + (" stable" if info["stable"] else "")
    lines.append(f"{head} family={info['family']} energy={info['energy']:.4f}")
    return "\n".join(lines)


def cmd_classify(args) -> int:
    cfg = _load(args)
    point = parse_point(args.point)
    _check_length(cfg, point)
    info = classify_point(cfg, point)
    _emit(cfg, _classify_text(info), info)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cfg = _load(args)
    point = parse_point(args.point)
    _check_length(cfg, point)
    model = cfg.model
    pair, eps = model.pair, model.epsilon
    spec = symmetric_spectrum(jacobian(model, to_phase(point)), want_vectors=args.vectors)
    payload = {"point": str(point), "numeric": [float(x) for x in spec.eigenvalues],
               "residual": spec.residual}
    lines = [f"point={point} residual={spec.residual:.2e}"]
    analytic = None
    if point.is_binary and pair.is_memorized(point.to_binary()):
        analytic = memorized_spectrum(pair, eps)
    elif point.is_binary:
        analytic = binary_spectrum_analytic(pair, point.to_binary(), eps)
    elif landscape.family_of(pair, point) in ("Mid1", "Mid2"):
        analytic = ternary_spectrum_analytic(pair, point, eps)
        payload["bases"] = [{"label": b.label, "eigenvalue": b.eigenvalue,
                             "dimension": len(b.vectors)}
                            for b in eigenspace_bases(pair, point, eps)]
    if analytic is not None:
        payload["analytic"] = [float(x) for x in analytic.values()]
        for e in analytic.entries:
            lines.append(f"  analytic {e.value:+.12f} x{e.multiplicity} {e.label}")
    lines.append("  numeric  " + " ".join(f"{x:+.12f}" for x in spec.eigenvalues))
    if args.vectors:
        payload["vectors"] = spec.eigenvectors.T.tolist()
        for lam, vec in zip(spec.eigenvalues, spec.eigenvectors.T):
            lines.append(f"  {lam:+.6f}: " + " ".join(f"{x:+.4f}" for x in vec))
    _emit(cfg, "\n".join(lines), payload)
    return EXIT_OK


def _start_state(cfg: RunConfig, args) -> np.ndarray:
    if args.phases:
        phi = np.array([float(x) for x in args.phases.replace(",", " ").split()])
    elif args.start:
        point = parse_point(args.start)
        _check_length(cfg, point)
        phi = to_phase(point)
    else:
        raise ConfigError("give a starting point (--from) or explicit phases (--phases)")
    if len(phi) != cfg.pair.n:
        raise ConfigError(f"start has {len(phi)} entries, memories have {cfg.pair.n}")
    if args.jitter:
        phi = phi + np.random.default_rng(args.seed).uniform(-args.jitter, args.jitter, len(phi))
    return phi


def cmd_simulate(args) -> int:
    cfg = _load(args)
    phi0 = _start_state(cfg, args)
    icfg = dynamics.IntegrationConfig(cfg.integrator.dt, cfg.integrator.t_max,
                                      cfg.integrator.stop_tol, record_every=args.record_every)
    traj = dynamics.integrate(cfg.model, phi0, icfg)
    out = _out_path(cfg, "trajectory", args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(traj, out)
    payload = {"converged": traj.converged, "steps": traj.steps,
               "initial_energy": traj.initial_energy, "final_energy": traj.final_energy,
               "phase_sum_drift": traj.phase_sum_drift, "energy_monotone": traj.energy_monotone,
               "final_state": traj.final_state.tolist(), "trajectory": str(out)}
    text = (f"converged={'yes' if traj.converged else 'no'} steps={traj.steps} "
            f"V0={_fmt(traj.initial_energy)} V={_fmt(traj.final_energy)}\n"
            f"drift={traj.phase_sum_drift:.3e} monotone={'yes' if traj.energy_monotone else 'no'} "
            f"trajectory={out}")
    _emit(cfg, text, payload)
    return EXIT_OK if traj.converged else EXIT_NUMERIC


def cmd_retrieve(args) -> int:
    cfg = _load(args)
    phi0 = _start_state(cfg, args)
    res = dynamics.retrieve(cfg.model, phi0, cfg.integrator)
    traj = res.trajectory
    payload = {"kind": res.kind.value,
               "matched_pattern": list(res.matched_pattern.signs) if res.matched_pattern else None,
               "residual": res.residual, "steps": traj.steps, "final_energy": traj.final_energy}
    text = (f"outcome={res.kind.value} residual={res.residual:.3e} steps={traj.steps} "
            f"V={traj.final_energy:.4f}")
    if res.matched_pattern:
        text += f"\nmatched={res.matched_pattern}"
    _emit(cfg, text, payload)
    return EXIT_OK


def cmd_graph(args) -> int:
    cfg = _load(args)
    model = cfg.model
    c = landscape.census(model, cap=cfg.census_cap, workers=args.workers)
    g = landscape.transition_graph(model, c, dynamics.IntegrationConfig(
        cfg.integrator.dt, cfg.integrator.t_max, cfg.integrator.stop_tol, trace_every=0))
    problems = g.problems()
    out = _out_path(cfg, "graph", args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_graph_dot(g, out)
    barrier = g.memory_barrier()
    lines = [f"nodes={len(g.nodes)} edges={len(g.edges)} graph={out}"]
    for e in g.edges:
        via = f" via {', '.join(f'{v:.4f}' for v in e.via)}" if e.via else ""
        lines.append(f"  {e.saddle} -{e.branch}-> {e.target} dV={e.delta_v:.4f}{via}")
    lines.append("min memory-to-memory barrier="
                 + ("none" if barrier is None else f"{barrier:.4f}"))
    lines += [f"problem: {p}" for p in problems]
    payload = {"nodes": len(g.nodes), "edges": [
        {"saddle": str(e.saddle), "target": str(e.target), "branch": e.branch,
         "delta_v": e.delta_v, "via": list(e.via)} for e in g.edges],
        "memory_barrier": barrier, "problems": problems, "dot": graph_dot(g)}
    _emit(cfg, "\n".join(lines), payload)
    return EXIT_NUMERIC if problems else EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(n_pairs=args.pairs, max_n=args.max_n, seed=args.seed)
    summary = report.to_dict()
    if report.passed:
        print(f"verify: {summary['checks']} checks passed")
        return EXIT_OK
    print(json.dumps(summary, indent=2))
    return EXIT_ORACLE


# --------------------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors; argparse's default 2 is taken
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="kuramoto-landscape",
        description="Critical points, Morse indices and transitions of the two-memory "
                    "Hebbian Kuramoto model with second-order coupling.")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p, point=False):
        p.add_argument("config", help="JSON run configuration")
        if point:
            p.add_argument("point", help="lattice point: trits like 000hhp, or signs like ++--+-")
        p.add_argument("--epsilon", type=float, help="override epsilon")
        p.add_argument("--format", choices=["text", "json"], help="override output format")
        return p

    def with_integrator(p):
        p.add_argument("--dt", type=float)
        p.add_argument("--t-max", dest="t_max", type=float)
        p.add_argument("--stop-tol", dest="stop_tol", type=float)
        return p

    def with_start(p):
        p.add_argument("--from", dest="start", help="start at a lattice point or sign pattern")
        p.add_argument("--phases", help="explicit comma-separated starting phases")
        p.add_argument("--jitter", type=float, default=0.0,
                       help="add uniform noise in [-J, J] to every phase")
        p.add_argument("--seed", type=int, default=0)
        return p

    workers_help = f"worker processes (default ${landscape.WORKERS_ENV} or 1)"

    p = with_config(sub.add_parser("census", help="classify every point of {0, pi/2, pi}^N"))
    p.add_argument("--out", help="directory for census.jsonl and summary.csv")
    p.add_argument("--workers", type=int, help=workers_help)
    p.add_argument("--cap", type=int, help="override the N cap")
    p.set_defaults(func=cmd_census)

    p = with_config(sub.add_parser("classify", help="family, spectra and Morse index of one point"), True)
    p.set_defaults(func=cmd_classify)

    p = with_config(sub.add_parser("spectrum", help="closed-form and numeric Jacobian spectra"), True)
    p.add_argument("--vectors", action="store_true", help="also print numeric eigenvectors")
    p.set_defaults(func=cmd_spectrum)

    p = with_start(with_integrator(with_config(sub.add_parser("simulate", help="integrate the gradient flow"))))
    p.add_argument("--out", help="directory for trajectory.csv")
    p.add_argument("--record-every", type=int, default=10, help="sample every K steps")
    p.set_defaults(func=cmd_simulate)

    p = with_start(with_integrator(with_config(sub.add_parser("retrieve", help="recall a memory from an input"))))
    p.set_defaults(func=cmd_retrieve)

    p = with_integrator(with_config(sub.add_parser("graph", help="saddle transition graph as DOT")))
    p.add_argument("--out", help="directory for graph.dot")
    p.add_argument("--workers", type=int, help=workers_help)
    p.add_argument("--cap", type=int, help="override the N cap")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("verify", help="run the invariant suite on random pairs")
    p.add_argument("--pairs", type=int, default=50)
    p.add_argument("--max-n", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LandscapeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
