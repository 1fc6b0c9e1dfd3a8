"""Gradient-flow integration, memory retrieval and unstable-manifold tracing."""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .eigen import default_zero_tol, symmetric_spectrum
from .errors import IntegrationError, NotIndexOne, PatternError
from .model import ModelConfig, energy, jacobian, velocity_and_energy
from .patterns import BinaryPattern, MemoryPair, TernaryPoint, epsilon_star, to_phase

ENERGY_SLACK = 1e-9


@dataclass(frozen=True)
class IntegrationConfig:
    dt: float = 0.01
    t_max: float = 1000.0
    stop_tol: float = 1e-10
    trace_every: int = 100
    record_every: int = 0
    saddle_tol: Optional[float] = None

    def __post_init__(self):
        if not (self.dt > 0 and self.t_max > 0 and self.stop_tol > 0):
            raise PatternError("dt, t_max and stop_tol must all be positive")

    @property
    def max_steps(self) -> int:
        return int(math.ceil(self.t_max / self.dt - 1e-9))


@dataclass
class TrajectoryResult:
    final_state: np.ndarray
    converged: bool
    steps: int
    phase_sum_drift: float
    max_energy_increase: float
    initial_energy: float
    final_energy: float
    energy_trace: list = field(default_factory=list)
    samples: list = field(default_factory=list)
    stalled_on_saddle: bool = False

    @property
    def energy_monotone(self) -> bool:
        return self.max_energy_increase < ENERGY_SLACK


class Outcome(str, enum.Enum):
    MEMORY1 = "Memory1"
    MEMORY2 = "Memory2"
    MEMORY1_INVERTED = "Memory1Inverted"
    MEMORY2_INVERTED = "Memory2Inverted"
    SPURIOUS_BINARY = "SpuriousBinary"
    NON_BINARY = "NonBinary"
    NO_CONVERGENCE = "NoConvergence"

    @property
    def memory(self) -> Optional[int]:
        """1 or 2 for a stored memory (either sign), else None."""
        return {"Memory1": 1, "Memory1Inverted": 1,
                "Memory2": 2, "Memory2Inverted": 2}.get(self.value)


@dataclass(frozen=True)
class RetrievalOutcome:
    kind: Outcome
    matched_pattern: Optional[BinaryPattern]
    residual: float
    offset: float = 0.0
    trajectory: Optional[TrajectoryResult] = None
    via: tuple = ()


@dataclass(frozen=True)
class ManifoldResult:
    saddle_energy: float
    eigenvalue: float
    direction: np.ndarray
    plus: RetrievalOutcome
    minus: RetrievalOutcome
    barrier_plus: float
    barrier_minus: float

    @property
    def barrier(self) -> float:
        """V(saddle) minus the higher of the two endpoint energies."""
        return min(self.barrier_plus, self.barrier_minus)


def integrate_many(cfg: ModelConfig, phi0s, icfg: IntegrationConfig = IntegrationConfig()
                   ) -> list[TrajectoryResult]:
    """Fixed-step classical RK4 for a stack of initial states, shape (K, N).

    Each trajectory stops on its own once ||f(phi)||_inf <= stop_tol, or at t_max.
    Rows are integrated together only for speed; every row follows exactly the
    same arithmetic it would follow alone.

    With ``icfg.saddle_tol`` set, a row whose speed first drops below that
    threshold is checked for positive Jacobian eigenvalues and stopped
    (``stalled_on_saddle``) if it is sitting on a saddle.
    """
    phi = np.array(phi0s, dtype=float, ndmin=2)
    if phi.shape[-1] != cfg.n:
        raise PatternError(f"state length {phi.shape[-1]} != {cfg.n}")
    if not np.all(np.isfinite(phi)):
        raise IntegrationError("initial state is not finite")
    k = phi.shape[0]
    dt = icfg.dt
    sum0 = phi.sum(axis=1)
    steps = np.zeros(k, dtype=int)
    converged = np.zeros(k, dtype=bool)
    max_inc = np.full(k, -np.inf)
    _, e0 = velocity_and_energy(cfg, phi)
    e_prev = e0.copy()
    traces = [[] for _ in range(k)]
    samples = [[] for _ in range(k)]
    active = np.arange(k)
    stalled = np.zeros(k, dtype=bool)
    checked = np.zeros(k, dtype=bool)

    def f(x):
        return velocity_and_energy(cfg, x)[0]

    for step in range(icfg.max_steps + 1):
        x = phi[active]
        v, e = velocity_and_energy(cfg, x)
        if step > 0:
            max_inc[active] = np.maximum(max_inc[active], e - e_prev[active])
        e_prev[active] = e
        t = step * dt
        if icfg.trace_every and step % icfg.trace_every == 0:
            for row, idx in enumerate(active):
                traces[idx].append((t, float(e[row])))
        if icfg.record_every and step % icfg.record_every == 0:
            for row, idx in enumerate(active):
                samples[idx].append((t, x[row].copy(), float(e[row])))
        speed = np.abs(v).max(axis=1)
        done = speed <= icfg.stop_tol
        if icfg.saddle_tol is not None:
            for row in np.flatnonzero((speed <= icfg.saddle_tol) & ~checked[active]):
                idx = active[row]
                checked[idx] = True
                jac = jacobian(cfg, x[row])
                lam = symmetric_spectrum(jac).eigenvalues
                if lam[-1] > default_zero_tol(jac):
                    stalled[idx] = True
                    done[row] = True
        if done.any():
            hit = active[done]
            converged[hit[~stalled[hit]]] = True
        if step == icfg.max_steps:
            break
        keep = ~done
        if not keep.any():
            break
        if not keep.all():
            active, x, v = active[keep], x[keep], v[keep]
        k2 = f(x + 0.5 * dt * v)
        k3 = f(x + 0.5 * dt * k2)
        k4 = f(x + dt * k3)
        x = x + dt / 6.0 * (v + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            bad = active[~np.all(np.isfinite(x), axis=1)]
            raise IntegrationError(f"non-finite state in trajectories {bad.tolist()} at t={t + dt}")
        phi[active] = x
        steps[active] += 1

    results = []
    for i in range(k):
        last_t = steps[i] * dt
        if icfg.trace_every and (not traces[i] or traces[i][-1][0] != last_t):
            traces[i].append((last_t, float(e_prev[i])))
        if icfg.record_every and (not samples[i] or samples[i][-1][0] != last_t):
            samples[i].append((last_t, phi[i].copy(), float(e_prev[i])))
        results.append(TrajectoryResult(
            final_state=phi[i].copy(),
            converged=bool(converged[i]),
            steps=int(steps[i]),
            phase_sum_drift=float(abs(phi[i].sum() - sum0[i])),
            max_energy_increase=float(max(max_inc[i], 0.0)) if steps[i] else 0.0,
            initial_energy=float(e0[i]),
            final_energy=float(e_prev[i]),
            energy_trace=traces[i],
            samples=samples[i],
            stalled_on_saddle=bool(stalled[i]),
        ))
    return results


def integrate(cfg: ModelConfig, phi0, icfg: IntegrationConfig = IntegrationConfig()) -> TrajectoryResult:
    return integrate_many(cfg, np.asarray(phi0, dtype=float)[None, :], icfg)[0]


def _wrap(x):
    return np.remainder(x + np.pi, 2 * np.pi) - np.pi


def classify_endpoint(pair: MemoryPair, phi, tol: float = 0.1) -> RetrievalOutcome:
    """Match a state against the stored memories up to a global phase shift.

    The shift c is the half-angle of the mean of exp(2i phi), taken in
    (-pi/2, pi/2]; after removing it every coordinate must sit within ``tol``
    radians of 0 or pi. Keeping c near zero is what distinguishes a memory
    from its sign-inverted image.
    """
    phi = np.asarray(phi, dtype=float)
    z = np.exp(2j * phi).mean()
    offset = 0.5 * float(np.angle(z)) if abs(z) > 1e-12 else 0.0
    if offset <= -np.pi / 2:
        offset += np.pi
    psi = _wrap(phi - offset)
    dist0 = np.abs(psi)
    distpi = np.pi - dist0
    residual = float(np.minimum(dist0, distpi).max())
    if residual >= tol:
        return RetrievalOutcome(Outcome.NON_BINARY, None, residual, offset)
    eta = BinaryPattern(tuple(1 if a <= b else -1 for a, b in zip(dist0, distpi)))
    kinds = {pair.xi1: Outcome.MEMORY1, -pair.xi1: Outcome.MEMORY1_INVERTED,
             pair.xi2: Outcome.MEMORY2, -pair.xi2: Outcome.MEMORY2_INVERTED}
    return RetrievalOutcome(kinds.get(eta, Outcome.SPURIOUS_BINARY), eta, residual, offset)


def _as_state(corrupted) -> np.ndarray:
    if isinstance(corrupted, (BinaryPattern, TernaryPoint)):
        return to_phase(corrupted)
    return np.asarray(corrupted, dtype=float)


def retrieve_many(cfg: ModelConfig, inputs, icfg: IntegrationConfig = IntegrationConfig(),
                  tol: float = 0.1) -> list[RetrievalOutcome]:
    estar = epsilon_star(cfg.pair.partition)
    if not 0 < cfg.epsilon < estar:
        warnings.warn(f"epsilon={cfg.epsilon} outside (0, {estar:.4g}); "
                      "non-memorized patterns may be stable", stacklevel=2)
    states = np.array([_as_state(x) for x in inputs])
    out = []
    for traj in integrate_many(cfg, states, icfg):
        if not traj.converged:
            res = classify_endpoint(cfg.pair, traj.final_state, tol)
            out.append(RetrievalOutcome(Outcome.NO_CONVERGENCE, None, res.residual,
                                        res.offset, traj))
            continue
        res = classify_endpoint(cfg.pair, traj.final_state, tol)
        out.append(RetrievalOutcome(res.kind, res.matched_pattern, res.residual, res.offset, traj))
    return out


def retrieve(cfg: ModelConfig, corrupted, icfg: IntegrationConfig = IntegrationConfig(),
             tol: float = 0.1) -> RetrievalOutcome:
    """Integrate from a (possibly corrupted) input and report which memory it reaches."""
    return retrieve_many(cfg, [corrupted], icfg, tol)[0]


def corrupted_memory(pair: MemoryPair, memory: int, flip: int, jitter: float,
                     rng: np.random.Generator) -> np.ndarray:
    """arccos of a memory with coordinate ``flip`` negated, plus uniform jitter in [-jitter, jitter]."""
    xi = pair.xi1 if memory == 1 else pair.xi2
    signs = list(xi.signs)
    signs[flip] = -signs[flip]
    return to_phase(BinaryPattern(tuple(signs))) + rng.uniform(-jitter, jitter, pair.n)


def _unstable_direction(cfg: ModelConfig, phi):
    jac = jacobian(cfg, phi)
    spec = symmetric_spectrum(jac, want_vectors=True)
    u = spec.eigenvectors[:, -1].copy()
    u /= np.linalg.norm(u)
    if u[np.argmax(np.abs(u))] < 0:
        u = -u
    positive = int((spec.eigenvalues > default_zero_tol(jac)).sum())
    return u, float(spec.eigenvalues[-1]), positive


RELAY_TIE = 1e-12


def _classify_branch(pair, traj, tol, via):
    res = classify_endpoint(pair, traj.final_state, tol)
    kind = res.kind if traj.converged else Outcome.NO_CONVERGENCE
    return RetrievalOutcome(kind, res.matched_pattern, res.residual, res.offset, traj, tuple(via))


def unstable_manifolds(cfg: ModelConfig, saddles, delta: float = 1e-3,
                       icfg: IntegrationConfig = IntegrationConfig(), tol: float = 0.1,
                       max_relays: int = 3) -> list[ManifoldResult]:
    """Follow both branches of the one-dimensional unstable manifold of each index-1 saddle.

    A branch can run exactly into a lower saddle when it lies in a
    flow-invariant symmetric subspace; the integrator then stalls there. Such
    a branch is relayed: it restarts from the lower saddle displaced by
    ``delta`` along that saddle's most unstable eigenvector, on the side the
    residual velocity points to (the normalized ``+`` side when that velocity
    component is at rounding level). Intermediate saddles are recorded in
    ``RetrievalOutcome.via`` as ``(state, energy, positive_count)``.
    """
    states = [_as_state(s) for s in saddles]
    if not states:
        return []
    if icfg.saddle_tol is None:
        icfg = replace(icfg, saddle_tol=1e-7)
    dirs, lams = [], []
    for phi in states:
        u, lam, positive = _unstable_direction(cfg, phi)
        if positive != 1:
            raise NotIndexOne(f"saddle has {positive} positive eigenvalues, expected 1")
        dirs.append(u)
        lams.append(lam)
    starts = []
    for phi, u in zip(states, dirs):
        starts += [phi + delta * u, phi - delta * u]
    trajs = integrate_many(cfg, np.array(starts), icfg)
    vias = [[] for _ in starts]
    for _ in range(max_relays):
        pending = [i for i, t in enumerate(trajs) if t.stalled_on_saddle]
        if not pending:
            break
        restarts = []
        for i in pending:
            here = trajs[i].final_state
            u, _, positive = _unstable_direction(cfg, here)
            drift = float(velocity_and_energy(cfg, here)[0] @ u)
            push = -1.0 if drift < -RELAY_TIE else 1.0
            vias[i].append((here.copy(), trajs[i].final_energy, positive))
            restarts.append(here + push * delta * u)
        for i, t in zip(pending, integrate_many(cfg, np.array(restarts), icfg)):
            trajs[i] = t
    out = []
    for k, phi in enumerate(states):
        v_saddle = energy(cfg, phi)
        plus = _classify_branch(cfg.pair, trajs[2 * k], tol, vias[2 * k])
        minus = _classify_branch(cfg.pair, trajs[2 * k + 1], tol, vias[2 * k + 1])
        out.append(ManifoldResult(
            saddle_energy=v_saddle,
            eigenvalue=lams[k],
            direction=dirs[k],
            plus=plus,
            minus=minus,
            barrier_plus=v_saddle - plus.trajectory.final_energy,
            barrier_minus=v_saddle - minus.trajectory.final_energy,
        ))
    return out


def unstable_manifold(cfg: ModelConfig, saddle, delta: float = 1e-3,
                      icfg: IntegrationConfig = IntegrationConfig(), tol: float = 0.1,
                      max_relays: int = 3) -> ManifoldResult:
    """Single-saddle form of :func:`unstable_manifolds`."""
    return unstable_manifolds(cfg, [saddle], delta, icfg, tol, max_relays)[0]
