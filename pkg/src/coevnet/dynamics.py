"""Asynchronous best-response engine: the action discriminant, the joint
action/opinion update, activation schedules with persistence certificates,
the simulation loop, and trace export.

Within one step every active agent evaluates the pre-step state, so
simultaneous activation is order-free.  Sums deliberately run over all
agents including self-loops; generators default to zero diagonals.

The engine is single-threaded and deterministic.  Runs are pure functions of
immutable inputs, so independent simulations (different seeds or parameters)
may execute in parallel with no shared mutable state.
"""
from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .netcore import AgentParams, PopulationState, TwoLayerNetwork

DEFAULT_OPINION_TOL = 1e-10


def discriminants(
    z: PopulationState, net: TwoLayerNetwork, params: AgentParams
) -> np.ndarray:
    """Discriminant of every agent at state ``z``.

    Positive favours action +1, negative favours -1, zero triggers inertia.
    """
    x = z.actions.astype(float)
    bracket = 2.0 * x + params.alpha * (1.0 + x)
    action_term = (params.eps * params.lam * (1.0 - params.beta) / 2.0) * (
        net.A.weights @ bracket
    )
    opinion_term = (2.0 * (1.0 - params.lam) * params.lam * params.beta) * (
        net.W.weights @ z.opinions
    )
    return action_term + opinion_term


def discriminant(
    i: int, z: PopulationState, net: TwoLayerNetwork, params: AgentParams
) -> float:
    """Discriminant of a single agent (index 0-based)."""
    if not 0 <= i < z.n:
        raise IndexError(f"agent index {i} out of range for n={z.n}")
    x = z.actions.astype(float)
    bracket = 2.0 * x + params.alpha * (1.0 + x)
    action = (
        params.eps[i]
        * params.lam[i]
        * (1.0 - params.beta[i])
        / 2.0
        * float(net.A.weights[i] @ bracket)
    )
    opinion = (
        2.0
        * (1.0 - params.lam[i])
        * params.lam[i]
        * params.beta[i]
        * float(net.W.weights[i] @ z.opinions)
    )
    return action + opinion


def sign_with_inertia(delta: float, x_current: int, tie_tol: float = 0.0) -> int:
    """Best-response action: the sign of ``delta``, keeping the current action
    inside the tie band |delta| <= tie_tol."""
    if tie_tol < 0.0:
        raise ValueError("tie_tol must be non-negative")
    if delta > tie_tol:
        return 1
    if delta < -tie_tol:
        return -1
    return int(x_current)


def _update(
    z: PopulationState,
    idx: list,
    net: TwoLayerNetwork,
    params: AgentParams,
    tie_tol: float,
) -> tuple[PopulationState, dict]:
    x_new = z.actions.copy()
    y_new = z.opinions.copy()
    x_f = z.actions.astype(float)
    bracket = 2.0 * x_f + params.alpha * (1.0 + x_f)
    deltas: dict = {}
    for i in idx:
        mixed_opinion = float(net.W.weights[i] @ z.opinions)
        delta = (
            params.eps[i]
            * params.lam[i]
            * (1.0 - params.beta[i])
            / 2.0
            * float(net.A.weights[i] @ bracket)
            + 2.0 * (1.0 - params.lam[i]) * params.lam[i] * params.beta[i] * mixed_opinion
        )
        s = sign_with_inertia(delta, int(z.actions[i]), tie_tol)
        x_new[i] = s
        y_new[i] = (1.0 - params.lam[i]) * mixed_opinion + params.lam[i] * s
        deltas[i] = float(delta)
    return PopulationState(actions=x_new, opinions=y_new), deltas


def step(
    z: PopulationState,
    active: Iterable[int],
    net: TwoLayerNetwork,
    params: AgentParams,
    tie_tol: float = 0.0,
) -> PopulationState:
    """One synchronous-within-step update of the agents in ``active``.

    Active agents adopt the discriminant's action and move their opinion to
    the convex mix of neighbourhood opinion and the new action; everyone else
    is carried over bitwise.  All discriminants see the pre-step state.
    """
    idx = sorted(set(int(i) for i in active))
    if any(i < 0 or i >= z.n for i in idx):
        raise IndexError("active set out of range")
    if not idx:
        return z
    z_next, _ = _update(z, idx, net, params, tie_tol)
    return z_next


# --- activation schedules ----------------------------------------------------


@dataclass(frozen=True)
class ActivationSchedule:
    """Sequence of active-agent sets with a persistence certificate.

    ``persistence`` is the smallest window length T such that every agent is
    active at least once in every length-T window, or None when no finite
    bound is certified (uniform-random schedules, or explicit prefixes that
    never cover).
    """

    kind: str  # "round_robin" | "uniform_random" | "explicit"
    n: int
    seed: int | None = None
    explicit_sets: tuple[frozenset, ...] = ()
    persistence: int | None = field(init=False, default=None)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("schedule needs at least one agent")
        if self.kind == "round_robin":
            object.__setattr__(self, "persistence", self.n)
        elif self.kind == "uniform_random":
            if self.seed is None:
                raise ValueError("uniform_random schedule needs a seed")
        elif self.kind == "explicit":
            sets = tuple(frozenset(int(i) for i in s) for s in self.explicit_sets)
            if not sets:
                raise ValueError("explicit schedule needs at least one step")
            if any(i < 0 or i >= self.n for s in sets for i in s):
                raise ValueError("explicit schedule references unknown agents")
            object.__setattr__(self, "explicit_sets", sets)
            object.__setattr__(self, "persistence", _scan_persistence(sets, self.n))
        else:
            raise ValueError(f"unknown schedule kind {self.kind!r}")

    @classmethod
    def round_robin(cls, n: int) -> "ActivationSchedule":
        return cls(kind="round_robin", n=n)

    @classmethod
    def uniform_random(cls, n: int, seed: int) -> "ActivationSchedule":
        return cls(kind="uniform_random", n=n, seed=int(seed))

    @classmethod
    def explicit(cls, n: int, sets: Sequence[Iterable[int]]) -> "ActivationSchedule":
        return cls(kind="explicit", n=n, explicit_sets=tuple(frozenset(s) for s in sets))

    def finite(self) -> bool:
        return self.kind == "explicit"

    def iter_sets(self) -> Iterator[frozenset]:
        """Deterministic stream of active sets (fresh, replayable)."""
        if self.kind == "round_robin":
            i = 0
            while True:
                yield frozenset((i,))
                i = (i + 1) % self.n
        elif self.kind == "uniform_random":
            rng = np.random.default_rng(self.seed)
            while True:
                yield frozenset((int(rng.integers(self.n)),))
        else:
            yield from self.explicit_sets


def _scan_persistence(sets: Sequence[frozenset], n: int) -> int | None:
    """Smallest T such that every length-T window inside the prefix covers all
    agents; None when even the full prefix misses someone."""
    length = len(sets)
    cover_len = np.full(length, np.inf)
    counts = np.zeros(n, dtype=int)
    missing = n
    end = 0
    for start in range(length):
        while end < length and missing > 0:
            for i in sets[end]:
                if counts[i] == 0:
                    missing -= 1
                counts[i] += 1
            end += 1
        if missing == 0:
            cover_len[start] = end - start
        for i in sets[start]:
            counts[i] -= 1
            if counts[i] == 0:
                missing += 1
    prefix_max = np.maximum.accumulate(cover_len)
    for window in range(1, length + 1):
        if prefix_max[length - window] <= window:
            return window
    return None


def verify_persistence(
    schedule: ActivationSchedule, horizon: int
) -> int | None:
    """Certified persistence bound over the first ``horizon`` steps."""
    if horizon < 1:
        raise ValueError("horizon must be positive")
    sets = []
    for s in schedule.iter_sets():
        sets.append(s)
        if len(sets) >= horizon:
            break
    return _scan_persistence(sets, schedule.n)


# --- simulation --------------------------------------------------------------


@dataclass(frozen=True)
class StopCriterion:
    """Termination rule: quiet window on actions and opinion residuals, with a
    hard step cap."""

    max_steps: int
    opinion_tol: float = DEFAULT_OPINION_TOL
    window: int | None = None

    def __post_init__(self) -> None:
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if self.opinion_tol <= 0.0:
            raise ValueError("opinion_tol must be positive")
        if self.window is not None and not 1 <= self.window <= self.max_steps:
            raise ValueError("window must satisfy 1 <= window <= max_steps")


@dataclass(frozen=True)
class Trace:
    """Full record of one run: states[t] is the state before step t+1, so
    ``states`` has one more entry than ``active`` and ``deltas``."""

    states: tuple[PopulationState, ...]
    active: tuple[frozenset, ...]
    deltas: tuple[dict, ...]
    converged: bool
    reason: str  # "converged" | "max_steps" | "schedule_exhausted"
    schedule_kind: str
    seed: int | None
    window_used: int | None
    realized_cover: int | None
    fixed_point_gap: float | None
    params: AgentParams
    net: TwoLayerNetwork

    @property
    def steps(self) -> int:
        return len(self.active)

    def final(self) -> PopulationState:
        return self.states[-1]

    def last_action_change(self) -> int:
        """Index of the last step whose action profile differs from its
        predecessor's; 0 when actions never change."""
        last = 0
        for t in range(1, len(self.states)):
            if not np.array_equal(self.states[t].actions, self.states[t - 1].actions):
                last = t
        return last


def simulate(
    z0: PopulationState,
    net: TwoLayerNetwork,
    params: AgentParams,
    schedule: ActivationSchedule,
    stop: StopCriterion,
    tie_tol: float = 0.0,
) -> Trace:
    """Run the engine until the stop criterion fires.

    Convergence means: no action changed and every opinion moved less than
    ``stop.opinion_tol`` throughout the trailing window.  For round-robin the
    window defaults to the certified bound n; for uniform-random it is
    max(ceil(n ln n), realized cover bound), and no convergence is declared
    before every agent has been active at least once.  When the run converges
    the terminal opinions are compared against the exact opinion fixed point
    for the terminal actions, recorded as ``fixed_point_gap``.
    """
    n = z0.n
    if net.n != n or params.n != n or schedule.n != n:
        raise ValueError("state, network, params, and schedule sizes must agree")

    states = [z0]
    active_log: list[frozenset] = []
    delta_log: list[dict] = []

    last_seen = np.full(n, -1, dtype=int)
    realized_cover: int | None = None
    last_action_change = -1
    last_big_residual = -1

    fallback_window = max(1, math.ceil(n * math.log(max(n, 2))))
    reason = "max_steps"
    window_used: int | None = None

    stream = schedule.iter_sets()
    z = z0
    for t in range(stop.max_steps):
        try:
            active = next(stream)
        except StopIteration:
            reason = "schedule_exhausted"
            break
        z_next, deltas = _update(z, sorted(active), net, params, tie_tol)
        states.append(z_next)
        active_log.append(active)
        delta_log.append(deltas)

        if not np.array_equal(z_next.actions, z.actions):
            last_action_change = t
        residual = (
            float(np.max(np.abs(z_next.opinions - z.opinions))) if active else 0.0
        )
        if residual >= stop.opinion_tol:
            last_big_residual = t

        for i in active:
            last_seen[i] = t
        covered = bool(np.all(last_seen >= 0))
        if covered:
            span = t - int(last_seen.min()) + 1
            realized_cover = span if realized_cover is None else max(realized_cover, span)

        if stop.window is not None:
            window = stop.window
        elif schedule.persistence is not None:
            window = schedule.persistence
        else:
            if not covered:
                z = z_next
                continue
            window = max(fallback_window, realized_cover or 0)
        window_used = window

        quiet_since = max(last_action_change, last_big_residual)
        if t - quiet_since >= window:
            reason = "converged"
            z = z_next
            break
        z = z_next

    converged = reason == "converged"
    gap: float | None = None
    if converged:
        from .oracle import opinion_fixed_point  # deferred: oracle imports dynamics

        y_star = opinion_fixed_point(states[-1].actions, net, params)
        gap = float(np.max(np.abs(states[-1].opinions - y_star)))

    return Trace(
        states=tuple(states),
        active=tuple(active_log),
        deltas=tuple(delta_log),
        converged=converged,
        reason=reason,
        schedule_kind=schedule.kind,
        seed=schedule.seed,
        window_used=window_used,
        realized_cover=realized_cover,
        fixed_point_gap=gap,
        params=params,
        net=net,
    )


# --- trace export ------------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_trace_jsonl(trace: Trace, path: str) -> None:
    """One record per step (plus a t=0 record); agent ids are 1-based."""
    lines = []
    first = {
        "t": 0,
        "active": [],
        "x": trace.states[0].actions.tolist(),
        "y": trace.states[0].opinions.tolist(),
        "delta": {},
    }
    lines.append(json.dumps(first, sort_keys=True))
    for t in range(trace.steps):
        record = {
            "t": t + 1,
            "active": sorted(i + 1 for i in trace.active[t]),
            "x": trace.states[t + 1].actions.tolist(),
            "y": trace.states[t + 1].opinions.tolist(),
            "delta": {str(i + 1): d for i, d in sorted(trace.deltas[t].items())},
        }
        lines.append(json.dumps(record, sort_keys=True))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_trace_jsonl(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def write_trace_csv(trace: Trace, path: str) -> None:
    """Compact per-step table: t, x_1..x_n, y_1..y_n."""
    n = trace.states[0].n
    rows = []
    header = ["t"] + [f"x_{i + 1}" for i in range(n)] + [f"y_{i + 1}" for i in range(n)]
    rows.append(",".join(header))
    for t, state in enumerate(trace.states):
        cells = [str(t)]
        cells += [str(int(v)) for v in state.actions]
        cells += [f"{v:.17g}" for v in state.opinions]
        rows.append(",".join(cells))
    _atomic_write(path, "\n".join(rows) + "\n")


def read_trace_csv(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))
