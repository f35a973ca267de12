"""Ground-truth machinery: exact opinion fixed points for frozen actions,
exhaustive equilibrium enumeration for small populations, and cross-validation
of simulation output against both.

The enumeration is the independent oracle for the analytic Nash tests: a
candidate is kept when the discriminant of every agent points at (or ties
with) the agent's action at the exact opinion fixed point, and every kept
candidate is asserted to pass the payoff-based Nash check.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import analysis
from .dynamics import Trace, discriminants
from .netcore import AgentParams, PopulationState, TwoLayerNetwork

FIXED_POINT_RESIDUAL_TOL = 1e-12
DEFAULT_N_MAX = 20


def _system_matrix(net: TwoLayerNetwork, params: AgentParams) -> np.ndarray:
    n = net.n
    return np.eye(n) - (1.0 - params.lam)[:, None] * net.W.weights


def opinion_fixed_point(
    x: np.ndarray, net: TwoLayerNetwork, params: AgentParams
) -> np.ndarray:
    """Unique opinions left invariant by the opinion update when actions are
    frozen at ``x``; solved directly, residual at most 1e-12."""
    x = np.asarray(x, dtype=float)
    if x.shape != (net.n,):
        raise ValueError("action profile size must match the network")
    m = _system_matrix(net, params)
    try:
        y = np.linalg.solve(m, params.lam * x)
    except np.linalg.LinAlgError as exc:  # unreachable for row-stochastic W, lam>0
        raise ArithmeticError("opinion fixed-point system is singular") from exc
    residual = np.max(np.abs(y - ((1.0 - params.lam) * (net.W.weights @ y) + params.lam * x)))
    if residual > FIXED_POINT_RESIDUAL_TOL:
        raise ArithmeticError(f"fixed-point residual {residual:.3e} above tolerance")
    return y


def iterate_opinions(
    x: np.ndarray,
    net: TwoLayerNetwork,
    params: AgentParams,
    y0: np.ndarray,
    sweeps: int,
) -> np.ndarray:
    """Plain synchronous opinion iteration with frozen actions; converges to
    the fixed point at geometric rate bounded by max(1 - lam).  Kept as an
    independent cross-check of the direct solve."""
    y = np.asarray(y0, dtype=float).copy()
    x = np.asarray(x, dtype=float)
    for _ in range(sweeps):
        y = (1.0 - params.lam) * (net.W.weights @ y) + params.lam * x
    return y


@dataclass(frozen=True)
class EquilibriumCandidate:
    """An action profile with its exact opinion fixed point.

    ``consistent`` means no agent's discriminant contradicts its action
    (zero discriminants impose nothing, matching the inertia rule);
    ``marginal`` flags candidates kept only through such zero ties.
    """

    x: np.ndarray
    y_star: np.ndarray
    delta: np.ndarray
    consistent: bool
    marginal: bool


def candidate(
    net: TwoLayerNetwork, params: AgentParams, x: np.ndarray
) -> EquilibriumCandidate:
    """Build the equilibrium candidate for one action profile."""
    x = np.asarray(x, dtype=int)
    y_star = opinion_fixed_point(x, net, params)
    state = PopulationState(actions=x, opinions=y_star)
    delta = discriminants(state, net, params)
    bad = np.any((delta > 0.0) & (x == -1)) or np.any((delta < 0.0) & (x == 1))
    marginal = bool(np.any(delta == 0.0))
    return EquilibriumCandidate(
        x=x, y_star=y_star, delta=delta, consistent=not bad, marginal=marginal
    )


def _profiles(n: int) -> np.ndarray:
    """All 2^n action profiles, lexicographic with -1 < +1 and agent 0 most
    significant."""
    codes = np.arange(2 ** n, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return (2 * bits - 1).astype(int)


def enumerate_equilibria(
    net: TwoLayerNetwork,
    params: AgentParams,
    n_max: int = DEFAULT_N_MAX,
) -> list:
    """All consistent candidates over every action profile, in lexicographic
    profile order; every returned candidate also passes the payoff-based Nash
    check (asserted)."""
    n = net.n
    if n > n_max:
        raise ValueError(f"enumeration supports at most n_max={n_max} agents, got {n}")
    solve_map = np.linalg.solve(_system_matrix(net, params), np.diag(params.lam))
    a_t = net.A.weights.T
    w_t = net.W.weights.T
    c1 = params.eps * params.lam * (1.0 - params.beta) / 2.0
    c2 = 2.0 * (1.0 - params.lam) * params.lam * params.beta

    kept: list[EquilibriumCandidate] = []
    profiles = _profiles(n)
    block = 1 << 14
    for start in range(0, profiles.shape[0], block):
        xs = profiles[start : start + block].astype(float)
        ys = xs @ solve_map.T
        bracket = 2.0 * xs + params.alpha * (1.0 + xs)
        deltas = c1 * (bracket @ a_t) + c2 * (ys @ w_t)
        # Conservative pre-filter: only discard clear violations, so profiles
        # in the round-off band get the exact per-profile decision below.
        guard = 1e-12
        bad = np.any((deltas > guard) & (xs == -1.0), axis=1) | np.any(
            (deltas < -guard) & (xs == 1.0), axis=1
        )
        for row in np.flatnonzero(~bad):
            x = profiles[start + row]
            cand = candidate(net, params, x)
            if not cand.consistent:
                continue
            report = analysis.is_nash(
                PopulationState(actions=cand.x, opinions=cand.y_star), net, params
            )
            assert report.holds, (
                f"consistent candidate {x.tolist()} fails the Nash check "
                f"(worst slack {report.worst():.3e})"
            )
            kept.append(cand)
    return kept


def equilibria_to_json(candidates: list) -> str:
    records = [
        {"x": c.x.tolist(), "y": c.y_star.tolist(), "marginal": c.marginal}
        for c in candidates
    ]
    return json.dumps(records, sort_keys=True)


@dataclass(frozen=True)
class CrossValidation:
    ok: bool
    issues: tuple
    membership_checked: bool
    opinion_gap: float


def cross_validate(
    trace: Trace,
    net: TwoLayerNetwork,
    params: AgentParams,
    n_max: int = DEFAULT_N_MAX,
    opinion_tol: float = 1e-8,
) -> CrossValidation:
    """Check a converged trace against the oracle: terminal opinions must match
    the exact fixed point, and for populations small enough to enumerate the
    terminal action profile must be a consistent candidate (profile
    consistency is exactly membership in the enumeration)."""
    if not trace.converged:
        raise ValueError("cross-validation requires a converged trace")
    final = trace.final()
    issues: list[str] = []
    y_star = opinion_fixed_point(final.actions, net, params)
    gaps = np.abs(final.opinions - y_star)
    gap = float(gaps.max())
    if gap > opinion_tol:
        for i in np.flatnonzero(gaps > opinion_tol):
            issues.append(
                f"agent {i + 1}: opinion {final.opinions[i]:.12g} is {gaps[i]:.3e} "
                f"away from the fixed point {y_star[i]:.12g}"
            )
    membership_checked = net.n <= n_max
    if membership_checked and not candidate(net, params, final.actions).consistent:
        issues.append("terminal action profile is not an equilibrium candidate")
    return CrossValidation(
        ok=not issues,
        issues=tuple(issues),
        membership_checked=membership_checked,
        opinion_gap=gap,
    )
