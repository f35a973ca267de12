"""Payoff evaluation, analytic best responses, Nash-equilibrium verification,
the ordinal potential for anti-coordinating populations, the seven condition
checkers, and the (beta, lambda) contour functions behind them.

Checker ids (also the CLI vocabulary): thm2, thm3, thm5, thm6, thm7, eq22.
Every checker reports per-condition margins; ``applicable`` is false whenever
a prerequisite fails, and then the verdict can never be "holds".

All operations are pure functions of immutable inputs; contour cells are
independent and safe to evaluate in parallel.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .netcore import (
    AgentParams,
    Partition,
    PopulationState,
    TwoLayerNetwork,
    partition_state,
)

NASH_TOL = 1e-10

CONTOUR_FUNCTIONS = ("thm3_vp", "thm3_vn", "thm5_rhs", "thm7_gap", "coo_pol_rhs")


# --- payoffs and best responses ----------------------------------------------


def payoff(
    i: int,
    candidate: tuple,
    z: PopulationState,
    net: TwoLayerNetwork,
    params: AgentParams,
) -> float:
    """Payoff agent i would earn by playing ``candidate`` = (action, opinion)
    while everyone else keeps their profile from ``z``.

    Index i inside the sums refers to the candidate itself, so the opinion
    mismatch self-term vanishes and a self-loop on the action layer rewards
    the candidate action.
    """
    x_hat, y_hat = int(candidate[0]), float(candidate[1])
    if x_hat not in (-1, 1):
        raise ValueError("candidate action must be -1 or +1")
    if abs(y_hat) > 1.0:
        raise ValueError("candidate opinion must lie in [-1, 1]")
    xj = z.actions.astype(float).copy()
    yj = z.opinions.copy()
    xj[i] = x_hat
    yj[i] = y_hat
    a = net.A.weights[i]
    w = net.W.weights[i]
    alpha = params.alpha
    coordination = (
        params.eps[i]
        * params.lam[i]
        * (1.0 - params.beta[i])
        / 4.0
        * float(a @ ((1.0 - x_hat) * (1.0 - xj) + (1.0 + alpha) * (1.0 + x_hat) * (1.0 + xj)))
    )
    social = -0.5 * (1.0 - params.lam[i]) * params.beta[i] * float(w @ (y_hat - yj) ** 2)
    consistency = -0.5 * params.lam[i] * params.beta[i] * (y_hat - x_hat) ** 2
    return coordination + social + consistency


def _branch_values(
    z: PopulationState, net: TwoLayerNetwork, params: AgentParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Best payoff and optimal opinion of every agent for each candidate
    action, holding everyone else fixed at ``z``.

    Returns (f_plus, f_minus, y_plus, y_minus).  The optimal opinion solves
    the first-order condition of the concave opinion terms, clipped to
    [-1, 1]; self-loop weights are excluded from the deviator's own sums.
    """
    x = z.actions.astype(float)
    y = z.opinions
    A = net.A.weights
    W = net.W.weights
    lam, beta, eps, alpha = params.lam, params.beta, params.eps, params.alpha

    diag_a = np.diag(A)
    diag_w = np.diag(W)
    sa = A.sum(axis=1) - diag_a
    ma = A @ x - diag_a * x
    sw = W.sum(axis=1) - diag_w
    sig = W @ y - diag_w * y
    qw = W @ (y * y) - diag_w * (y * y)

    c1 = eps * lam * (1.0 - beta) / 4.0
    coord_plus = c1 * (2.0 * (1.0 + alpha) * (sa + ma) + diag_a * 4.0 * (1.0 + alpha))
    coord_minus = c1 * (2.0 * (sa - ma) + diag_a * 4.0)

    denom = (1.0 - lam) * sw + lam

    def branch(action: float) -> tuple[np.ndarray, np.ndarray]:
        y_opt = np.clip(((1.0 - lam) * sig + lam * action) / denom, -1.0, 1.0)
        social = -0.5 * (1.0 - lam) * beta * (y_opt * y_opt * sw - 2.0 * y_opt * sig + qw)
        consistency = -0.5 * lam * beta * (y_opt - action) ** 2
        return social + consistency, y_opt

    pen_plus, y_plus = branch(1.0)
    pen_minus, y_minus = branch(-1.0)
    return coord_plus + pen_plus, coord_minus + pen_minus, y_plus, y_minus


def _actual_payoffs(
    z: PopulationState, net: TwoLayerNetwork, params: AgentParams
) -> np.ndarray:
    """Payoff of every agent at the profile it is actually playing."""
    x = z.actions.astype(float)
    y = z.opinions
    A = net.A.weights
    W = net.W.weights
    lam, beta, eps, alpha = params.lam, params.beta, params.eps, params.alpha
    sa = A.sum(axis=1)
    ma = A @ x
    coordination = (
        eps
        * lam
        * (1.0 - beta)
        / 4.0
        * ((1.0 - x) * (sa - ma) + (1.0 + alpha) * (1.0 + x) * (sa + ma))
    )
    quad = (W * (y[:, None] - y[None, :]) ** 2).sum(axis=1)
    social = -0.5 * (1.0 - lam) * beta * quad
    consistency = -0.5 * lam * beta * (y - x) ** 2
    return coordination + social + consistency


def best_response_set(
    i: int,
    z: PopulationState,
    net: TwoLayerNetwork,
    params: AgentParams,
    tie_tol: float = 0.0,
) -> tuple:
    """Maximising (action, opinion) pairs for agent i against ``z``.

    Returns one pair, or both branch optima when their payoffs tie within
    ``tie_tol`` (ordered action -1 first on ties).
    """
    f_plus, f_minus, y_plus, y_minus = _branch_values(z, net, params)
    fp, fm = float(f_plus[i]), float(f_minus[i])
    if abs(fp - fm) <= tie_tol:
        return ((-1, float(y_minus[i])), (1, float(y_plus[i])))
    if fp > fm:
        return ((1, float(y_plus[i])),)
    return ((-1, float(y_minus[i])),)


@dataclass(frozen=True)
class NashReport:
    holds: bool
    slack: np.ndarray  # payoff of the played profile minus the best deviation
    tol: float

    def worst(self) -> float:
        return float(self.slack.min())


def is_nash(
    z: PopulationState,
    net: TwoLayerNetwork,
    params: AgentParams,
    tol: float = NASH_TOL,
) -> NashReport:
    """Whether every agent already plays a best response, within payoff ``tol``."""
    f_plus, f_minus, _, _ = _branch_values(z, net, params)
    best = np.maximum(f_plus, f_minus)
    slack = _actual_payoffs(z, net, params) - best
    slack.setflags(write=False)
    return NashReport(holds=bool(np.all(slack >= -tol)), slack=slack, tol=tol)


# --- ordinal potential --------------------------------------------------------


@dataclass(frozen=True)
class PotentialValue:
    value: float
    valid: bool  # certificate meaningful: homogeneous anti-coordination, symmetric layers

    def __float__(self) -> float:
        return self.value


def potential(
    z: PopulationState, net: TwoLayerNetwork, params: AgentParams
) -> PotentialValue:
    """Ordinal potential for homogeneous anti-coordinating populations on
    symmetric layers: it rises strictly whenever a unilateral revision
    strictly improves the reviser's own payoff (then the change equals the
    payoff change divided by beta*(1-lam)).

    The value is computed for any inputs; ``valid`` flags whether the
    certificate applies.
    """
    x = z.actions.astype(float)
    y = z.opinions
    A = net.A.weights
    W = net.W.weights
    lam, beta, alpha = params.lam, params.beta, params.alpha

    eta = lam * (1.0 - beta) / (4.0 * beta * (1.0 - lam))
    pair = np.outer(1.0 - x, 1.0 - x) + (1.0 + alpha) * np.outer(1.0 + x, 1.0 + x)
    a_off = A.copy()
    np.fill_diagonal(a_off, 0.0)
    game_term = -0.5 * float(eta @ (a_off * pair).sum(axis=1))
    social_term = -0.25 * float((W * (y[:, None] - y[None, :]) ** 2).sum())
    consistency_term = -0.5 * float(np.sum(lam / (1.0 - lam) * (x - y) ** 2))
    valid = bool(
        params.homogeneous()
        and params.eps[0] == -1
        and net.A.symmetric
        and net.W.symmetric
    )
    return PotentialValue(value=game_term + social_term + consistency_term, valid=valid)


# --- condition reports ---------------------------------------------------------


@dataclass(frozen=True)
class ConditionRow:
    """One evaluated inequality: ``ok`` is the literal comparison outcome and
    ``slack`` is positive exactly when the condition is met with margin."""

    name: str
    lhs: float
    rhs: float
    ok: bool
    slack: float
    agent: int | None = None  # 0-based; serialized 1-based


@dataclass(frozen=True)
class TheoremReport:
    theorem: str
    applicable: bool
    rows: tuple = ()
    notes: tuple = ()

    @property
    def holds(self) -> bool:
        return self.applicable and all(row.ok for row in self.rows)

    @property
    def verdict(self) -> str:
        if not self.applicable:
            return "not applicable"
        return "holds" if self.holds else "fails"

    def to_dict(self) -> dict:
        per_agent = []
        for row in self.rows:
            entry = {
                "lhs": row.lhs,
                "rhs": row.rhs,
                "slack": row.slack,
                "ok": row.ok,
                "name": row.name,
            }
            if row.agent is not None:
                entry["i"] = row.agent + 1
            per_agent.append(entry)
        return {
            "theorem": self.theorem,
            "applicable": self.applicable,
            "holds": self.holds,
            "per_agent": per_agent,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _not_applicable(theorem: str, reasons: list) -> TheoremReport:
    return TheoremReport(theorem=theorem, applicable=False, notes=tuple(reasons))


def _prerequisites(
    net: TwoLayerNetwork,
    params: AgentParams,
    want_eps: int,
    *,
    require_symmetric: bool = True,
    require_same_layers: bool = False,
    require_alpha_zero: bool = False,
) -> list:
    reasons = []
    if not params.homogeneous():
        reasons.append("parameters are heterogeneous")
    elif int(params.eps[0]) != want_eps:
        kind = "coordinating (+1)" if want_eps == 1 else "anti-coordinating (-1)"
        reasons.append(f"population must be {kind}")
    if require_symmetric and not (net.A.symmetric and net.W.symmetric):
        reasons.append("layers must be symmetric")
    if require_same_layers and not net.same_layers():
        reasons.append("layers must coincide (A = W)")
    if require_alpha_zero and params.alpha != 0.0:
        reasons.append("alpha must be zero")
    return reasons


def _within_mass(w: np.ndarray, members: frozenset) -> dict:
    idx = np.fromiter(sorted(members), dtype=int)
    cols = np.zeros(w.shape[0], dtype=bool)
    cols[idx] = True
    return {int(i): float(w[i, cols].sum()) for i in idx}


# --- checkers ------------------------------------------------------------------


def check_thm2(
    z0: PopulationState, net: TwoLayerNetwork, params: AgentParams
) -> TheoremReport:
    """Consensus basin for coordinating populations: positive initial opinions,
    a cohesive +1 camp, and a diffusive -1 camp on the action layer."""
    reasons = _prerequisites(net, params, want_eps=1)
    if not np.all((z0.opinions > 0.0) & (z0.opinions <= 1.0)):
        reasons.append("initial opinions must lie in (0, 1]")
    if reasons:
        return _not_applicable("thm2", reasons)
    alpha = params.alpha
    parts = partition_state(z0)
    plus_set = parts.pos_aligned
    minus_set = parts.neg_misaligned
    q_cohesive = 1.0 / (alpha + 2.0)
    q_diffusive = (alpha + 1.0) / (alpha + 2.0)
    rows = []
    notes = []
    if plus_set:
        for i, mass in _within_mass(net.A.weights, plus_set).items():
            total = float(net.A.weights[i].sum())
            ratio = mass / total
            rows.append(
                ConditionRow(
                    name="cohesive",
                    lhs=ratio,
                    rhs=q_cohesive,
                    ok=ratio >= q_cohesive,
                    slack=ratio - q_cohesive,
                    agent=i,
                )
            )
    else:
        notes.append("+1 camp empty; cohesiveness vacuously satisfied")
    if minus_set:
        for i, mass in _within_mass(net.A.weights, minus_set).items():
            total = float(net.A.weights[i].sum())
            ratio = mass / total
            rows.append(
                ConditionRow(
                    name="diffusive",
                    lhs=ratio,
                    rhs=q_diffusive,
                    ok=ratio < q_diffusive,
                    slack=q_diffusive - ratio,
                    agent=i,
                )
            )
    else:
        notes.append("-1 camp empty; diffusiveness vacuously satisfied")
    return TheoremReport("thm2", True, tuple(rows), tuple(notes))


def thm3_vp_threshold(beta: float, lam: float) -> float:
    return max((1.0 - 2.0 * lam) / (1.0 - lam), 1.0 - (1.0 - beta) / (2.0 * (1.0 - lam * beta)))


def thm3_vn_threshold(beta: float, lam: float) -> float:
    return min(lam / (1.0 - lam), (1.0 - beta) / (2.0 * (1.0 - lam * beta)))


def check_thm3(
    z0: PopulationState, net: TwoLayerNetwork, params: AgentParams
) -> TheoremReport:
    """Polarized-to-consensus condition for coordinating populations with
    coinciding layers and no action bonus.

    Symmetry of the layer is deliberately not required: the per-row bounds
    below cannot hold on any symmetric matrix with equally sized camps, and
    the row-based induction behind the guarantee never uses symmetry.
    """
    reasons = _prerequisites(
        net, params, want_eps=1,
        require_symmetric=False, require_same_layers=True, require_alpha_zero=True,
    )
    parts = partition_state(z0)
    pos, neg = parts.aligned_pair()
    if len(pos) + len(neg) != z0.n or not pos or not neg:
        reasons.append("initial state must be polarized")
    if reasons:
        return _not_applicable("thm3", reasons)
    lam = float(params.lam[0])
    beta = float(params.beta[0])
    branch_vp = [(1.0 - 2.0 * lam) / (1.0 - lam), 1.0 - (1.0 - beta) / (2.0 * (1.0 - lam * beta))]
    branch_vn = [lam / (1.0 - lam), (1.0 - beta) / (2.0 * (1.0 - lam * beta))]
    t_vp = max(branch_vp)
    t_vn = min(branch_vn)
    notes = (
        "pos camp bound binds at branch "
        + ("(1-2*lam)/(1-lam)" if branch_vp[0] >= branch_vp[1] else "1-(1-beta)/(2*(1-lam*beta))"),
        "neg camp bound binds at branch "
        + ("lam/(1-lam)" if branch_vn[0] <= branch_vn[1] else "(1-beta)/(2*(1-lam*beta))"),
    )
    rows = []
    for i, mass in _within_mass(net.W.weights, pos).items():
        rows.append(
            ConditionRow(
                name="pos_within_above", lhs=mass, rhs=t_vp,
                ok=mass > t_vp, slack=mass - t_vp, agent=i,
            )
        )
    for i, mass in _within_mass(net.W.weights, neg).items():
        rows.append(
            ConditionRow(
                name="neg_within_below", lhs=mass, rhs=t_vn,
                ok=mass < t_vn, slack=t_vn - mass, agent=i,
            )
        )
    return TheoremReport("thm3", True, tuple(rows), notes)


def thm5_rhs(beta: float, lam: float, alpha: float = 0.0) -> float:
    return 2.0 * (1.0 - lam) * beta / ((1.0 - beta) * (1.0 + alpha))


def check_thm5(net: TwoLayerNetwork, params: AgentParams) -> TheoremReport:
    """Existence of the all-plus consensus equilibrium for anti-coordinating
    populations: every action row sum must stay below a parameter threshold
    (equal to 1 for row-stochastic layers, so the verdict is one scalar
    comparison)."""
    reasons = _prerequisites(net, params, want_eps=-1)
    if reasons:
        return _not_applicable("thm5", reasons)
    lam = float(params.lam[0])
    beta = float(params.beta[0])
    rhs = thm5_rhs(beta, lam, params.alpha)
    sums = net.A.weights.sum(axis=1)
    rows = tuple(
        ConditionRow(
            name="row_sum_below", lhs=float(s), rhs=rhs,
            ok=float(s) < rhs, slack=rhs - float(s), agent=i,
        )
        for i, s in enumerate(sums)
    )
    return TheoremReport("thm5", True, rows)


@dataclass(frozen=True)
class PartitionDegrees:
    """Within-camp row-sum extremes of the opinion layer for a two-camp split."""

    d_p_min: float
    d_p_max: float
    d_n_min: float
    d_n_max: float

    def __post_init__(self) -> None:
        for lo, hi in ((self.d_p_min, self.d_p_max), (self.d_n_min, self.d_n_max)):
            if not (0.0 <= lo <= hi <= 1.0 + 1e-9):
                raise ValueError("degrees must satisfy 0 <= min <= max <= 1")


def partition_degrees(
    partition: tuple, net: TwoLayerNetwork
) -> PartitionDegrees:
    pos, neg = (frozenset(int(i) for i in side) for side in partition)
    if not pos or not neg:
        raise ValueError("both partition sides must be nonempty")
    if pos & neg or pos | neg != frozenset(range(net.n)):
        raise ValueError("partition sides must be disjoint and cover all agents")
    w = net.W.weights
    p_mass = list(_within_mass(w, pos).values())
    n_mass = list(_within_mass(w, neg).values())
    return PartitionDegrees(
        d_p_min=min(p_mass), d_p_max=max(p_mass),
        d_n_min=min(n_mass), d_n_max=max(n_mass),
    )


def check_thm6(
    partition: tuple, net: TwoLayerNetwork, params: AgentParams
) -> TheoremReport:
    """Existence of a polarized equilibrium for anti-coordinating populations,
    stated through within-camp degree extremes.

    All three inequalities are evaluated verbatim.  The third one
    (neg_action_margin) evaluates negative on complete-bipartite splits even
    though a polarized equilibrium demonstrably exists there; the brute-force
    enumeration is the ground truth for such audits, and this checker never
    reconciles the discrepancy silently.
    """
    reasons = _prerequisites(
        net, params, want_eps=-1, require_same_layers=True, require_alpha_zero=True
    )
    if reasons:
        return _not_applicable("thm6", reasons)
    degrees = partition_degrees(partition, net)
    lam = float(params.lam[0])
    beta = float(params.beta[0])
    dpm, dpM = degrees.d_p_min, degrees.d_p_max
    dnm, dnM = degrees.d_n_min, degrees.d_n_max

    lam_bound = max(
        (dpm - dnM) / (1.0 + dpm - dnm),
        (dnM - dpm) / (1.0 + dnM - dpm),
    )
    pos_margin = (lam * (dpm + dnM - 1.0) + dpm - dnM) / (
        1.0 - (1.0 - lam) * (dpM + dnM - 1.0)
    ) + (1.0 - beta) * (1.0 - 2.0 * dpM) / (2.0 * beta * (1.0 - lam))
    neg_margin = (lam * (dnm + dpM - 1.0) + dnm - dpM) / (
        1.0 - (1.0 - lam) * (dnM + dpM - 1.0)
    ) - (1.0 - beta) * (1.0 - 2.0 * dnM) / (2.0 * beta * (1.0 - lam))

    rows = (
        ConditionRow("lambda_bound", lam, lam_bound, lam > lam_bound, lam - lam_bound),
        ConditionRow("pos_action_margin", pos_margin, 0.0, pos_margin > 0.0, pos_margin),
        ConditionRow("neg_action_margin", neg_margin, 0.0, neg_margin > 0.0, neg_margin),
    )
    notes = []
    if not rows[2].ok and rows[0].ok and rows[1].ok:
        notes.append(
            "neg_action_margin fails as printed while the other conditions hold; "
            "cross-check against the enumeration oracle before trusting this verdict"
        )
    return TheoremReport("thm6", True, rows, tuple(notes))


def thm7_bounds(beta: float, lam: float) -> tuple:
    """(lower, upper) admissible within-camp weight for partition invariance."""
    lower = (1.0 - 2.0 * lam) / (1.0 - lam)
    denom = 2.0 * beta - beta * lam - 1.0
    upper = math.nan if denom == 0.0 else 0.5 * (1.0 + beta * (1.0 - lam) / denom)
    return lower, upper


def check_thm7(
    z0: PopulationState, net: TwoLayerNetwork, params: AgentParams
) -> TheoremReport:
    """Partition invariance and polarized convergence for anti-coordinating
    populations: each camp's within-camp weight must sit inside an open
    parameter interval, separately for every member."""
    reasons = _prerequisites(
        net, params, want_eps=-1, require_same_layers=True, require_alpha_zero=True
    )
    if not reasons:
        lam = float(params.lam[0])
        beta = float(params.beta[0])
        if not beta < 1.0 / (2.0 - lam):
            reasons.append("beta must be strictly below 1/(2-lam)")
    parts = partition_state(z0)
    pos, neg = parts.aligned_pair()
    if len(pos) + len(neg) != z0.n or not pos or not neg:
        reasons.append("initial state must be polarized")
    if reasons:
        return _not_applicable("thm7", reasons)
    lower, upper = thm7_bounds(beta, lam)
    notes = []
    if not max(lower, 0.0) < upper:
        notes.append(
            f"admissible within-camp interval ({lower:.6g}, {upper:.6g}) has no "
            "overlap with [0, 1]; no network can satisfy these conditions"
        )
    rows = []
    for camp, tag in ((pos, "pos"), (neg, "neg")):
        for i, mass in _within_mass(net.W.weights, camp).items():
            rows.append(
                ConditionRow(
                    name=f"{tag}_within_above_lower", lhs=mass, rhs=lower,
                    ok=mass > lower, slack=mass - lower, agent=i,
                )
            )
            rows.append(
                ConditionRow(
                    name=f"{tag}_within_below_upper", lhs=mass, rhs=upper,
                    ok=mass < upper, slack=upper - mass, agent=i,
                )
            )
    return TheoremReport("thm7", True, tuple(rows), tuple(notes))


def coo_pol_rhs(beta: float, lam: float) -> float:
    return max(
        (1.0 - 2.0 * lam) / (1.0 - lam),
        0.5 * (1.0 + beta * (1.0 - lam) / (1.0 - beta * lam)),
    )


def check_coordination_polarized(
    z0: PopulationState, net: TwoLayerNetwork, params: AgentParams
) -> TheoremReport:
    """Polarized convergence condition for coordinating populations: both camps
    must keep more than a parameter threshold (always above 1/2) of their
    weight inside the camp."""
    reasons = _prerequisites(
        net, params, want_eps=1, require_same_layers=True, require_alpha_zero=True
    )
    parts = partition_state(z0)
    pos, neg = parts.aligned_pair()
    if len(pos) + len(neg) != z0.n or not pos or not neg:
        reasons.append("initial state must be polarized")
    if reasons:
        return _not_applicable("eq22", reasons)
    lam = float(params.lam[0])
    beta = float(params.beta[0])
    rhs = coo_pol_rhs(beta, lam)
    rows = []
    for camp, tag in ((pos, "pos"), (neg, "neg")):
        for i, mass in _within_mass(net.W.weights, camp).items():
            rows.append(
                ConditionRow(
                    name=f"{tag}_within_above", lhs=mass, rhs=rhs,
                    ok=mass > rhs, slack=mass - rhs, agent=i,
                )
            )
    return TheoremReport("eq22", True, tuple(rows))


CHECKERS = {
    "thm2": check_thm2,
    "thm3": check_thm3,
    "thm5": check_thm5,
    "thm6": check_thm6,
    "thm7": check_thm7,
    "eq22": check_coordination_polarized,
}


# --- contour functions ---------------------------------------------------------


def contour_value(function_id: str, beta: float, lam: float) -> float:
    """Scalar contour function at one (beta, lam) point, both in open (0, 1)."""
    if not (0.0 < beta < 1.0 and 0.0 < lam < 1.0):
        raise ValueError("beta and lam must lie strictly inside (0, 1)")
    if function_id == "thm3_vp":
        return thm3_vp_threshold(beta, lam)
    if function_id == "thm3_vn":
        return thm3_vn_threshold(beta, lam)
    if function_id == "thm5_rhs":
        return thm5_rhs(beta, lam, alpha=0.0)
    if function_id == "thm7_gap":
        lower, upper = thm7_bounds(beta, lam)
        return upper - lower
    if function_id == "coo_pol_rhs":
        return coo_pol_rhs(beta, lam)
    raise ValueError(f"unknown contour function {function_id!r}; "
                     f"expected one of {CONTOUR_FUNCTIONS}")


def contour_grid(function_id: str, betas: np.ndarray, lams: np.ndarray) -> np.ndarray:
    """Matrix of contour values, rows indexed by lam and columns by beta.

    Singular parameter combinations yield NaN.
    """
    betas = np.asarray(betas, dtype=float)
    lams = np.asarray(lams, dtype=float)
    out = np.empty((lams.size, betas.size))
    for r, lam in enumerate(lams):
        for c, beta in enumerate(betas):
            out[r, c] = contour_value(function_id, float(beta), float(lam))
    return out


def interior_grid(resolution: int) -> np.ndarray:
    """Uniform grid of ``resolution`` points strictly inside (0, 1)."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    return np.arange(1, resolution + 1, dtype=float) / (resolution + 1)


def contour_csv_lines(function_id: str, betas: np.ndarray, lams: np.ndarray) -> list:
    """CSV rows ``beta,lambda,value`` in row-major grid order."""
    grid = contour_grid(function_id, betas, lams)
    lines = ["beta,lambda,value"]
    for r, lam in enumerate(lams):
        for c, beta in enumerate(betas):
            value = grid[r, c]
            text = "nan" if math.isnan(value) else f"{value:.17g}"
            lines.append(f"{beta:.17g},{lam:.17g},{text}")
    return lines
