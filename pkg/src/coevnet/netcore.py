"""Core data model: weighted influence graphs, two-layer networks, agent
parameters, joint action/opinion states, alignment partitions, and the
cohesiveness measure on which every checker builds.

All types are immutable after construction and safe to share across threads.
Agents are indexed 0..n-1 in code; file formats and CLI output use 1..n.
"""
from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

ROW_SUM_TOL = 1e-12
CONSENSUS_OPINION_TOL = 1e-9
_OPINION_RANGE_TOL = 1e-9


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WeightedGraph:
    """Dense non-negative influence matrix; entry (i, j) weighs j's influence on i.

    ``symmetric`` is derived at construction and true only for bitwise equality
    of the matrix with its transpose, so a True flag is an exact guarantee.
    """

    weights: np.ndarray
    row_stochastic: bool = True
    symmetric: bool = field(init=False)

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise ValueError(f"weights must be a square matrix, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0.0):
            raise ValueError("weights must be non-negative")
        if self.row_stochastic:
            dev = np.max(np.abs(w.sum(axis=1) - 1.0))
            if dev > ROW_SUM_TOL:
                raise ValueError(
                    f"rows must sum to 1 within {ROW_SUM_TOL:g}; worst deviation {dev:.3e}"
                )
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "symmetric", bool(np.array_equal(w, w.T)))

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def row_sums(self) -> np.ndarray:
        return self.weights.sum(axis=1)


@dataclass(frozen=True)
class TwoLayerNetwork:
    """Pair of row-stochastic graphs on one node set: G[A] carries the actions
    agents observe, G[W] carries the opinions they exchange."""

    A: WeightedGraph
    W: WeightedGraph

    def __post_init__(self) -> None:
        if self.A.n != self.W.n:
            raise ValueError("both layers must share the node set")
        if not (self.A.row_stochastic and self.W.row_stochastic):
            raise ValueError("both layers must be row-stochastic")

    @classmethod
    def single_layer(cls, graph: WeightedGraph) -> "TwoLayerNetwork":
        return cls(A=graph, W=graph)

    @property
    def n(self) -> int:
        return self.A.n

    def same_layers(self) -> bool:
        """True when the two layers are entrywise identical."""
        return self.A.weights is self.W.weights or bool(
            np.array_equal(self.A.weights, self.W.weights)
        )


@dataclass(frozen=True)
class AgentParams:
    """Per-agent behavioural weights plus the global action bonus.

    ``lam`` weighs the action side of the payoff, ``beta`` the opinion side,
    both strictly inside (0, 1); ``eps`` is +1 for coordinating agents and -1
    for anti-coordinating agents; ``alpha`` >= 0 is the relative advantage of
    action +1.
    """

    lam: np.ndarray
    beta: np.ndarray
    eps: np.ndarray
    alpha: float = 0.0

    def __post_init__(self) -> None:
        lam = np.array(self.lam, dtype=float)
        beta = np.array(self.beta, dtype=float)
        eps = np.array(self.eps, dtype=int)
        if not (lam.ndim == beta.ndim == eps.ndim == 1):
            raise ValueError("lam, beta, eps must be 1-d vectors")
        if not (lam.size == beta.size == eps.size >= 1):
            raise ValueError("lam, beta, eps must have one entry per agent")
        if np.any(lam <= 0.0) or np.any(lam >= 1.0):
            raise ValueError("lam entries must lie strictly in (0, 1)")
        if np.any(beta <= 0.0) or np.any(beta >= 1.0):
            raise ValueError("beta entries must lie strictly in (0, 1)")
        if not np.all(np.isin(eps, (-1, 1))):
            raise ValueError("eps entries must be -1 or +1")
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise ValueError("alpha must be a finite non-negative real")
        object.__setattr__(self, "lam", _frozen(lam))
        object.__setattr__(self, "beta", _frozen(beta))
        object.__setattr__(self, "eps", _frozen(eps))
        object.__setattr__(self, "alpha", float(self.alpha))

    @classmethod
    def uniform(
        cls, n: int, lam: float, beta: float, eps: int, alpha: float = 0.0
    ) -> "AgentParams":
        """Identical parameters for all ``n`` agents."""
        return cls(
            lam=np.full(n, float(lam)),
            beta=np.full(n, float(beta)),
            eps=np.full(n, int(eps)),
            alpha=alpha,
        )

    @property
    def n(self) -> int:
        return self.lam.size

    def homogeneous(self) -> bool:
        """All lam equal, all beta equal, all eps equal."""
        return bool(
            np.all(self.lam == self.lam[0])
            and np.all(self.beta == self.beta[0])
            and np.all(self.eps == self.eps[0])
        )


@dataclass(frozen=True)
class PopulationState:
    """Joint profile: binary actions in {-1,+1} and opinions in [-1,+1]."""

    actions: np.ndarray
    opinions: np.ndarray

    def __post_init__(self) -> None:
        x = np.array(self.actions, dtype=int)
        y = np.array(self.opinions, dtype=float)
        if x.ndim != 1 or y.ndim != 1 or x.size != y.size or x.size < 1:
            raise ValueError("actions and opinions must be 1-d vectors of equal size")
        if not np.all(np.isin(x, (-1, 1))):
            raise ValueError("actions must be exactly -1 or +1")
        if np.any(np.abs(y) > 1.0 + _OPINION_RANGE_TOL) or not np.all(np.isfinite(y)):
            raise ValueError("opinions must lie in [-1, +1]")
        # Round-off from row sums within 1e-12 may overshoot by ~1e-13; clip it away.
        y = np.clip(y, -1.0, 1.0)
        object.__setattr__(self, "actions", _frozen(x))
        object.__setattr__(self, "opinions", _frozen(y))

    @property
    def n(self) -> int:
        return self.actions.size


@dataclass(frozen=True)
class Partition:
    """The four action/opinion-sign classes, disjoint and covering all agents.

    Opinion sign uses sgn(0) = 0, so an agent with zero opinion is classed by
    its action: with action +1 into ``pos_aligned``, with -1 into
    ``neg_aligned``.
    """

    n: int
    pos_aligned: frozenset  # action +1, opinion sign >= 0
    neg_misaligned: frozenset  # action -1, opinion sign > 0
    pos_misaligned: frozenset  # action +1, opinion sign < 0
    neg_aligned: frozenset  # action -1, opinion sign <= 0

    def __post_init__(self) -> None:
        sets = (
            self.pos_aligned,
            self.neg_misaligned,
            self.pos_misaligned,
            self.neg_aligned,
        )
        total = sum(len(s) for s in sets)
        union = frozenset().union(*sets)
        if total != self.n or union != frozenset(range(self.n)):
            raise ValueError("partition classes must be disjoint and cover 0..n-1")

    def aligned_pair(self) -> tuple[frozenset, frozenset]:
        """(positive camp, negative camp) of the aligned agents."""
        return self.pos_aligned, self.neg_aligned


def partition_state(z: PopulationState) -> Partition:
    """Split agents by action and opinion sign."""
    x, y = z.actions, z.opinions
    pos = x == 1
    return Partition(
        n=z.n,
        pos_aligned=frozenset(np.flatnonzero(pos & (y >= 0.0)).tolist()),
        neg_misaligned=frozenset(np.flatnonzero(~pos & (y > 0.0)).tolist()),
        pos_misaligned=frozenset(np.flatnonzero(pos & (y < 0.0)).tolist()),
        neg_aligned=frozenset(np.flatnonzero(~pos & (y <= 0.0)).tolist()),
    )


def _set_ratios(members: Iterable[int], graph: WeightedGraph) -> np.ndarray:
    idx = np.fromiter(sorted(set(members)), dtype=int, count=-1)
    n = graph.n
    if idx.size == 0:
        raise ValueError("set must be nonempty")
    if np.any(idx < 0) or np.any(idx >= n):
        raise ValueError("set members out of range")
    if idx.size == n:
        raise ValueError("set must be a strict subset of the node set")
    w = graph.weights
    totals = w[idx].sum(axis=1)
    if np.any(totals == 0.0):
        raise ValueError("every member needs positive total out-weight")
    inside = w[np.ix_(idx, idx)].sum(axis=1)
    return inside / totals


def cohesiveness(members: Iterable[int], graph: WeightedGraph) -> float:
    """Worst-case fraction of a member's weight kept inside the set.

    The set is q-cohesive exactly when the returned value is >= q.
    """
    return float(_set_ratios(members, graph).min())


def diffusiveness(members: Iterable[int], graph: WeightedGraph) -> float:
    """Best-case fraction of a member's weight kept inside the set.

    The set is q-diffusive exactly when the returned value is < q.
    """
    return float(_set_ratios(members, graph).max())


@dataclass(frozen=True)
class Classification:
    """Outcome class of a state: consensus (with sign), polarized (with the
    aligned partition, 0-based and sorted), or mixed."""

    kind: str  # "consensus" | "polarized" | "mixed"
    sign: int | None = None
    partition: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    def label(self) -> str:
        if self.kind == "consensus":
            return f"consensus({'+1' if self.sign == 1 else '-1'})"
        return self.kind


def classify_state(z: PopulationState) -> Classification:
    """Consensus if all actions and opinions sit at the same pole (opinions
    within 1e-9), polarized if every agent is aligned but both camps are
    occupied, mixed otherwise."""
    x, y = z.actions, z.opinions
    for sign in (1, -1):
        if np.all(x == sign) and np.max(np.abs(y - sign)) <= CONSENSUS_OPINION_TOL:
            return Classification(kind="consensus", sign=sign)
    parts = partition_state(z)
    pos, neg = parts.aligned_pair()
    if len(pos) + len(neg) == z.n and pos and neg:
        return Classification(
            kind="polarized",
            partition=(tuple(sorted(pos)), tuple(sorted(neg))),
        )
    return Classification(kind="mixed")


@dataclass(frozen=True)
class LayerValidation:
    name: str
    n: int
    max_row_sum_deviation: float
    min_entry: float
    max_asymmetry: float

    @property
    def valid(self) -> bool:
        return self.min_entry >= 0.0 and self.max_row_sum_deviation <= ROW_SUM_TOL

    @property
    def symmetric(self) -> bool:
        return self.max_asymmetry == 0.0


@dataclass(frozen=True)
class NetworkValidation:
    layers: tuple[LayerValidation, ...]

    @property
    def valid(self) -> bool:
        return all(layer.valid for layer in self.layers)


def _validate_layer(name: str, graph: WeightedGraph) -> LayerValidation:
    w = graph.weights
    return LayerValidation(
        name=name,
        n=graph.n,
        max_row_sum_deviation=float(np.max(np.abs(w.sum(axis=1) - 1.0))),
        min_entry=float(w.min()),
        max_asymmetry=float(np.max(np.abs(w - w.T))),
    )


def validate_network(net: TwoLayerNetwork) -> NetworkValidation:
    """Pure report of row-sum deviations, negativity, and asymmetry per layer."""
    return NetworkValidation(
        layers=(_validate_layer("A", net.A), _validate_layer("W", net.W))
    )


# --- network file format -----------------------------------------------------
#
# UTF-8 text; header `n <count> layers <1|2>`; one line per directed edge
# `<A|W> <i> <j> <weight>` with 1-based node ids and 17-significant-digit
# weights; absent edges are zero.  Single-layer files set A = W.


def _atomic_write_text(path: str, text: str) -> None:
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


def _edge_lines(tag: str, w: np.ndarray) -> list[str]:
    rows, cols = np.nonzero(w)
    return [
        f"{tag} {i + 1} {j + 1} {w[i, j]:.17g}"
        for i, j in zip(rows.tolist(), cols.tolist())
    ]


def save_network(net: TwoLayerNetwork, path: str) -> None:
    """Write a network file; collapses to a single layer when A and W coincide."""
    single = net.same_layers()
    lines = [f"n {net.n} layers {1 if single else 2}"]
    if single:
        lines += _edge_lines("W", net.W.weights)
    else:
        lines += _edge_lines("A", net.A.weights)
        lines += _edge_lines("W", net.W.weights)
    _atomic_write_text(path, "\n".join(lines) + "\n")


def load_network(path: str) -> TwoLayerNetwork:
    """Read a network file; rejects malformed input and non-stochastic rows."""
    with open(path, "r", encoding="utf-8") as handle:
        raw = [line.strip() for line in handle]
    lines = [line for line in raw if line]
    if not lines:
        raise ValueError(f"{path}: empty network file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "n" or head[2] != "layers":
        raise ValueError(f"{path}: malformed header {lines[0]!r}")
    n, layers = int(head[1]), int(head[3])
    if n < 1 or layers not in (1, 2):
        raise ValueError(f"{path}: invalid header values {lines[0]!r}")
    mats = {"A": np.zeros((n, n)), "W": np.zeros((n, n))}
    seen: set[tuple[str, int, int]] = set()
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 4 or parts[0] not in ("A", "W"):
            raise ValueError(f"{path}: malformed edge line {line!r}")
        tag, i, j, weight = parts[0], int(parts[1]) - 1, int(parts[2]) - 1, float(parts[3])
        if layers == 1:
            tag = "W"
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"{path}: edge endpoint out of range in {line!r}")
        if weight < 0.0 or not math.isfinite(weight):
            raise ValueError(f"{path}: invalid weight in {line!r}")
        key = (tag, i, j)
        if key in seen:
            raise ValueError(f"{path}: duplicate edge {line!r}")
        seen.add(key)
        mats[tag][i, j] = weight
    w_graph = WeightedGraph(mats["W"])
    if layers == 1:
        return TwoLayerNetwork.single_layer(w_graph)
    return TwoLayerNetwork(A=WeightedGraph(mats["A"]), W=w_graph)
