"""Domain types and the local parameter-selection rule.

Every node runs the same probabilistic transmit strategy, tuned by four
constants it picks locally: a per-transmission cost weight ``rho1``, an age
weight ``rho2``, and a probability floor ``p_min``.  ``derive_params``
implements the selection rule that makes the best-response map a contraction
for every possible network size, so the distributed dynamics have a unique
fixed point no matter how many nodes show up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "NodeParams",
    "FrameObservation",
    "FrameRecord",
    "Trajectory",
    "derive_params",
    "success_probability",
    "b_factor",
    "validate_profile",
    "substream",
]


@dataclass(frozen=True)
class NodeParams:
    """Per-node constants of the transmit strategy.

    ``alpha = cost * rho1`` is the effective cost exponent: the drift of the
    expected dynamics depends on cost only through it.
    """

    cost: float
    rho1: float
    rho2: float
    p_min: float

    def __post_init__(self):
        if not self.cost > 0:
            raise ValueError(f"cost must be positive, got {self.cost}")
        if not self.rho1 > 0:
            raise ValueError(f"rho1 must be positive, got {self.rho1}")
        if not self.rho2 > 0:
            raise ValueError(f"rho2 must be positive, got {self.rho2}")
        if not 0 < self.p_min < 1:
            raise ValueError(f"p_min must lie in (0, 1), got {self.p_min}")

    @property
    def alpha(self) -> float:
        return self.cost * self.rho1


@dataclass(frozen=True)
class FrameObservation:
    """One node's realized statistics over a single frame of ``m`` slots.

    ``avg_cost`` is cost times the fraction of slots the node transmitted in;
    ``avg_age`` is the mean of the per-slot age, with age reset to zero at the
    start of the frame.
    """

    avg_cost: float
    avg_age: float
    successes: int
    transmissions: int

    def __post_init__(self):
        if self.avg_cost < 0 or self.avg_age < 0:
            raise ValueError("frame averages cannot be negative")
        if not 0 <= self.successes <= self.transmissions:
            raise ValueError("successes must not exceed transmissions")


@dataclass(frozen=True)
class FrameRecord:
    """Snapshot of one simulated frame: the profile in force and what happened."""

    frame: int
    probs: np.ndarray
    observations: tuple[FrameObservation, ...] | None
    roster: int


@dataclass
class Trajectory:
    """Per-frame records of a run plus the post-update final profile."""

    records: list[FrameRecord] = field(default_factory=list)
    final_probs: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __len__(self) -> int:
        return len(self.records)


def derive_params(cost: float, p_global_min: float, margin: float = 0.01) -> NodeParams:
    """Pick node constants from a cost and a network-wide probability floor.

    The floor must lie in (0, 0.5).  ``rho1`` is set to its maximal admissible
    value ``-ln(2*p_global_min)/cost``, which makes ``alpha`` (and hence the
    whole probability trajectory) independent of the cost.  ``rho2`` is set
    just above the threshold that keeps the best-response map contracting for
    every roster size; ``margin`` > 0 enforces the strict inequality.

    The result satisfies ``p_min <= exp(-alpha)/2`` (with equality), so the
    probability floor never truncates the interior best response.
    """
    if not 0 < p_global_min < 0.5:
        raise ValueError(
            f"p_global_min must lie in (0, 0.5), got {p_global_min}"
        )
    if not cost > 0:
        raise ValueError(f"cost must be positive, got {cost}")
    if not margin > 0:
        raise ValueError(f"margin must be positive, got {margin}")
    alpha = -math.log(2.0 * p_global_min)
    rho1 = alpha / cost
    # The worst roster size for the contraction bound, treated as a real.
    n_star = 1.0 - 1.0 / math.log(1.0 - p_global_min)
    f_peak = (n_star - 1.0) * (1.0 - p_global_min) ** (n_star - 2.0)
    rho2 = max(0.0, math.log(f_peak / (alpha + 1.0))) + margin
    return NodeParams(cost=cost, rho1=rho1, rho2=rho2, p_min=p_global_min)


def success_probability(probs: Sequence[float] | np.ndarray, node: int) -> float:
    """Probability that a slot carries node ``node`` alone: p_l * prod_{k!=l} (1-p_k)."""
    p = np.asarray(probs, dtype=float)
    if not 0 <= node < p.size:
        raise IndexError(f"node index {node} out of range for {p.size} nodes")
    others = np.delete(p, node)
    return float(p[node] * np.prod(1.0 - others))


def b_factor(probs: Sequence[float] | np.ndarray, node: int, rho2: float) -> float:
    """Interference weight b = exp(rho2) / prod_{k!=l} (1-p_k), at least exp(rho2)."""
    p = np.asarray(probs, dtype=float)
    if not 0 <= node < p.size:
        raise IndexError(f"node index {node} out of range for {p.size} nodes")
    others = np.delete(p, node)
    if np.any(others >= 1.0):
        raise ValueError("profile has an entry at 1; interference weight diverges")
    return float(math.exp(rho2) / np.prod(1.0 - others))


def validate_profile(probs: np.ndarray, nodes: Sequence[NodeParams]) -> np.ndarray:
    """Check a transmission-probability profile against the active roster."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size != len(nodes):
        raise ValueError(
            f"profile has {p.size} entries for a roster of {len(nodes)} nodes"
        )
    for i, (pi, node) in enumerate(zip(p, nodes)):
        if not node.p_min <= pi < 1.0:
            raise ValueError(
                f"entry {i} = {pi} outside [p_min={node.p_min}, 1)"
            )
    return p


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator keyed by (seed, path).

    Streams are derived with ``SeedSequence`` spawn keys, so the draws of one
    (frame, node) pair never depend on how many other nodes exist: roster
    churn cannot shift anybody else's randomness.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=path))
