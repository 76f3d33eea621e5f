"""The local probability update, its expected form, and run orchestration.

Each node adjusts its transmission probability once per frame from nothing but
its own frame statistics:

    p <- max(p_min, p + kappa(t) * v),
    v  = exp(-rho1 * avg_cost) - 1 / ((1 + avg_age) * exp(rho2)) - p.

``v`` is an unbiased (large-frame) estimate of the slope of the node's virtual
utility, so the update is a stochastic subgradient step.  With a diminishing
step size (positive, non-summable, square-summable -- e.g. kappa(t) = 1/t) the
iterates converge to the best response, and jointly to the unique fixed point
of the best-response map.

``run_learning`` iterates the update in either of two modes: *stochastic*
draws real frames from the collision channel; *expected* substitutes the
closed-form limits of the frame statistics, giving the noise-free dynamics
used for analysis (it is not implementable by a real node, whose interference
weight is unknown).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import expected_age, simulate_frame
from .model import (
    FrameObservation,
    FrameRecord,
    NodeParams,
    Trajectory,
    b_factor,
    substream,
    validate_profile,
)

__all__ = [
    "Schedule",
    "ChurnEvent",
    "GameConfig",
    "subgradient",
    "learning_update",
    "expected_drift",
    "initial_probability",
    "run_learning",
]

# Stream namespaces: frame draws vs. initial-probability draws.
_NS_FRAME = 0
_NS_INIT = 1


@dataclass(frozen=True)
class Schedule:
    """Learning-rate schedule kappa(t), t >= 1.

    ``reciprocal`` is the production choice kappa(t) = 1/t; it is positive,
    non-summable and square-summable, as convergence requires.  ``constant``
    and ``table`` exist for tests and experiments.  ``reinit_period`` restarts
    the clock every that many frames, which keeps the step size from decaying
    to uselessness in very long runs.
    """

    kind: str = "reciprocal"
    value: float = 1.0
    table: tuple[float, ...] = ()
    reinit_period: int | None = None

    def __post_init__(self):
        if self.kind not in ("reciprocal", "constant", "table"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "constant" and not 0.0 < self.value <= 1.0:
            raise ValueError(f"constant kappa must lie in (0, 1], got {self.value}")
        if self.kind == "table":
            if not self.table:
                raise ValueError("table schedule needs at least one entry")
            if any(not 0.0 < k <= 1.0 for k in self.table):
                raise ValueError("table entries must lie in (0, 1]")
        if self.reinit_period is not None and self.reinit_period < 1:
            raise ValueError(f"reinit_period must be >= 1, got {self.reinit_period}")

    def kappa(self, t: int) -> float:
        if t < 1:
            raise ValueError(f"schedule queried at t={t}; clock starts at 1")
        if self.reinit_period is not None:
            t = (t - 1) % self.reinit_period + 1
        if self.kind == "reciprocal":
            return 1.0 / t
        if self.kind == "constant":
            return self.value
        return self.table[min(t, len(self.table)) - 1]


@dataclass(frozen=True)
class ChurnEvent:
    """Roster change applied at the start of the given frame.

    ``add`` nodes join at the tail of the roster; ``remove`` nodes leave from
    the tail.  Surviving nodes keep their probabilities and positions.
    """

    frame: int
    add: tuple[NodeParams, ...] = ()
    remove: int = 0

    def __post_init__(self):
        if self.frame < 1:
            raise ValueError(f"churn frame must be >= 1, got {self.frame}")
        if self.remove < 0:
            raise ValueError(f"remove count must be >= 0, got {self.remove}")
        if self.add and self.remove:
            raise ValueError("a churn event either adds or removes nodes, not both")


@dataclass(frozen=True)
class GameConfig:
    """Everything a run needs: roster, frame length, schedule, seed, churn."""

    nodes: tuple[NodeParams, ...]
    frame_length: int = 10_000
    schedule: Schedule = field(default_factory=Schedule)
    seed: int = 0
    churn_events: tuple[ChurnEvent, ...] = ()

    def __post_init__(self):
        if self.frame_length < 1:
            raise ValueError(f"frame_length must be >= 1, got {self.frame_length}")
        if not self.nodes:
            raise ValueError("node roster must be non-empty")
        size = len(self.nodes)
        for ev in sorted(self.churn_events, key=lambda e: e.frame):
            size += len(ev.add) - ev.remove
            if size < 1:
                raise ValueError(
                    f"churn at frame {ev.frame} empties the roster"
                )


def subgradient(obs: FrameObservation, p: float, params: NodeParams) -> float:
    """Per-frame update direction from one node's own observed statistics."""
    return (
        math.exp(-params.rho1 * obs.avg_cost)
        - 1.0 / ((1.0 + obs.avg_age) * math.exp(params.rho2))
        - p
    )


def learning_update(p: float, v: float, kappa: float, p_min: float) -> float:
    """One clamped step: max(p_min, p + kappa * v)."""
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    return max(p_min, p + kappa * v)


def expected_drift(probs: Sequence[float] | np.ndarray, node: int, params: NodeParams) -> float:
    """Large-frame mean of the update direction: exp(-alpha*p) - p/b - p.

    Equals the slope of the node's virtual utility in its own probability, so
    the expected dynamics climb that utility.
    """
    p = float(np.asarray(probs, dtype=float)[node])
    b = b_factor(probs, node, params.rho2)
    return math.exp(-params.alpha * p) - p / b - p


def _expected_observation(probs: np.ndarray, node: int, params: NodeParams) -> FrameObservation:
    """Frame statistics replaced by their large-frame limits (expected mode)."""
    p = float(probs[node])
    return FrameObservation(
        avg_cost=params.cost * p,
        avg_age=expected_age(probs, node),
        successes=0,
        transmissions=0,
    )


def run_learning(
    config: GameConfig,
    frames: int,
    mode: str = "stochastic",
    reinit_on_churn: bool = False,
    initial_probs: np.ndarray | None = None,
) -> Trajectory:
    """Iterate the update for ``frames`` frames, applying churn events.

    Initial probabilities (and those of joining nodes) are drawn uniformly
    from (p_min, 1) on per-(frame, position) streams, so edits to the churn
    scenario never perturb other nodes' draws.  ``initial_probs`` overrides
    the starting profile (diagnostics and fixed-point checks).
    ``reinit_on_churn`` restarts the learning-rate clock whenever the roster
    changes.
    """
    if mode not in ("stochastic", "expected"):
        raise ValueError(f"mode must be 'stochastic' or 'expected', got {mode!r}")
    if frames < 1:
        raise ValueError(f"frames must be >= 1, got {frames}")
    events = {ev.frame: ev for ev in config.churn_events}
    if len(events) != len(config.churn_events):
        raise ValueError("at most one churn event per frame")

    nodes = list(config.nodes)
    if initial_probs is not None:
        probs = np.asarray(initial_probs, dtype=float).copy()
    else:
        probs = np.array(
            [
                initial_probability(config.seed, 1, pos, node.p_min)
                for pos, node in enumerate(nodes)
            ]
        )
    trajectory = Trajectory()
    clock = 0
    for frame in range(1, frames + 1):
        ev = events.get(frame)
        if ev is not None:
            if ev.remove:
                if ev.remove >= len(nodes) and not ev.add:
                    raise ValueError(f"churn at frame {frame} empties the roster")
                nodes = nodes[: len(nodes) - ev.remove]
                probs = probs[: len(probs) - ev.remove]
            for node in ev.add:
                nodes.append(node)
                probs = np.append(
                    probs,
                    initial_probability(config.seed, frame, len(nodes) - 1, node.p_min),
                )
            if reinit_on_churn:
                clock = 0
        if not nodes:
            raise ValueError(f"empty roster at frame {frame}")
        clock += 1
        kappa = config.schedule.kappa(clock)

        validate_profile(probs, nodes)
        if mode == "stochastic":
            streams = [
                substream(config.seed, _NS_FRAME, frame, pos)
                for pos in range(len(nodes))
            ]
            observations = tuple(
                simulate_frame(probs, nodes, config.frame_length, streams)
            )
        else:
            observations = tuple(
                _expected_observation(probs, pos, node)
                for pos, node in enumerate(nodes)
            )
        trajectory.records.append(
            FrameRecord(
                frame=frame,
                probs=probs.copy(),
                observations=observations,
                roster=len(nodes),
            )
        )
        probs = np.array(
            [
                learning_update(probs[pos], subgradient(obs, probs[pos], node), kappa, node.p_min)
                for pos, (node, obs) in enumerate(zip(nodes, observations))
            ]
        )
    trajectory.final_probs = probs
    return trajectory


def initial_probability(seed: int, frame: int, position: int, p_min: float) -> float:
    """Uniform draw from (p_min, 1) on the joining node's own stream."""
    gen = substream(seed, _NS_INIT, frame, position)
    return float(gen.uniform(p_min, 1.0))
