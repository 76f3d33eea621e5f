"""Collision-free round-robin baseline with the same probability update.

Slots are pre-assigned to nodes in cyclic order by roster position, so no two
nodes can ever transmit in the same slot and every transmission is delivered.
Each node still gates its allotted slots with its learned probability, updated
per frame from its own round-robin statistics (per-slot cost average and age
over all slots).  The scheme is a theoretical comparator only: nothing in the
distributed setting could hand out the slot assignment.
"""

from __future__ import annotations

import numpy as np

from .channel import age_sequence
from .learning import GameConfig, initial_probability, learning_update, subgradient
from .model import FrameObservation, FrameRecord, Trajectory, substream

__all__ = ["simulate_rr", "rr_expected_age", "rr_expected_cost"]

_NS_FRAME = 0


def rr_expected_age(p: float, n: int) -> float:
    """Stationary time-averaged age of round-robin at transmit probability p.

    Deliveries happen at allotted slots with probability p, so the gap between
    deliveries is n*G slots with G geometric(p).  Averaging the sawtooth age
    over a renewal cycle gives (E[T^2] - E[T]) / (2 E[T]) with T = n*G, i.e.

        (n * (2 - p) / p - 1) / 2.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"probability must lie in (0, 1], got {p}")
    return (n * (2.0 - p) / p - 1.0) / 2.0


def rr_expected_cost(p: float, cost: float, n: int) -> float:
    """Per-slot average cost of round-robin: only 1/n of slots are allotted."""
    return cost * p / n


def simulate_rr(
    config: GameConfig, frames: int, initial_probs: np.ndarray | None = None
) -> Trajectory:
    """Run the round-robin scheme for ``frames`` frames.

    Node at position ``pos`` may transmit only in slots i with
    (i - 1) mod n == pos (1-based slots).  Uses the same per-(frame, node)
    streams and the same update rule as the collision-channel run, so a
    single-node round-robin run is bit-identical to the unconstrained one.
    ``initial_probs`` overrides the random start (diagnostics; entries may sit
    on the test-only boundary p = 1).
    """
    if config.churn_events:
        raise ValueError("round-robin mode does not support churn events")
    if frames < 1:
        raise ValueError(f"frames must be >= 1, got {frames}")
    nodes = config.nodes
    n = len(nodes)
    m = config.frame_length
    slot_owner = np.arange(m) % n

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
    for frame in range(1, frames + 1):
        kappa = config.schedule.kappa(frame)
        tx = np.zeros((n, m), dtype=bool)
        for pos, node in enumerate(nodes):
            gen = substream(config.seed, _NS_FRAME, frame, pos)
            draws = gen.random(m) < probs[pos]
            tx[pos] = draws & (slot_owner == pos)
        # Allotments are disjoint, so a slot can never carry two transmitters.
        per_slot = tx.sum(axis=0)
        if np.any(per_slot > 1):
            raise AssertionError("round-robin slot carried more than one transmitter")
        observations = []
        for pos, node in enumerate(nodes):
            n_tx = int(tx[pos].sum())
            observations.append(
                FrameObservation(
                    avg_cost=node.cost * n_tx / m,
                    avg_age=float(age_sequence(tx[pos]).mean()),
                    successes=n_tx,
                    transmissions=n_tx,
                )
            )
        trajectory.records.append(
            FrameRecord(frame=frame, probs=probs.copy(), observations=tuple(observations), roster=n)
        )
        probs = np.array(
            [
                learning_update(probs[pos], subgradient(obs, probs[pos], node), kappa, node.p_min)
                for pos, (node, obs) in enumerate(zip(nodes, observations))
            ]
        )
    trajectory.final_probs = probs
    return trajectory
