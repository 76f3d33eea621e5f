"""One-frame simulation of the slotted collision channel, plus its closed forms.

A slot delivers a packet iff exactly one node transmits in it.  Age counts
slots since the owner's last delivered packet, resets to zero on success, and
restarts from zero at each frame boundary.  For a frozen profile the per-node
age sequence is a Markov chain whose stationary law is geometric, which gives
exact large-frame limits for both frame statistics.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .model import FrameObservation, NodeParams, success_probability

__all__ = [
    "age_sequence",
    "draw_transmissions",
    "sole_transmitter",
    "simulate_frame",
    "expected_cost",
    "expected_age",
    "age_stationary_pmf",
]


def age_sequence(success: np.ndarray) -> np.ndarray:
    """Ages at slots 1..m for one node, from the per-slot success indicator.

    age(i) = 0 if slot i delivered, else age(i-1) + 1, with age 0 entering
    the frame.
    """
    success = np.asarray(success, dtype=bool)
    idx = np.arange(1, success.size + 1)
    last_delivery = np.maximum.accumulate(np.where(success, idx, 0))
    return idx - last_delivery


def draw_transmissions(
    probs: np.ndarray, frame_length: int, streams: Sequence[np.random.Generator]
) -> np.ndarray:
    """Bernoulli transmit decisions, one row per node, one independent stream each."""
    tx = np.empty((len(probs), frame_length), dtype=bool)
    for row, (p, gen) in enumerate(zip(probs, streams)):
        tx[row] = gen.random(frame_length) < p
    return tx


def sole_transmitter(tx: np.ndarray) -> np.ndarray:
    """Mask of slots in which exactly one node transmitted (the success slots)."""
    return tx.sum(axis=0) == 1


def simulate_frame(
    probs: np.ndarray,
    nodes: Sequence[NodeParams],
    frame_length: int,
    streams: Sequence[np.random.Generator],
) -> list[FrameObservation]:
    """Simulate one frame and return each node's realized statistics.

    All transmit decisions for a slot are drawn before adjudication, so
    simultaneous transmissions collide.  Deterministic given the streams.
    """
    if frame_length < 1:
        raise ValueError(f"frame_length must be >= 1, got {frame_length}")
    tx = draw_transmissions(probs, frame_length, streams)
    sole = sole_transmitter(tx)
    out = []
    for row, node in enumerate(nodes):
        delivered = tx[row] & sole
        n_tx = int(tx[row].sum())
        out.append(
            FrameObservation(
                avg_cost=node.cost * n_tx / frame_length,
                avg_age=float(age_sequence(delivered).mean()),
                successes=int(delivered.sum()),
                transmissions=n_tx,
            )
        )
    return out


def expected_cost(p: float, cost: float) -> float:
    """Large-frame limit of the average transmission cost: cost * p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return cost * p


def expected_age(probs: Sequence[float] | np.ndarray, node: int) -> float:
    """Large-frame limit of the time-averaged age: (1 - nu) / nu.

    ``nu`` is the node's per-slot success probability; it must be positive,
    otherwise the age is unbounded.
    """
    nu = success_probability(probs, node)
    if nu <= 0.0:
        raise ValueError("degenerate profile: success probability is 0")
    return (1.0 - nu) / nu


def age_stationary_pmf(nu: float, k: int | np.ndarray) -> float | np.ndarray:
    """Stationary law of the age chain: P(age = k) = nu * (1 - nu)^k, k >= 0."""
    if not 0.0 < nu < 1.0:
        raise ValueError(f"success probability must lie in (0, 1), got {nu}")
    return nu * (1.0 - nu) ** np.asarray(k)
