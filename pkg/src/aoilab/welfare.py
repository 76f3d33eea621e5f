"""Social utility, its maximizer, and the price of anarchy.

The system utility is the sum of the per-node virtual utilities, each
evaluated with its own interference weight.  It is strictly concave in every
single coordinate (though not jointly), so cyclic coordinate ascent with an
exact root-find per slice converges to a stationary point; multiple starts
plus the equilibrium itself guard against the lack of joint concavity.  The
price of anarchy is the ratio of the optimal system utility to the system
utility at the Nash equilibrium; since the optimum dominates and utilities
are positive, it is at least one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .game import solve_ne
from .model import NodeParams, substream

__all__ = [
    "WelfareResult",
    "system_utility",
    "system_gradient",
    "optimize_system",
    "price_of_anarchy",
]

_NS_WELFARE = 2
_MAX_SWEEPS = 10_000


@dataclass(frozen=True)
class WelfareResult:
    """Socially optimal profile, equilibrium profile, and their utility ratio."""

    p_opt: np.ndarray
    p_ne: np.ndarray
    u_opt: float
    u_ne: float
    poa: float


def _utility_inv(p: float, alpha: float, inv_b: float) -> float:
    # Division-free form of the virtual utility; inv_b = 1/b may be 0.
    return (
        -math.exp(-alpha * p) / alpha
        - 0.5 * p * p * (1.0 + inv_b)
        + (1.0 + alpha) / alpha
    )


def _inv_weight(probs: np.ndarray, j: int, rho2: float) -> float:
    # 1/b_j = exp(-rho2) * prod_{k != j} (1 - p_k); safe at p_k = 1.
    return math.exp(-rho2) * float(np.prod(np.delete(1.0 - probs, j)))


def system_utility(probs: Sequence[float] | np.ndarray, nodes: Sequence[NodeParams]) -> float:
    """Sum of per-node utilities, each with its weight computed from the profile."""
    p = np.asarray(probs, dtype=float)
    if p.shape != (len(nodes),):
        raise ValueError(f"profile must have one entry per node, got shape {p.shape}")
    return sum(
        _utility_inv(float(p[j]), node.alpha, _inv_weight(p, j, node.rho2))
        for j, node in enumerate(nodes)
    )


def _externality(probs: np.ndarray, j: int, nodes: Sequence[NodeParams]) -> float:
    """Sum over other nodes of (p_l^2/2) exp(-rho2_l) prod_{k != l,j} (1-p_k).

    This is how node j's probability enters everyone else's utility; it is
    the gap between the system slope and node j's own utility slope.
    """
    one_minus = 1.0 - probs
    others = [k for k in range(len(nodes)) if k != j]
    vals = one_minus[others]
    m = len(vals)
    prefix = np.ones(m + 1)
    np.cumprod(vals, out=prefix[1:])
    suffix = np.ones(m + 1)
    suffix[:m] = np.cumprod(vals[::-1])[::-1]
    total = 0.0
    for pos, l in enumerate(others):
        prod_rest = prefix[pos] * suffix[pos + 1]
        total += 0.5 * probs[l] ** 2 * math.exp(-nodes[l].rho2) * prod_rest
    return total


def system_gradient(probs: Sequence[float] | np.ndarray, j: int, nodes: Sequence[NodeParams]) -> float:
    """Partial derivative of the system utility in coordinate j."""
    p = np.asarray(probs, dtype=float)
    if not 0 <= j < len(nodes):
        raise IndexError(f"node index {j} out of range for {len(nodes)} nodes")
    inv_b = _inv_weight(p, j, nodes[j].rho2)
    own = math.exp(-nodes[j].alpha * p[j]) - p[j] * (1.0 + inv_b)
    return own + _externality(p, j, nodes)


def _maximize_slice(probs: np.ndarray, j: int, nodes: Sequence[NodeParams], tol: float) -> float:
    """Exact maximizer of the system utility in coordinate j over [p_min, 1].

    The slice slope e^(-alpha*p) - p(1 + 1/b_j) + S_j is strictly decreasing
    in p with b_j and S_j independent of p_j, so a sign check at the box ends
    plus bisection finds it.
    """
    node = nodes[j]
    inv_b = _inv_weight(probs, j, node.rho2)
    s_j = _externality(probs, j, nodes)
    alpha = node.alpha

    def slope(p: float) -> float:
        return math.exp(-alpha * p) - p * (1.0 + inv_b) + s_j

    lo, hi = node.p_min, 1.0
    if slope(lo) <= 0.0:
        return lo
    if slope(hi) >= 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def optimize_system(
    nodes: Sequence[NodeParams],
    tol: float = 1e-10,
    n_starts: int = 5,
    seed: int = 0,
    max_sweeps: int = _MAX_SWEEPS,
) -> np.ndarray:
    """Best profile found by multi-start cyclic coordinate ascent on [p_min, 1]^N.

    Starts from the Nash equilibrium plus ``n_starts`` random interior
    profiles; each start is swept until the largest coordinate change in a
    full sweep drops below ``tol``.  Returns the candidate with the highest
    system utility (never below the equilibrium's, since that is a start).
    """
    n = len(nodes)
    starts = [solve_ne(nodes, tol=min(1e-10, tol)).probabilities]
    gen = substream(seed, _NS_WELFARE)
    for _ in range(n_starts):
        starts.append(
            np.array([gen.uniform(node.p_min, 1.0) for node in nodes])
        )
    best_p, best_u = None, -math.inf
    for start in starts:
        p = np.asarray(start, dtype=float).copy()
        delta = math.inf
        for _ in range(max_sweeps):
            delta = 0.0
            for j in range(n):
                new = _maximize_slice(p, j, nodes, tol)
                delta = max(delta, abs(new - p[j]))
                p[j] = new
            if delta < tol:
                break
        else:
            raise RuntimeError(
                f"coordinate ascent exceeded {max_sweeps} sweeps (last change {delta:.3e})"
            )
        u = system_utility(p, nodes)
        if u > best_u:
            best_p, best_u = p, u
    return best_p


def price_of_anarchy(
    nodes: Sequence[NodeParams],
    ne_tol: float = 1e-12,
    opt_tol: float = 1e-10,
    n_starts: int = 5,
    seed: int = 0,
) -> WelfareResult:
    """Ratio of optimal to equilibrium system utility (>= 1 up to solver noise)."""
    p_ne = solve_ne(nodes, tol=ne_tol).probabilities
    p_opt = optimize_system(nodes, tol=opt_tol, n_starts=n_starts, seed=seed)
    u_ne = system_utility(p_ne, nodes)
    u_opt = system_utility(p_opt, nodes)
    if u_opt < u_ne:
        # The equilibrium is one of the ascent starts, so this cannot drop
        # below it by more than the sweep tolerance.
        p_opt, u_opt = p_ne, u_ne
    return WelfareResult(p_opt=p_opt, p_ne=p_ne, u_opt=u_opt, u_ne=u_ne, poa=u_opt / u_ne)
