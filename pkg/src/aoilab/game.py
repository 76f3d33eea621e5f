"""Virtual utility, best responses, and the equilibrium fixed-point solver.

The expected probability dynamics climb, per node, the strictly concave
utility

    U(p) = -exp(-alpha*p)/alpha - (p^2/2) * (1 + 1/b) + (1 + alpha)/alpha,

whose slope is exp(-alpha*p) - p(1 + 1/b).  The additive constant makes
U(0+) = 1, so utilities stay positive on (0, 1] and are comparable across
nodes.  The best response is the unique root of exp(-alpha*p) = p(1 + 1/b),
which lies in [exp(-alpha)/2, 1).  When the infinity-norm bound on the
best-response Jacobian is below one, the simultaneous best-response iteration
is a contraction and converges to the unique Nash equilibrium from any
interior start.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .model import NodeParams

__all__ = [
    "EquilibriumResult",
    "utility",
    "utility_gradient",
    "best_response",
    "best_response_map",
    "contraction_bound",
    "solve_ne",
]

# Bracket and tolerance for the bisection root-finder.  The bracket always
# straddles the root: the gradient is positive near 0 and negative at 1.
_ROOT_LO = 1e-12
_ROOT_TOL = 1e-12
_MAX_ITERATIONS = 10_000


@dataclass(frozen=True)
class EquilibriumResult:
    """Fixed point of the best-response map plus convergence diagnostics."""

    probabilities: np.ndarray
    residuals: np.ndarray
    iterations: int
    contraction_bound: float


def utility(p: float, alpha: float, b: float) -> float:
    """Virtual utility of transmitting with probability p against weight b."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if not b > 0.0:
        raise ValueError(f"interference weight must be positive, got {b}")
    return (
        -math.exp(-alpha * p) / alpha
        - 0.5 * p * p * (1.0 + 1.0 / b)
        + (1.0 + alpha) / alpha
    )


def utility_gradient(p: float, alpha: float, b: float) -> float:
    """Slope of the virtual utility: exp(-alpha*p) - p(1 + 1/b); decreasing in p."""
    return math.exp(-alpha * p) - p * (1.0 + 1.0 / b)


def _bisect_decreasing(g: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Root of a strictly decreasing g with g(lo) > 0 > g(hi)."""
    if not (g(lo) > 0.0 and g(hi) < 0.0):
        raise ValueError("root not bracketed; parameters are corrupted")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _interference_weight(others: np.ndarray, rho2: float) -> float:
    if np.any(others >= 1.0) or np.any(others < 0.0):
        raise ValueError("other nodes' probabilities must lie in [0, 1)")
    return math.exp(rho2) / float(np.prod(1.0 - others))


def best_response(others: Sequence[float] | np.ndarray, params: NodeParams) -> float:
    """Utility-maximizing probability against the other nodes' profile.

    Root of exp(-alpha*p) = p(1 + 1/b) on (0, 1), clamped from below by
    p_min.  The clamp is provably inactive when the parameters come from
    ``derive_params``, since the root is at least exp(-alpha)/2 = p_min.
    """
    b = _interference_weight(np.asarray(others, dtype=float), params.rho2)
    alpha = params.alpha
    root = _bisect_decreasing(
        lambda p: math.exp(-alpha * p) - p * (1.0 + 1.0 / b),
        _ROOT_LO,
        1.0,
        _ROOT_TOL,
    )
    return max(params.p_min, root)


def best_response_map(probs: np.ndarray, nodes: Sequence[NodeParams]) -> np.ndarray:
    """All best responses computed simultaneously from the same profile."""
    p = np.asarray(probs, dtype=float)
    return np.array(
        [best_response(np.delete(p, i), node) for i, node in enumerate(nodes)]
    )


def contraction_bound(
    n: int, nodes: Sequence[NodeParams], p_global_min: float
) -> float:
    """Infinity-norm bound on the best-response Jacobian for roster size n.

    max over nodes of (n-1) * (1-p_global_min)^(n-2) / (exp(rho2) * (alpha+1)).
    A value below one certifies a unique equilibrium reached by best-response
    iteration.  The per-node constants are taken from ``nodes`` (the bound for
    a homogeneous roster needs only one representative).
    """
    if n < 1:
        raise ValueError(f"roster size must be >= 1, got {n}")
    if n == 1:
        return 0.0
    return max(
        (n - 1)
        * (1.0 - p_global_min) ** (n - 2)
        / (math.exp(node.rho2) * (node.alpha + 1.0))
        for node in nodes
    )


def solve_ne(
    nodes: Sequence[NodeParams],
    tol: float = 1e-10,
    start: np.ndarray | None = None,
    max_iter: int = _MAX_ITERATIONS,
) -> EquilibriumResult:
    """Iterate the best-response map to its fixed point.

    Stops when the sup-norm step falls below ``tol``.  The reported residuals
    are |exp(-alpha*p) - p(1 + 1/b)| per node at the returned profile.  If the
    contraction bound is not below one, a warning is issued and the iteration
    proceeds anyway (uniqueness is then not guaranteed).
    """
    n = len(nodes)
    p_global_min = min(node.p_min for node in nodes)
    bound = contraction_bound(n, nodes, p_global_min)
    if bound >= 1.0:
        warnings.warn(
            f"contraction bound {bound:.4f} >= 1 for n={n}; "
            "equilibrium may not be unique",
            stacklevel=2,
        )
    if start is None:
        probs = np.array([0.5 * (node.p_min + 1.0) for node in nodes])
    else:
        probs = np.asarray(start, dtype=float).copy()
        if probs.shape != (n,):
            raise ValueError(f"start profile must have shape ({n},)")
    for iteration in range(1, max_iter + 1):
        new = best_response_map(probs, nodes)
        step = float(np.max(np.abs(new - probs)))
        probs = new
        if step < tol:
            residuals = _equilibrium_residuals(probs, nodes)
            return EquilibriumResult(
                probabilities=probs,
                residuals=residuals,
                iterations=iteration,
                contraction_bound=bound,
            )
    raise RuntimeError(
        f"best-response iteration did not reach step < {tol} within "
        f"{max_iter} iterations (last step {step:.3e}, bound {bound:.4f})"
    )


def _equilibrium_residuals(probs: np.ndarray, nodes: Sequence[NodeParams]) -> np.ndarray:
    res = np.empty(len(nodes))
    for i, node in enumerate(nodes):
        b = _interference_weight(np.delete(probs, i), node.rho2)
        res[i] = abs(utility_gradient(float(probs[i]), node.alpha, b))
    return res
