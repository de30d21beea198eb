"""Deterministic branch-and-bound over LP relaxations.

Solves ``min c @ x  s.t.  A_ub x <= b_ub, A_eq x = b_eq, l <= x <= u``
with a subset of variables restricted to integers.  Relaxations are
solved exactly (within tolerance) by HiGHS through
:func:`scipy.optimize.linprog`.

The search is depth-first with a fixed, fully deterministic policy:
branch on the integer variable with the largest fractional part (ties to
the lowest variable index) and explore the round-down child first.
Integral relaxation solutions are repaired by re-solving the LP with all
integer variables pinned to their rounded values, so every reported
incumbent is exactly feasible.  The solver either proves optimality to
within ``gap`` or raises :class:`BudgetExceededError`; it never returns
a silently suboptimal answer.

Callers may pass candidate integer assignments (``hints``) and a
``strengthen`` callback that rounds node bounds up onto the lattice of
attainable objective values; both are verified or conservative, so they
affect speed only, never correctness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

__all__ = ["MilpProblem", "MilpResult", "BudgetExceededError", "solve_milp"]

_HIGHS_OPTIONS = {
    "presolve": True,
    "primal_feasibility_tolerance": 1e-9,
    "dual_feasibility_tolerance": 1e-9,
}

_LP_INFEASIBLE = 2


class BudgetExceededError(RuntimeError):
    """The node budget ran out before optimality was proven."""


@dataclass(frozen=True)
class MilpProblem:
    """Immutable problem data; bounds arrays give the root relaxation."""

    c: np.ndarray
    a_ub: sp.csr_matrix | None
    b_ub: np.ndarray | None
    a_eq: sp.csr_matrix | None
    b_eq: np.ndarray | None
    lower: np.ndarray
    upper: np.ndarray
    integral: np.ndarray  # boolean mask over variables


@dataclass
class MilpResult:
    status: str  # "optimal" | "infeasible"
    objective: float | None
    x: np.ndarray | None
    nodes_explored: int


def _solve_lp(problem: MilpProblem, lower: np.ndarray, upper: np.ndarray):
    return linprog(
        problem.c,
        A_ub=problem.a_ub,
        b_ub=problem.b_ub,
        A_eq=problem.a_eq,
        b_eq=problem.b_eq,
        bounds=np.column_stack((lower, upper)),
        method="highs",
        options=_HIGHS_OPTIONS,
    )


def solve_milp(
    problem: MilpProblem,
    node_budget: int = 500_000,
    gap: float = 1e-7,
    int_tol: float = 1e-6,
    strengthen: Callable[[float, np.ndarray, np.ndarray], float] | None = None,
    hints: Iterable[Sequence[float]] = (),
    round_up_seed: bool = True,
    polish: bool = True,
) -> MilpResult:
    """Solve the mixed-integer program to proven optimality.

    Args:
        problem: problem data; ``problem.integral`` marks integer variables.
        node_budget: maximum number of LP relaxations solved in the tree.
        gap: absolute optimality gap the proof must close.
        int_tol: fractional-part threshold below which a relaxation
            solution counts as integral.
        strengthen: optional bound-lifting callback
            ``(lp_bound, lower, upper) -> bound``; must never exceed the
            true subtree optimum.
        hints: candidate assignments for the integer variables (in index
            order); each is verified by an LP before use.
        round_up_seed: derive a starting incumbent by rounding the root
            relaxation up (safe whenever raising integer variables only
            relaxes constraints, which the capacity structure here has).
        polish: greedily lower seeded integer values one step where the
            LP stays feasible, improving the starting incumbent.

    Raises:
        BudgetExceededError: budget exhausted before the proof closed.
    """
    idx_int = np.flatnonzero(problem.integral)
    lower0 = np.asarray(problem.lower, dtype=float)
    upper0 = np.asarray(problem.upper, dtype=float)

    best_obj = math.inf
    best_x: np.ndarray | None = None

    def try_candidate(values: np.ndarray) -> bool:
        """Pin integer variables to ``values``; keep if feasible and better."""
        nonlocal best_obj, best_x
        values = np.clip(values, lower0[idx_int], upper0[idx_int])
        lo = lower0.copy()
        hi = upper0.copy()
        lo[idx_int] = values
        hi[idx_int] = values
        res = _solve_lp(problem, lo, hi)
        if res.status != 0:
            return False
        obj = float(problem.c @ res.x)
        if obj < best_obj - 1e-9:
            best_obj = obj
            best_x = res.x
        return True

    root = _solve_lp(problem, lower0, upper0)
    explored = 1
    if root.status == _LP_INFEASIBLE:
        return MilpResult("infeasible", None, None, explored)
    if root.status != 0:
        raise RuntimeError(f"root relaxation failed with status {root.status}")

    for hint in hints:
        try_candidate(np.asarray(hint, dtype=float))
    if round_up_seed and idx_int.size:
        seed = np.ceil(root.x[idx_int] - 1e-9)
        if try_candidate(seed) and polish:
            seed = np.clip(seed, lower0[idx_int], upper0[idx_int])
            for k in range(idx_int.size):
                if problem.c[idx_int[k]] <= 0:
                    continue  # lowering cannot improve the objective
                if seed[k] - 1 < lower0[idx_int[k]]:
                    continue
                trial = seed.copy()
                trial[k] -= 1
                before = best_obj
                if try_candidate(trial) and best_obj < before:
                    seed = trial

    # depth-first stack; the root's relaxation is already solved
    stack: list[tuple[np.ndarray, np.ndarray, object]] = [(lower0, upper0, root)]
    while stack:
        lower, upper, res = stack.pop()
        if res is None:
            explored += 1
            if explored > node_budget:
                raise BudgetExceededError(
                    f"node budget {node_budget} exhausted (incumbent {best_obj})"
                )
            res = _solve_lp(problem, lower, upper)
        if res.status == _LP_INFEASIBLE:
            continue
        if res.status != 0:
            raise RuntimeError(f"LP relaxation failed with status {res.status}")
        bound = float(res.fun)
        if strengthen is not None:
            bound = strengthen(bound, lower, upper)
        if bound >= best_obj - gap:
            continue
        x = res.x
        if idx_int.size == 0:
            best_obj = float(res.fun)
            best_x = x
            continue
        frac = np.abs(x[idx_int] - np.round(x[idx_int]))
        worst = float(frac.max())
        if worst <= int_tol:
            try_candidate(np.round(x[idx_int]))
            if bound >= best_obj - gap:
                continue
            if worst == 0.0:
                continue
        # branch on the most fractional variable, lowest index on ties
        var = int(idx_int[int(np.argmax(frac))])
        value = float(x[var])
        up_lower = lower.copy()
        up_lower[var] = math.ceil(value)
        down_upper = upper.copy()
        down_upper[var] = math.floor(value)
        stack.append((up_lower, upper, None))
        stack.append((lower, down_upper, None))

    if best_x is None:
        # every branch died without an integral point
        return MilpResult("infeasible", None, None, explored)
    return MilpResult("optimal", best_obj, best_x, explored)
