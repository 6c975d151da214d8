"""Independent brute-force references for the lifting computations.

Everything here is exponential and meant for tests and the `check` command
only: coupling enumeration for finite sets and the diagonal square,
transportation-polytope vertex enumeration for distributions, and
polytope-vertex enumeration for the nonexpansiveness LPs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .functors import (
    Const,
    DiagSquare,
    Dist,
    FinPow,
    Id,
    OracleScaleError,
    enumerate_couplings_diagsquare,
    enumerate_couplings_finpow,
    sorted_structs,
)
from .lifting import lift_dist
from .lp import LinearProgram
from .values import Value, add_ext, inf_fin, scale, sup_fin, top, zero

ZERO = Fraction(0)


@dataclass(frozen=True)
class OracleBudget:
    max_coupling_cells: int = 16
    max_support: int = 4
    max_bases: int = 200000

    def __post_init__(self):
        if min(self.max_coupling_cells, self.max_support, self.max_bases) < 1:
            raise ValueError("budgets must be positive")


DEFAULT_BUDGET = OracleBudget()


def _ground_fn(sub, d):
    """Pairwise distance under the node's argument.  Oracles target single
    grammar nodes, so the argument is Id or Const; anything deeper falls
    back to the engine under test and is only a consistency check."""
    if isinstance(sub, Id):
        return lambda a, b: scale(d.get(a, b), sub.discount)
    if isinstance(sub, Const):
        return lambda a, b: sub.space.get(a, b)
    return lambda a, b: lift_dist(sub, d, "wasserstein", a, b)


def wasserstein_oracle(expr, d, t1, t2, budget: OracleBudget = DEFAULT_BUDGET) -> Value:
    """Exact minimum of the evaluated distance over every coupling,
    enumerated exhaustively; top of the bound when no coupling exists."""
    bound = d.bound
    if isinstance(expr, FinPow):
        ground = _ground_fn(expr.sub, d)
        couplings = enumerate_couplings_finpow(t1, t2, budget.max_coupling_cells)
        if not couplings:
            return top(bound)
        values = []
        for cpl in couplings:
            if cpl:
                values.append(sup_fin(ground(a, b) for a, b in sorted_structs(cpl)))
            else:
                values.append(zero(bound))
        return inf_fin(values)
    if isinstance(expr, DiagSquare):
        ground = _ground_fn(expr.sub, d)
        ((a1, b1), (a2, b2)), = enumerate_couplings_diagsquare(t1, t2)
        return add_ext(ground(a1, b1), ground(a2, b2))
    if isinstance(expr, Dist):
        ground = _ground_fn(expr.sub, d)
        points = sorted_structs(set(t1.support()) | set(t2.support()))
        if max(len(t1.support()), len(t2.support())) > budget.max_support:
            raise OracleScaleError("distribution support exceeds the oracle cap")
        supply = [t1.prob(x) for x in points]
        demand = [t2.prob(x) for x in points]
        best = None
        for plan in transportation_vertices(supply, demand):
            val = zero(bound)
            for i, a in enumerate(points):
                for j, b in enumerate(points):
                    w = plan[i][j]
                    if w > 0 and i != j:
                        val = add_ext(val, scale(ground(a, b), w))
            if best is None or val < best:
                best = val
        return best
    raise OracleScaleError(f"no oracle for node {type(expr).__name__}")


def transportation_vertices(supply, demand):
    """All basic feasible solutions of the balanced transportation polytope.

    Vertices correspond to spanning-forest cell subsets of size m+n-1; each
    candidate subset yields at most one plan, solved exactly and kept when
    nonnegative.
    """
    m, n = len(supply), len(demand)
    if sum(supply) != sum(demand):
        raise ValueError("unbalanced instance")
    cells = [(i, j) for i in range(m) for j in range(n)]
    nbasic = m + n - 1
    seen = set()
    for subset in itertools.combinations(cells, min(nbasic, len(cells))):
        plan = _solve_tree(supply, demand, subset)
        if plan is None:
            continue
        key = tuple(tuple(row) for row in plan)
        if key not in seen:
            seen.add(key)
            yield plan
    if m == 0 or n == 0:
        if all(s == 0 for s in supply) and all(dd == 0 for dd in demand):
            yield [[ZERO] * n for _ in range(m)]


def _solve_tree(supply, demand, subset):
    """Solve the flow on a candidate basic cell set; None when the cells do
    not determine a unique nonnegative plan."""
    m, n = len(supply), len(demand)
    # rows: m supply equations + n demand equations (one redundant)
    rows = []
    for i in range(m):
        rows.append(([ONE if ci == i else ZERO for ci, _ in subset], Fraction(supply[i])))
    for j in range(1, n):
        rows.append(([ONE if cj == j else ZERO for _, cj in subset], Fraction(demand[j])))
    sol = _solve_square(rows, len(subset))
    if sol is None or any(x < 0 for x in sol):
        return None
    plan = [[ZERO] * n for _ in range(m)]
    for (i, j), x in zip(subset, sol):
        plan[i][j] = x
    # the dropped demand row must hold too
    if n > 0 and sum(plan[i][0] for i in range(m)) != Fraction(demand[0]):
        return None
    return plan


ONE = Fraction(1)


def _solve_square(rows, nvars):
    """Gaussian elimination for an (possibly overdetermined) exact system;
    returns the unique solution or None (singular / inconsistent)."""
    aug = [list(coeffs) + [rhs] for coeffs, rhs in rows]
    r = 0
    pivots = []
    for c in range(nvars):
        pivot = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if pivot is None:
            return None  # free variable: not a vertex-determining system
        aug[r], aug[pivot] = aug[pivot], aug[r]
        pr = aug[r]
        inv = ONE / pr[c]
        aug[r] = pr = [v * inv for v in pr]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [v - f * pv for v, pv in zip(aug[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(aug):
            break
    if r < nvars:
        return None
    for i in range(r, len(aug)):
        if aug[i][nvars] != 0:
            return None  # inconsistent
    sol = [ZERO] * nvars
    for row_i, c in enumerate(pivots):
        sol[c] = aug[row_i][nvars]
    return sol


def lp_vertices(lp: LinearProgram, budget: OracleBudget = DEFAULT_BUDGET):
    """All vertices of the LP's feasible region by active-set enumeration."""
    n = len(lp.objective)
    if n > 6:
        raise OracleScaleError("vertex oracle capped at 6 variables")
    hyperplanes = []  # (coeffs, rhs) treated as equalities when active
    mandatory = []
    for i, (lo, hi) in enumerate(lp.bounds):
        e_lo = [ZERO] * n
        e_lo[i] = ONE
        hyperplanes.append((e_lo, lo))
        if hi != lo:
            hyperplanes.append((list(e_lo), hi))
    for coeffs, rel, rhs in lp.constraints:
        if rel == "=":
            mandatory.append((list(coeffs), rhs))
        else:
            hyperplanes.append((list(coeffs), rhs))
    need = n - len(mandatory)
    if need < 0:
        need = 0
    from math import comb

    if comb(len(hyperplanes), need) > budget.max_bases:
        raise OracleScaleError("too many candidate active sets")
    seen = set()
    for extra in itertools.combinations(range(len(hyperplanes)), need):
        rows = list(mandatory) + [hyperplanes[k] for k in extra]
        sol = _solve_square(rows, n)
        if sol is None:
            continue
        if not _feasible(lp, sol):
            continue
        key = tuple(sol)
        if key not in seen:
            seen.add(key)
            yield sol


def _feasible(lp, x):
    for xi, (lo, hi) in zip(x, lp.bounds):
        if not lo <= xi <= hi:
            return False
    for coeffs, rel, rhs in lp.constraints:
        lhs = sum(c * xi for c, xi in zip(coeffs, x))
        if rel == "<=" and lhs > rhs:
            return False
        if rel == ">=" and lhs < rhs:
            return False
        if rel == "=" and lhs != rhs:
            return False
    return True


def kantorovich_vertex_oracle(lp: LinearProgram, budget: OracleBudget = DEFAULT_BUDGET):
    """Best objective over all basic feasible vertices; the independent
    check for solve_max on the nonexpansiveness polytopes (which are
    bounded, so the optimum sits at a vertex)."""
    sign = ONE if lp.sense == "max" else -ONE
    best = None
    for v in lp_vertices(lp, budget):
        obj = sum(c * x for c, x in zip(lp.objective, v))
        if best is None or sign * obj > sign * best:
            best = obj
    if best is None:
        raise OracleScaleError("no vertex found (infeasible or degenerate input)")
    return best
