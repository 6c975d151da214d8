"""Behavioral distances by fixed-point iteration, kernels, bisimilarity.

Starting from the zero pseudometric, each step lifts the current table
through the system's functor expression and evaluates at the pairs of
transition structures.  The sequence is monotone nondecreasing; iteration
stops at an exact fixed point (exact mode), at residual < tol (float mode),
or at the iteration cap, in which case the result is returned unconverged
rather than raised.
"""

from __future__ import annotations

import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .coalgebra import ProbTS, System
from .functors import PseudometricTable
from .lifting import WASSERSTEIN, LiftingEngine
from .values import (
    EXACT,
    INF,
    NumericMode,
    Value,
    dist_e,
    format_magnitude,
    zero,
)


@dataclass
class IterationOptions:
    max_iter: int = 10000
    tol: float = 1e-9
    trace: bool = False
    method: str = WASSERSTEIN
    workers: int = 1

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass
class DistanceMatrix:
    states: tuple
    table: PseudometricTable
    iterations: int
    converged: bool
    residual: Value
    method: str
    mode: NumericMode
    trace: list = field(default_factory=list)

    def get(self, a, b) -> Value:
        return self.table.get(a, b)


def behavioral_distances(sys: System, opts: IterationOptions | None = None) -> DistanceMatrix:
    opts = opts or IterationOptions()
    mode = sys.mode
    bound = sys.top
    states = sys.states
    current = PseudometricTable(states, {}, bound, check=False)
    trace = [current] if opts.trace else []
    pairs = [
        (states[i], states[j])
        for i in range(len(states))
        for j in range(i + 1, len(states))
    ]
    residual = zero(bound) if states else zero(bound)
    converged = len(pairs) == 0
    iterations = 0
    for iterations in range(1, opts.max_iter + 1):
        engine = LiftingEngine(sys.expr, current, opts.method)
        if opts.workers > 1 and len(pairs) > 1:
            with ThreadPoolExecutor(max_workers=opts.workers) as pool:
                lifted = list(
                    pool.map(lambda ab: engine.dist(sys.alpha[ab[0]], sys.alpha[ab[1]]), pairs)
                )
        else:
            lifted = [engine.dist(sys.alpha[a], sys.alpha[b]) for a, b in pairs]
        entries = {}
        residual = zero(bound)
        for (a, b), v in zip(pairs, lifted):
            prev = current.get(a, b)
            if v < prev:
                # rounding between float-mode iterations can nudge an entry a
                # few ulps above its next exact lift; clamp that, fail loudly
                # on anything larger
                gap = dist_e(v, prev)
                if mode.is_exact or gap.as_float() > 1e-12:
                    raise AssertionError(
                        f"iteration not monotone at ({a},{b}): {prev} -> {v}"
                    )
                v = prev
            step = dist_e(v, prev)
            if step > residual:
                residual = step
            if not mode.is_exact:
                v = _round_value(v, bound)
            entries[(a, b)] = v
        # axiom check each step; float-mode rounding may miss by a few ulps
        slack = None if mode.is_exact else 1e-12
        new = PseudometricTable(states, entries, bound, slack=slack)
        if mode.is_exact:
            converged = all(new.get(a, b) == current.get(a, b) for a, b in pairs)
        else:
            converged = residual.as_float() < opts.tol
        current = new
        if opts.trace:
            trace.append(current)
        if converged:
            break
    if not pairs:
        iterations = 1 if states else 0
        converged = True
    return DistanceMatrix(
        states, current, iterations, converged, residual, opts.method, mode, trace
    )


def _round_value(v: Value, bound) -> Value:
    """Snap an exact entry to the nearest double so float-mode denominators
    stay bounded across iterations."""
    if v.is_infinite or isinstance(v.mag, float):
        return v
    return Value(Fraction(float(v.mag)), bound)


def verify_fixed_point(sys: System, m: DistanceMatrix, tol: float = 1e-9) -> bool:
    """One further lifting step changes nothing (exact) / less than tol."""
    engine = LiftingEngine(sys.expr, m.table, m.method)
    for i, a in enumerate(sys.states):
        for b in sys.states[i + 1 :]:
            v = engine.dist(sys.alpha[a], sys.alpha[b])
            prev = m.table.get(a, b)
            if sys.mode.is_exact:
                if v != prev:
                    return False
            elif dist_e(_round_value(v, sys.top), prev).as_float() >= tol:
                return False
    return True


# ---------------------------------------------------------------------------
# kernels and bisimilarity


class UnconvergedError(RuntimeError):
    pass


def kernel_partition(m: DistanceMatrix, tol: float = 1e-9):
    """Equivalence classes of distance zero (exact) or <= tol (float);
    transitivity comes with the triangle inequality."""
    if not m.converged:
        raise UnconvergedError("kernel of an unconverged matrix is undefined")

    def close(a, b):
        v = m.table.get(a, b)
        if m.mode.is_exact:
            return v.is_zero
        return not v.is_infinite and v.as_float() <= tol

    blocks = []
    for s in m.states:
        placed = False
        for block in blocks:
            if close(s, block[0]):
                block.append(s)
                placed = True
                break
        if not placed:
            blocks.append([s])
    return [tuple(b) for b in blocks]


def bisimilarity_partition(p: ProbTS):
    """Partition refinement: split by (per-block probability, termination
    probability) signatures until stable."""
    block_of = {s: 0 for s in p.states}
    nblocks = 1 if p.states else 0
    while True:
        signatures = {}
        for s in p.states:
            mass = {}
            for tgt, w in p.transitions.get(s, {}).items():
                key = block_of[tgt]
                mass[key] = mass.get(key, Fraction(0)) + w
            sig = (
                tuple(sorted(mass.items())),
                Fraction(p.terminate.get(s, 0)),
                block_of[s],
            )
            signatures.setdefault(sig, []).append(s)
        new_block_of = {}
        for idx, sig in enumerate(sorted(signatures)):
            for s in signatures[sig]:
                new_block_of[s] = idx
        if len(signatures) == nblocks:
            break
        block_of = new_block_of
        nblocks = len(signatures)
    out = {}
    for s in p.states:
        out.setdefault(block_of[s], []).append(s)
    return [tuple(out[k]) for k in sorted(out)]


def same_partition(p1, p2) -> bool:
    return {frozenset(b) for b in p1} == {frozenset(b) for b in p2}


# ---------------------------------------------------------------------------
# rendering


def _fmt(v: Value, mode: NumericMode) -> str:
    if mode.is_exact and v.is_exact:
        return format_magnitude(v.mag)
    return "inf" if v.is_infinite else repr(v.as_float())


def matrix_to_csv(m: DistanceMatrix) -> str:
    out = io.StringIO()
    out.write("state," + ",".join(m.states) + "\n")
    for a in m.states:
        row = [_fmt(m.table.get(a, b), m.mode) for b in m.states]
        out.write(a + "," + ",".join(row) + "\n")
    return out.getvalue()


def matrix_to_json(m: DistanceMatrix) -> dict:
    return {
        "states": list(m.states),
        "entries": [
            [a, b, _fmt(v, m.mode)] for a, b, v in m.table.entries()
        ],
        "iterations": m.iterations,
        "converged": m.converged,
        "residual": _fmt(m.residual, m.mode),
        "method": m.method,
        "mode": m.mode.kind,
    }


def trace_to_csv(m: DistanceMatrix) -> str:
    out = io.StringIO()
    out.write("iteration,state1,state2,distance\n")
    for k, table in enumerate(m.trace):
        for a, b, v in table.entries():
            out.write(f"{k},{a},{b},{_fmt(v, m.mode)}\n")
    return out.getvalue()
