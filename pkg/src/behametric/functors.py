"""Functor grammar, structure values over finite carriers, couplings.

Expressions form a small AST: identity with discount, finitely supported
distributions, finite powerset, binary product/coproduct, constant spaces and
the diagonal square X -> X x X.  Structure values are plain hashable Python
data (atoms are strings, pairs are tuples, sets are frozensets, tagged values
use Tagged, distributions use Distribution).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .values import (
    INF,
    ConfigurationError,
    TopBound,
    Value,
    add_ext,
    dist_e,
    pth_power,
    pth_root,
    scale,
    sup_fin,
    zero,
)


class ShapeError(ValueError):
    """A structure value does not match its functor expression."""


# ---------------------------------------------------------------------------
# structure values


@dataclass(frozen=True)
class Tagged:
    tag: str  # "left" | "right"
    value: object

    def __post_init__(self):
        if self.tag not in ("left", "right"):
            raise ShapeError(f"bad coproduct tag {self.tag!r}")


class Distribution:
    """Finitely supported probability distribution with positive rational
    weights summing exactly to 1.  Hashable; support kept in canonical order."""

    __slots__ = ("_items", "_map")

    def __init__(self, items):
        pairs = []
        for x, p in dict(items).items():
            p = Fraction(p)
            if p <= 0:
                raise ShapeError(f"nonpositive weight {p} for {x!r}")
            pairs.append((x, p))
        pairs.sort(key=lambda xp: struct_key(xp[0]))
        total = sum(p for _, p in pairs)
        if total != 1:
            raise ShapeError(f"weights sum to {total}, not 1")
        self._items = tuple(pairs)
        self._map = dict(pairs)

    @property
    def items(self):
        return self._items

    def support(self):
        return [x for x, _ in self._items]

    def prob(self, x) -> Fraction:
        return self._map.get(x, Fraction(0))

    def __eq__(self, other):
        return isinstance(other, Distribution) and self._items == other._items

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        body = ", ".join(f"{x!r}: {p}" for x, p in self._items)
        return f"Distribution({{{body}}})"


def struct_key(t):
    """Canonical total order on structure values, for deterministic
    iteration no matter the process hash seed."""
    if isinstance(t, str):
        return ("atom", t)
    if isinstance(t, Tagged):
        return ("tag", t.tag, struct_key(t.value))
    if isinstance(t, tuple):
        return ("pair", tuple(struct_key(x) for x in t))
    if isinstance(t, frozenset):
        return ("set", tuple(sorted(struct_key(x) for x in t)))
    if isinstance(t, Distribution):
        return ("dist", tuple((struct_key(x), p) for x, p in t.items))
    raise ShapeError(f"unknown structure value {t!r}")


def sorted_structs(xs):
    return sorted(xs, key=struct_key)


# ---------------------------------------------------------------------------
# pseudometric tables


class PseudometricTable:
    """Symmetric distance table with zero diagonal on a finite carrier.

    The pseudometric axioms are validated on construction; entries all live
    under one TopBound.
    """

    def __init__(self, carrier, entries, bound: TopBound, check: bool = True, slack=None):
        self.carrier = tuple(carrier)
        if len(set(self.carrier)) != len(self.carrier):
            raise ShapeError("duplicate carrier atoms")
        self.bound = bound
        self._d = {}
        for (a, b), v in entries.items():
            if a not in self.carrier or b not in self.carrier:
                raise ShapeError(f"unknown atom in entry ({a!r}, {b!r})")
            if not isinstance(v, Value):
                v = Value(Fraction(v), bound)
            if v.bound != bound:
                raise ConfigurationError("table entry under a different bound")
            key = (a, b) if a <= b else (b, a)
            prev = self._d.get(key)
            if prev is not None and prev != v:
                raise ShapeError(f"conflicting entries for {key}")
            self._d[key] = v
        for a in self.carrier:
            diag = self._d.setdefault((a, a), zero(bound))
            if not diag.is_zero:
                raise ShapeError(f"nonzero diagonal at {a!r}")
        for a, b in itertools.combinations(self.carrier, 2):
            self._d.setdefault((a, b) if a <= b else (b, a), zero(bound))
        if check:
            self._check_triangle(slack)

    def _check_triangle(self, slack=None):
        """slack permits the few-ulp violations that float-mode rounding of
        otherwise-valid tables introduces."""
        for a, b, c in itertools.permutations(self.carrier, 3):
            lhs = self.get(a, c)
            # clamp: lhs <= top anyway, so capping the sum changes nothing
            rhs = add_ext(self.get(a, b), self.get(b, c), clamp=True)
            if lhs > rhs:
                if slack is not None and not lhs.is_infinite:
                    if lhs.as_float() - rhs.as_float() <= slack:
                        continue
                raise ShapeError(
                    f"triangle inequality fails: d({a},{c})={lhs} > "
                    f"d({a},{b})+d({b},{c})={rhs}"
                )

    def get(self, a, b) -> Value:
        key = (a, b) if a <= b else (b, a)
        try:
            return self._d[key]
        except KeyError:
            raise ShapeError(f"atoms {a!r}, {b!r} not in carrier") from None

    def entries(self):
        for a, b in itertools.combinations(self.carrier, 2):
            yield a, b, self.get(a, b)

    def relabel(self, mapping) -> "PseudometricTable":
        """Rename carrier atoms along a bijection."""
        new_entries = {
            (mapping[a], mapping[b]): v for a, b, v in self.entries()
        }
        return PseudometricTable(
            [mapping[a] for a in self.carrier], new_entries, self.bound, check=False
        )

    def __eq__(self, other):
        return (
            isinstance(other, PseudometricTable)
            and set(self.carrier) == set(other.carrier)
            and all(self.get(a, b) == other.get(a, b) for a, b, _ in self.entries())
        )


def discrete_table(carrier, bound: TopBound) -> PseudometricTable:
    """All-zero pseudometric on a carrier (so single-atom spaces for free)."""
    return PseudometricTable(carrier, {}, bound, check=False)


# ---------------------------------------------------------------------------
# functor expressions


class FunctorExpr:
    """Base class; nodes are immutable and carry their evaluation choice."""

    def const_spaces(self):
        """All Const tables reachable from this expression."""
        out = []
        self._collect_consts(out)
        return out

    def _collect_consts(self, out):
        pass


@dataclass(frozen=True)
class Id(FunctorExpr):
    discount: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "discount", Fraction(self.discount))
        if not 0 < self.discount <= 1:
            raise ConfigurationError(f"discount {self.discount} not in (0, 1]")


@dataclass(frozen=True)
class Dist(FunctorExpr):
    sub: FunctorExpr

    def _collect_consts(self, out):
        self.sub._collect_consts(out)


@dataclass(frozen=True)
class FinPow(FunctorExpr):
    sub: FunctorExpr

    def _collect_consts(self, out):
        self.sub._collect_consts(out)


@dataclass(frozen=True)
class MaxEval:
    pass


@dataclass(frozen=True)
class PNormEval:
    p: int
    c1: Fraction
    c2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c1", Fraction(self.c1))
        object.__setattr__(self, "c2", Fraction(self.c2))
        if self.p < 1:
            raise ConfigurationError("p must be >= 1")
        for c in (self.c1, self.c2):
            if not 0 < c <= 1:
                raise ConfigurationError(f"weight {c} not in (0, 1]")


@dataclass(frozen=True)
class Product(FunctorExpr):
    left: FunctorExpr
    right: FunctorExpr
    eval: object = MaxEval()

    def _collect_consts(self, out):
        self.left._collect_consts(out)
        self.right._collect_consts(out)


@dataclass(frozen=True)
class Coproduct(FunctorExpr):
    left: FunctorExpr
    right: FunctorExpr

    def _collect_consts(self, out):
        self.left._collect_consts(out)
        self.right._collect_consts(out)


@dataclass(frozen=True)
class Const(FunctorExpr):
    space: PseudometricTable
    name: str = "const"

    def __hash__(self):
        return hash((self.name, self.space.carrier))

    def _collect_consts(self, out):
        out.append(self)


@dataclass(frozen=True)
class DiagSquare(FunctorExpr):
    sub: FunctorExpr

    def _collect_consts(self, out):
        self.sub._collect_consts(out)


def check_expr_bound(expr: FunctorExpr, bound: TopBound) -> None:
    """One consistent TopBound per expression; Const tables must match and
    a p-norm product under a finite top needs c1 + c2 <= 1 to stay in
    range, the sum evaluation of DiagSquare needs top = inf."""
    for const in expr.const_spaces():
        if const.space.bound != bound:
            raise ConfigurationError(
                f"const space {const.name!r} uses {const.space.bound}, expected {bound}"
            )
    def walk(e):
        if isinstance(e, Product):
            if isinstance(e.eval, PNormEval) and not bound.is_infinite:
                if e.eval.c1 + e.eval.c2 > 1:
                    raise ConfigurationError(
                        "p-norm weights must sum to <= 1 under a finite top"
                    )
            walk(e.left)
            walk(e.right)
        elif isinstance(e, DiagSquare):
            if not bound.is_infinite:
                raise ConfigurationError("diagonal square requires top = inf")
            walk(e.sub)
        elif isinstance(e, (Dist, FinPow)):
            walk(e.sub)
        elif isinstance(e, Coproduct):
            walk(e.left)
            walk(e.right)
    walk(expr)


# ---------------------------------------------------------------------------
# validation


def validate(expr: FunctorExpr, carrier, t, path="t") -> None:
    """Accept iff t is a well-formed element of F(carrier)."""
    carrier = set(carrier)
    _validate(expr, carrier, t, path)


def _validate(expr, carrier, t, path):
    if isinstance(expr, Id):
        if not isinstance(t, str) or t not in carrier:
            raise ShapeError(f"{path}: {t!r} is not a carrier atom")
    elif isinstance(expr, Const):
        if not isinstance(t, str) or t not in expr.space.carrier:
            raise ShapeError(
                f"{path}: {t!r} is not an atom of constant space {expr.name!r}"
            )
    elif isinstance(expr, Dist):
        if not isinstance(t, Distribution):
            raise ShapeError(f"{path}: expected a distribution, got {t!r}")
        for x, _ in t.items:
            _validate(expr.sub, carrier, x, f"{path}.support[{x!r}]")
    elif isinstance(expr, FinPow):
        if not isinstance(t, frozenset):
            raise ShapeError(f"{path}: expected a frozenset, got {t!r}")
        for x in sorted_structs(t):
            _validate(expr.sub, carrier, x, f"{path}.{x!r}")
    elif isinstance(expr, Product):
        if not (isinstance(t, tuple) and len(t) == 2):
            raise ShapeError(f"{path}: expected a pair, got {t!r}")
        _validate(expr.left, carrier, t[0], f"{path}[0]")
        _validate(expr.right, carrier, t[1], f"{path}[1]")
    elif isinstance(expr, DiagSquare):
        if not (isinstance(t, tuple) and len(t) == 2):
            raise ShapeError(f"{path}: expected a pair, got {t!r}")
        _validate(expr.sub, carrier, t[0], f"{path}[0]")
        _validate(expr.sub, carrier, t[1], f"{path}[1]")
    elif isinstance(expr, Coproduct):
        if not isinstance(t, Tagged):
            raise ShapeError(f"{path}: expected a tagged value, got {t!r}")
        side = expr.left if t.tag == "left" else expr.right
        _validate(side, carrier, t.value, f"{path}.{t.tag}")
    else:
        raise ShapeError(f"unknown expression node {expr!r}")


# ---------------------------------------------------------------------------
# evaluation


def eval_functor(expr: FunctorExpr, g, t, bound: TopBound) -> Value:
    """Evaluate a structure of leaves through g: leaf -> Value and fold with
    the node's evaluation function (expected value / max / rho / sum)."""
    lookup = g if callable(g) else g.__getitem__
    return _eval(expr, lookup, t, bound)


def _eval(expr, g, t, bound):
    if isinstance(expr, (Id,)):
        return scale(g(t), expr.discount)
    if isinstance(expr, Const):
        return g(t)
    if isinstance(expr, Dist):
        acc = zero(bound)
        for x, p in t.items:
            v = _eval(expr.sub, g, x, bound)
            if v.is_infinite:
                return v
            acc = add_ext(acc, scale(v, p))
        return acc
    if isinstance(expr, FinPow):
        if not t:
            return zero(bound)  # max of the empty set is 0
        return sup_fin(_eval(expr.sub, g, x, bound) for x in sorted_structs(t))
    if isinstance(expr, Product):
        v1 = _eval(expr.left, g, t[0], bound)
        v2 = _eval(expr.right, g, t[1], bound)
        return combine_product(expr.eval, v1, v2)
    if isinstance(expr, Coproduct):
        side = expr.left if t.tag == "left" else expr.right
        return _eval(side, g, t.value, bound)
    if isinstance(expr, DiagSquare):
        v1 = _eval(expr.sub, g, t[0], bound)
        v2 = _eval(expr.sub, g, t[1], bound)
        return add_ext(v1, v2)
    raise ShapeError(f"unknown expression node {expr!r}")


def combine_product(ev, v1: Value, v2: Value) -> Value:
    if isinstance(ev, MaxEval):
        return sup_fin([v1, v2])
    if isinstance(ev, PNormEval):
        if v1.is_infinite or v2.is_infinite:
            return Value(INF, v1.bound)
        radicand = add_ext(
            scale(pth_power(v1, ev.p), ev.c1), scale(pth_power(v2, ev.p), ev.c2)
        )
        return pth_root(radicand, ev.p)
    raise ShapeError(f"unknown product evaluation {ev!r}")


# ---------------------------------------------------------------------------
# coupling enumeration (brute-force scale only)


class OracleScaleError(ValueError):
    pass


def enumerate_couplings_finpow(x1: frozenset, x2: frozenset, max_cells: int = 16):
    """All T subset of X1 x X2 with full projections.  Empty collection iff
    exactly one side is empty; {emptyset} when both are."""
    if not x1 and not x2:
        return [frozenset()]
    if not x1 or not x2:
        return []
    cells = [
        (a, b) for a in sorted_structs(x1) for b in sorted_structs(x2)
    ]
    if len(cells) > max_cells:
        raise OracleScaleError(
            f"{len(cells)} candidate cells exceed the oracle cap {max_cells}"
        )
    out = []
    for mask in range(1, 1 << len(cells)):
        chosen = [cells[k] for k in range(len(cells)) if mask >> k & 1]
        if {a for a, _ in chosen} == set(x1) and {b for _, b in chosen} == set(x2):
            out.append(frozenset(chosen))
    return out


def enumerate_couplings_diagsquare(t1: tuple, t2: tuple):
    """The projections force a single coupling of two squared-functor values."""
    return [((t1[0], t2[0]), (t1[1], t2[1]))]
