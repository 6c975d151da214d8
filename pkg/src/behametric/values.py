"""Value domain [0, top] with extended arithmetic.

Distances live in a closed interval [0, top] where top is either a finite
positive rational or infinity.  Infinity is a distinguished singleton, never
a float sentinel, so exact computations can use top = inf.  Magnitudes are
exact rationals; a float magnitude marks a value as inexact (this happens
only when a p-norm evaluation produces an irrational root).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union


class ConfigurationError(ValueError):
    """Raised when values under different bounds or modes are combined."""


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"


INF = _Infinity()

Magnitude = Union[Fraction, float, _Infinity]


@dataclass(frozen=True)
class TopBound:
    """The maximal element of the value interval; None limit means infinity."""

    limit: Fraction | None

    def __post_init__(self):
        if self.limit is not None and self.limit <= 0:
            raise ConfigurationError("finite top bound must be positive")

    @classmethod
    def finite(cls, q) -> "TopBound":
        return cls(Fraction(q))

    @classmethod
    def infinite(cls) -> "TopBound":
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self.limit is None

    def __repr__(self):
        return "TopBound(inf)" if self.is_infinite else f"TopBound({self.limit})"


TOP_ONE = TopBound.finite(1)
TOP_INF = TopBound.infinite()


@dataclass(frozen=True)
class NumericMode:
    """exact: all comparisons are exact; float: compared up to tolerance."""

    kind: str  # "exact" | "float"
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.kind not in ("exact", "float"):
            raise ConfigurationError(f"unknown numeric mode {self.kind!r}")
        if self.kind == "float" and not self.tolerance > 0:
            raise ConfigurationError("float-mode tolerance must be positive")

    @classmethod
    def exact(cls) -> "NumericMode":
        return cls("exact")

    @classmethod
    def approx(cls, tolerance: float = 1e-9) -> "NumericMode":
        return cls("float", tolerance)

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"


EXACT = NumericMode.exact()


@dataclass(frozen=True)
class Value:
    """An element of [0, top].

    ``mag`` is a Fraction (exact), the INF singleton, or a float.  Float
    magnitudes flag the value as inexact; they only arise from irrational
    p-th roots and propagate through further arithmetic.
    """

    mag: Magnitude
    bound: TopBound

    def __post_init__(self):
        m = self.mag
        if m is INF:
            if not self.bound.is_infinite:
                raise ConfigurationError("infinite value under a finite bound")
            return
        if isinstance(m, Fraction):
            if m < 0:
                raise ConfigurationError(f"negative value {m}")
            if self.bound.limit is not None and m > self.bound.limit:
                raise ConfigurationError(f"value {m} exceeds top {self.bound.limit}")
        elif isinstance(m, float):
            # inexact magnitudes get clamped into range instead of rejected
            lo, hi = 0.0, float("inf") if self.bound.is_infinite else float(self.bound.limit)
            object.__setattr__(self, "mag", min(max(m, lo), hi))
        else:
            raise ConfigurationError(f"bad magnitude {m!r}")

    # -- predicates ---------------------------------------------------------

    @property
    def is_infinite(self) -> bool:
        return self.mag is INF

    @property
    def is_exact(self) -> bool:
        return not isinstance(self.mag, float)

    @property
    def is_zero(self) -> bool:
        return self.mag == 0

    # -- conversions --------------------------------------------------------

    def as_float(self) -> float:
        if self.mag is INF:
            return float("inf")
        return float(self.mag)

    def as_fraction(self) -> Fraction:
        if not isinstance(self.mag, Fraction):
            raise ConfigurationError(f"{self} has no exact rational magnitude")
        return self.mag

    # -- ordering (INF is greatest) -----------------------------------------

    def _cmp_key(self):
        return (1,) if self.mag is INF else (0, self.mag)

    def __lt__(self, other: "Value") -> bool:
        ensure_compatible(self, other)
        return self._cmp_key() < other._cmp_key()

    def __le__(self, other: "Value") -> bool:
        ensure_compatible(self, other)
        return self._cmp_key() <= other._cmp_key()

    def __gt__(self, other: "Value") -> bool:
        return other < self

    def __ge__(self, other: "Value") -> bool:
        return other <= self

    def __repr__(self):
        return f"Value({format_magnitude(self.mag)})"


def ensure_compatible(a: Value, b: Value) -> None:
    if a.bound != b.bound:
        raise ConfigurationError(f"mixed bounds: {a.bound} vs {b.bound}")


def zero(bound: TopBound) -> Value:
    return Value(Fraction(0), bound)


def top(bound: TopBound) -> Value:
    if bound.is_infinite:
        return Value(INF, bound)
    return Value(bound.limit, bound)


def exact(q, bound: TopBound) -> Value:
    """Build an exact value from anything Fraction accepts, or INF."""
    if q is INF:
        return Value(INF, bound)
    return Value(Fraction(q), bound)


def dist_e(a: Value, b: Value) -> Value:
    """Euclidean distance on [0, top], with d(x, inf) = inf for x != inf
    and d(inf, inf) = 0."""
    ensure_compatible(a, b)
    if a.mag is INF and b.mag is INF:
        return zero(a.bound)
    if a.mag is INF or b.mag is INF:
        return Value(INF, a.bound)
    return Value(abs(a.mag - b.mag), a.bound)


def add_ext(a: Value, b: Value, clamp: bool = False) -> Value:
    """Extended addition: x + inf = inf.  Clamping to top is opt-in; the
    lifting formulas stay within [0, top] by construction, so a clamp here
    would only mask bugs."""
    ensure_compatible(a, b)
    if a.mag is INF or b.mag is INF:
        return Value(INF, a.bound)
    m = a.mag + b.mag
    if clamp and a.bound.limit is not None and m > a.bound.limit:
        m = a.bound.limit if isinstance(m, Fraction) else float(a.bound.limit)
    return Value(m, a.bound)


def scale(v: Value, c: Fraction) -> Value:
    """Multiply by a positive rational; c * inf = inf."""
    c = Fraction(c)
    if c <= 0:
        raise ConfigurationError("scale factor must be positive")
    if v.mag is INF:
        return v
    return Value(v.mag * c, v.bound)


def sup_fin(vs: Iterable[Value]) -> Value:
    vs = list(vs)
    if not vs:
        raise ConfigurationError("sup of an empty sequence")
    out = vs[0]
    for v in vs[1:]:
        if v > out:
            out = v
    return out


def inf_fin(vs: Iterable[Value]) -> Value:
    vs = list(vs)
    if not vs:
        raise ConfigurationError("inf of an empty sequence")
    out = vs[0]
    for v in vs[1:]:
        if v < out:
            out = v
    return out


def _int_nth_root(n: int, p: int) -> int | None:
    """Exact p-th root of a nonnegative integer, or None."""
    if n in (0, 1):
        return n
    r = round(n ** (1.0 / p))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**p == n:
            return cand
    return None


def pth_root(v: Value, p: int) -> Value:
    """p-th root; exact when the magnitude is a perfect p-th power of a
    rational, otherwise a float magnitude marked inexact."""
    if p < 1:
        raise ConfigurationError("root order must be >= 1")
    if p == 1 or v.mag is INF:
        return v
    if isinstance(v.mag, float):
        return Value(v.mag ** (1.0 / p), v.bound)
    num = _int_nth_root(v.mag.numerator, p)
    den = _int_nth_root(v.mag.denominator, p)
    if num is not None and den is not None:
        return Value(Fraction(num, den), v.bound)
    return Value(float(v.mag) ** (1.0 / p), v.bound)


def pth_power(v: Value, p: int) -> Value:
    if v.mag is INF:
        return v
    return Value(v.mag**p, v.bound)


def values_close(a: Value, b: Value, mode: NumericMode) -> bool:
    """Equality test honouring the numeric mode.  Inexact magnitudes are
    always compared with the float tolerance, even in exact mode."""
    ensure_compatible(a, b)
    if a.is_exact and b.is_exact and mode.is_exact:
        return a.mag == b.mag or (a.mag is INF and b.mag is INF)
    if a.is_infinite or b.is_infinite:
        return a.is_infinite and b.is_infinite
    tol = mode.tolerance if not mode.is_exact else 1e-9
    return abs(a.as_float() - b.as_float()) <= tol


def format_magnitude(m: Magnitude) -> str:
    if m is INF:
        return "inf"
    if isinstance(m, float):
        return repr(m)
    if m.denominator == 1:
        return str(m.numerator)
    return f"{m.numerator}/{m.denominator}"


def parse_magnitude(text: str) -> Magnitude:
    """Parse 'p/q', a decimal string, or 'inf'."""
    text = text.strip()
    if text in ("inf", "infinity", "∞"):
        return INF
    return Fraction(text)
