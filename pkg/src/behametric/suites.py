"""Seeded random instance generators and the property suites.

The suites back both the test suite and the CLI `check` command: duality
(K = W on duality-preserving nodes), k-le-w (K <= W everywhere), axioms
(lifted distances are pseudometrics), well-behaved (max passes, min fails
with the known witnesses), and oracle (engine vs brute force).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .functors import (
    Coproduct,
    Const,
    DiagSquare,
    Dist,
    Distribution,
    FinPow,
    Id,
    MaxEval,
    PNormEval,
    Product,
    PseudometricTable,
    Tagged,
    struct_key,
)
from .lifting import (
    KANTOROVICH,
    WASSERSTEIN,
    LiftingEngine,
    check_well_behaved,
    kantorovich_linear_value,
    lift_dist,
)
from .lp import LinearProgram, solve_max
from .oracle import (
    DEFAULT_BUDGET,
    kantorovich_vertex_oracle,
    wasserstein_oracle,
)
from .values import (
    INF,
    TOP_INF,
    TOP_ONE,
    TopBound,
    Value,
    add_ext,
    dist_e,
    zero,
)

ATOMS = ("a", "b", "c", "d", "e")


# ---------------------------------------------------------------------------
# generators


def random_pseudometric(rng: random.Random, bound: TopBound, n_atoms=None) -> PseudometricTable:
    """Random table made triangle-valid by shortest-path closure."""
    n = n_atoms if n_atoms is not None else rng.randint(2, 5)
    atoms = ATOMS[:n]
    if bound.is_infinite:
        pool = [Fraction(k, 4) for k in range(0, 9)] + [INF, INF]
    else:
        t = bound.limit
        pool = [t * Fraction(k, 8) for k in range(0, 9)]
    raw = {}
    for a, b in itertools.combinations(atoms, 2):
        raw[(a, b)] = rng.choice(pool)

    def get(a, b):
        if a == b:
            return Fraction(0)
        return raw[(a, b) if a < b else (b, a)]

    def put(a, b, v):
        raw[(a, b) if a < b else (b, a)] = v

    for mid in atoms:  # Floyd-Warshall min-plus closure
        for a, b in itertools.combinations(atoms, 2):
            via_mag = None
            x, y = get(a, mid), get(mid, b)
            if x is not INF and y is not INF:
                via_mag = x + y
            if via_mag is not None and (get(a, b) is INF or via_mag < get(a, b)):
                put(a, b, via_mag)
    entries = {k: Value(v, bound) for k, v in raw.items()}
    return PseudometricTable(atoms, entries, bound, check=False)


def random_distribution(rng: random.Random, items, max_support=4) -> Distribution:
    support = rng.sample(list(items), rng.randint(1, min(max_support, len(items))))
    weights = [rng.randint(1, 6) for _ in support]
    total = sum(weights)
    return Distribution({x: Fraction(w, total) for x, w in zip(support, weights)})


def random_structure(rng: random.Random, expr, carrier):
    if isinstance(expr, Id):
        return rng.choice(list(carrier))
    if isinstance(expr, Const):
        return rng.choice(list(expr.space.carrier))
    if isinstance(expr, Dist):
        # distributions over substructures; keep supports small
        items = {random_structure(rng, expr.sub, carrier) for _ in range(4)}
        return random_distribution(rng, sorted(items, key=struct_key), max_support=4)
    if isinstance(expr, FinPow):
        items = {random_structure(rng, expr.sub, carrier) for _ in range(rng.randint(0, 4))}
        return frozenset(items)
    if isinstance(expr, (Product, DiagSquare)):
        left = expr.left if isinstance(expr, Product) else expr.sub
        right = expr.right if isinstance(expr, Product) else expr.sub
        return (
            random_structure(rng, left, carrier),
            random_structure(rng, right, carrier),
        )
    if isinstance(expr, Coproduct):
        tag = rng.choice(("left", "right"))
        side = expr.left if tag == "left" else expr.right
        return Tagged(tag, random_structure(rng, side, carrier))
    raise ValueError(f"no generator for {expr!r}")


def node_catalogue(bound: TopBound, rng: random.Random):
    """One representative expression per grammar node, over Id leaves."""
    leaf = Id(Fraction(1))
    discounted = Id(Fraction(rng.randint(1, 4), 4))
    const_space = random_pseudometric(rng, bound, n_atoms=3).relabel(
        {"a": "p", "b": "q", "c": "r"}
    )
    nodes = [
        ("id", discounted),
        ("const", Const(const_space, name="k")),
        ("dist", Dist(leaf)),
        ("finpow", FinPow(leaf)),
        ("product-max", Product(leaf, leaf, MaxEval())),
        ("coproduct", Coproduct(leaf, discounted)),
    ]
    if bound.is_infinite:
        nodes.append(("product-pnorm", Product(leaf, leaf, PNormEval(1, Fraction(1, 2), Fraction(3, 4)))))
        nodes.append(("diagsquare", DiagSquare(leaf)))
    else:
        nodes.append(("product-pnorm", Product(leaf, leaf, PNormEval(1, Fraction(1, 2), Fraction(1, 2)))))
    return nodes


DUALITY_NODES = (
    "id",
    "const",
    "dist",
    "finpow",
    "product-max",
    "product-pnorm",
    "coproduct",
)


# ---------------------------------------------------------------------------
# suite results


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    failures: list = field(default_factory=list)
    seed: int = 0

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        line = f"{self.name}: {verdict} ({self.checked} checks, seed {self.seed})"
        for f in self.failures[:5]:
            line += f"\n  witness: {f}"
        return line


def _instances(seed, n, bounds=(TOP_ONE, TOP_INF)):
    """Yield (node name, expr, table, t1, t2) across nodes and bounds."""
    rng = random.Random(seed)
    for bound in bounds:
        for name, expr in node_catalogue(bound, rng):
            for _ in range(n):
                d = random_pseudometric(rng, bound)
                t1 = random_structure(rng, expr, d.carrier)
                t2 = random_structure(rng, expr, d.carrier)
                yield name, expr, d, t1, t2


def suite_k_le_w(seed=0, n=50) -> SuiteResult:
    checked = 0
    failures = []
    for name, expr, d, t1, t2 in _instances(seed, n):
        k = lift_dist(expr, d, KANTOROVICH, t1, t2)
        w = lift_dist(expr, d, WASSERSTEIN, t1, t2)
        checked += 1
        if not k <= w:
            failures.append((name, t1, t2, k, w))
    return SuiteResult("k-le-w", not failures, checked, failures, seed)


def suite_duality(seed=0, n=50) -> SuiteResult:
    checked = 0
    failures = []
    for name, expr, d, t1, t2 in _instances(seed, n):
        if name not in DUALITY_NODES:
            continue
        k = lift_dist(expr, d, KANTOROVICH, t1, t2)
        w = lift_dist(expr, d, WASSERSTEIN, t1, t2)
        checked += 1
        if k != w:
            failures.append((name, t1, t2, k, w))
    return SuiteResult("duality", not failures, checked, failures, seed)


def suite_axioms(seed=0, n=50) -> SuiteResult:
    """Reflexivity, symmetry and the triangle inequality of every lifted
    distance, plus monotonicity of the lifting in the ground metric."""
    rng = random.Random(seed)
    checked = 0
    failures = []
    for bound in (TOP_ONE, TOP_INF):
        for name, expr in node_catalogue(bound, rng):
            for _ in range(n):
                d = random_pseudometric(rng, bound)
                ts = [random_structure(rng, expr, d.carrier) for _ in range(3)]
                for method in (KANTOROVICH, WASSERSTEIN):
                    engine = LiftingEngine(expr, d, method)
                    for t in ts:
                        if not engine.dist(t, t).is_zero:
                            failures.append((name, method, "reflexivity", t))
                    for t1, t2 in itertools.combinations(ts, 2):
                        v = engine.dist(t1, t2)
                        # fresh engine: the memo would make the reversed call
                        # a tautology
                        if v != lift_dist(expr, d, method, t2, t1):
                            failures.append((name, method, "symmetry", t1, t2))
                    v01 = engine.dist(ts[0], ts[1])
                    v12 = engine.dist(ts[1], ts[2])
                    v02 = engine.dist(ts[0], ts[2])
                    if not v02 <= add_ext(v01, v12, clamp=True):
                        failures.append((name, method, "triangle", ts))
                    checked += 1
    return SuiteResult("axioms", not failures, checked, failures, seed)


def suite_well_behaved(seed=0, n=50) -> SuiteResult:
    failures = []
    checked = 0
    for bound in (TOP_ONE, TOP_INF):
        rep_max = check_well_behaved("max", bound, seed=seed, n_random=n)
        rep_min = check_well_behaved("min", bound, seed=seed, n_random=n)
        checked += 2
        if not rep_max.all_ok:
            failures.append(("max should pass", bound, rep_max.witnesses))
        if rep_min.condition2_ok or rep_min.condition3_ok:
            failures.append(("min should fail conditions 2 and 3", bound))
    return SuiteResult("well-behaved", not failures, checked, failures, seed)


def suite_oracle(seed=0, n=30) -> SuiteResult:
    """Engine vs brute force: Hausdorff vs coupling enumeration, the
    transportation simplex vs polytope vertices, the Kantorovich simplex vs
    active-set vertex enumeration."""
    rng = random.Random(seed)
    failures = []
    checked = 0
    for bound in (TOP_ONE, TOP_INF):
        finpow = FinPow(Id(Fraction(1)))
        dist = Dist(Id(Fraction(1)))
        for _ in range(n):
            d = random_pseudometric(rng, bound, n_atoms=rng.randint(2, 4))
            s1 = random_structure(rng, finpow, d.carrier)
            s2 = random_structure(rng, finpow, d.carrier)
            engine = lift_dist(finpow, d, WASSERSTEIN, s1, s2)
            brute = wasserstein_oracle(finpow, d, s1, s2)
            checked += 1
            if engine != brute:
                failures.append(("finpow", s1, s2, engine, brute))
            p1 = random_distribution(rng, d.carrier)
            p2 = random_distribution(rng, d.carrier)
            engine = lift_dist(dist, d, WASSERSTEIN, p1, p2)
            brute = wasserstein_oracle(dist, d, p1, p2)
            checked += 1
            if engine != brute:
                failures.append(("dist-w", p1, p2, engine, brute))
            if not bound.is_infinite:
                lp = _kantorovich_lp(d, p1, p2, bound)
                if lp is not None:
                    val, _ = solve_max(lp)
                    vertex = kantorovich_vertex_oracle(lp)
                    checked += 1
                    if val != vertex:
                        failures.append(("dist-k-lp", p1, p2, val, vertex))
    return SuiteResult("oracle", not failures, checked, failures, seed)


def _kantorovich_lp(d, p1, p2, bound):
    """The nonexpansiveness LP for a pair of distributions, one orientation."""
    points = sorted(set(p1.support()) | set(p2.support()))
    if len(points) > 4:
        return None
    coeffs = [p1.prob(x) - p2.prob(x) for x in points]
    constraints = []
    for i, j in itertools.combinations(range(len(points)), 2):
        q = d.get(points[i], points[j])
        if q.is_infinite:
            continue
        row = [Fraction(0)] * len(points)
        row[i], row[j] = Fraction(1), Fraction(-1)
        constraints.append((row, "<=", q.as_fraction()))
        constraints.append(([-c for c in row], "<=", q.as_fraction()))
    return LinearProgram(
        objective=coeffs,
        bounds=[(Fraction(0), bound.limit)] * len(points),
        constraints=constraints,
    )


SUITES = {
    "duality": suite_duality,
    "axioms": suite_axioms,
    "k-le-w": suite_k_le_w,
    "well-behaved": suite_well_behaved,
    "oracle": suite_oracle,
}


def run_suite(name, seed=0, n=50) -> SuiteResult:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(
            f"unknown suite {name!r}; choose from {', '.join(sorted(SUITES))}"
        ) from None
    return fn(seed=seed, n=n)


# ---------------------------------------------------------------------------
# random probabilistic systems (shared by tests and demos)


def random_prob_ts(rng: random.Random, max_states=6, c=Fraction(1, 2)):
    from .coalgebra import ProbTS

    n = rng.randint(2, max_states)
    states = tuple(f"s{i}" for i in range(n))
    transitions = {}
    terminate = {}
    for s in states:
        succ = rng.sample(states, rng.randint(1, min(3, n)))
        weights = [rng.randint(0, 6) for _ in succ]
        tweight = rng.randint(0, 4)
        total = sum(weights) + tweight
        if total == 0:
            terminate[s] = Fraction(1)
            transitions[s] = {}
            continue
        transitions[s] = {
            t: Fraction(w, total) for t, w in zip(succ, weights) if w > 0
        }
        terminate[s] = Fraction(tweight, total)
    return ProbTS(states, transitions, terminate, c)


def random_metric_ts(rng: random.Random, max_states=5):
    from .coalgebra import MetricTS

    n = rng.randint(2, max_states)
    states = tuple(f"s{i}" for i in range(n))
    table = random_pseudometric(rng, TOP_INF, n_atoms=rng.randint(2, 4))
    valuation = {
        s: {"r": rng.choice(table.carrier)} for s in states
    }
    tau = {
        s: frozenset(rng.sample(states, rng.randint(0, min(3, n)))) for s in states
    }
    return MetricTS(states, [("r", table)], valuation, tau)
