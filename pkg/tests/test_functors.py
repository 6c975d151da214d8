import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from behametric.functors import (
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
    ShapeError,
    Tagged,
    check_expr_bound,
    discrete_table,
    enumerate_couplings_diagsquare,
    enumerate_couplings_finpow,
    eval_functor,
    struct_key,
    validate,
)
from behametric.values import (
    ConfigurationError,
    TOP_INF,
    TOP_ONE,
    Value,
    zero,
)

UNIT = discrete_table(["✓"], TOP_ONE)


class TestDistribution:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ShapeError):
            Distribution({"x": F(1, 2)})

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ShapeError):
            Distribution({"x": F(3, 2), "y": F(-1, 2)})

    def test_canonical_order_and_equality(self):
        p = Distribution({"y": F(1, 2), "x": F(1, 2)})
        q = Distribution({"x": F(1, 2), "y": F(1, 2)})
        assert p == q and hash(p) == hash(q)
        assert p.support() == ["x", "y"]


class TestValidate:
    def test_dist_ok(self):
        validate(Dist(Id()), ["x", "y"], Distribution({"x": F(1, 2), "y": F(1, 2)}))

    def test_unknown_atom(self):
        with pytest.raises(ShapeError):
            validate(Dist(Id()), ["x"], Distribution({"z": F(1)}))

    def test_coproduct_termination_shape(self):
        expr = Coproduct(Id(), Const(UNIT, name="unit"))
        validate(expr, ["x"], Tagged("right", "✓"))
        with pytest.raises(ShapeError):
            validate(expr, ["x"], Tagged("right", "x"))

    def test_pair_shape(self):
        validate(Product(Id(), Id()), ["x"], ("x", "x"))
        with pytest.raises(ShapeError):
            validate(Product(Id(), Id()), ["x"], "x")


class TestPseudometricTable:
    def test_triangle_enforced(self):
        with pytest.raises(ShapeError):
            PseudometricTable(
                ["a", "b", "c"],
                {
                    ("a", "b"): Value(F(1), TOP_INF),
                    ("b", "c"): Value(F(1), TOP_INF),
                    ("a", "c"): Value(F(3), TOP_INF),
                },
                TOP_INF,
            )

    def test_nonzero_diagonal_rejected(self):
        with pytest.raises(ShapeError):
            PseudometricTable(
                ["a"], {("a", "a"): Value(F(1, 2), TOP_ONE)}, TOP_ONE
            )

    def test_symmetric_lookup(self):
        t = PseudometricTable(
            ["a", "b"], {("b", "a"): Value(F(1, 3), TOP_ONE)}, TOP_ONE
        )
        assert t.get("a", "b") == t.get("b", "a") == Value(F(1, 3), TOP_ONE)

    def test_infinite_entries_allowed_under_inf_top(self):
        from behametric.values import INF

        t = PseudometricTable(
            ["a", "b"], {("a", "b"): Value(INF, TOP_INF)}, TOP_INF
        )
        assert t.get("a", "b").is_infinite


class TestExprInvariants:
    def test_discount_range(self):
        with pytest.raises(ConfigurationError):
            Id(F(0))
        with pytest.raises(ConfigurationError):
            Id(F(3, 2))

    def test_pnorm_weights(self):
        with pytest.raises(ConfigurationError):
            PNormEval(0, F(1, 2), F(1, 2))
        with pytest.raises(ConfigurationError):
            PNormEval(1, F(0), F(1, 2))

    def test_const_bound_must_match_expression(self):
        expr = Dist(Coproduct(Id(F(1, 2)), Const(UNIT, name="unit")))
        check_expr_bound(expr, TOP_ONE)
        with pytest.raises(ConfigurationError):
            check_expr_bound(expr, TOP_INF)

    def test_diagsquare_needs_infinite_top(self):
        with pytest.raises(ConfigurationError):
            check_expr_bound(DiagSquare(Id()), TOP_ONE)
        check_expr_bound(DiagSquare(Id()), TOP_INF)

    def test_pnorm_weight_sum_under_finite_top(self):
        heavy = Product(Id(), Id(), PNormEval(1, F(3, 4), F(3, 4)))
        with pytest.raises(ConfigurationError):
            check_expr_bound(heavy, TOP_ONE)
        check_expr_bound(heavy, TOP_INF)


class TestCouplingsFinPow:
    def test_singletons_forced(self):
        assert enumerate_couplings_finpow(frozenset("a"), frozenset("b")) == [
            frozenset({("a", "b")})
        ]

    def test_one_empty_no_coupling(self):
        assert enumerate_couplings_finpow(frozenset(), frozenset("b")) == []

    def test_both_empty_empty_coupling(self):
        assert enumerate_couplings_finpow(frozenset(), frozenset()) == [frozenset()]

    def test_projections_always_reproduce_inputs(self):
        rng = random.Random(0)
        atoms = ["a", "b", "c", "d"]
        for _ in range(20):
            x1 = frozenset(rng.sample(atoms, rng.randint(0, 3)))
            x2 = frozenset(rng.sample(atoms, rng.randint(0, 3)))
            couplings = enumerate_couplings_finpow(x1, x2)
            assert bool(couplings) == ((not x1) == (not x2))
            for t in couplings:
                assert {a for a, _ in t} == set(x1) or not x1
                assert {b for _, b in t} == set(x2) or not x2

    def test_cell_cap(self):
        from behametric.functors import OracleScaleError

        big = frozenset("abcde")
        with pytest.raises(OracleScaleError):
            enumerate_couplings_finpow(big, big, max_cells=16)


class TestCouplingsDiagSquare:
    def test_unique_coupling_counterexample_shape(self):
        (c,) = enumerate_couplings_diagsquare(("x1", "x2"), ("x2", "x1"))
        assert c == (("x1", "x2"), ("x2", "x1"))

    def test_all_equal(self):
        (c,) = enumerate_couplings_diagsquare(("a", "a"), ("a", "a"))
        assert c == (("a", "a"), ("a", "a"))

    def test_projections(self):
        ((l1, l2), (r1, r2)) = enumerate_couplings_diagsquare(("a", "b"), ("c", "d"))[0]
        assert (l1, r1) == ("a", "b") and (l2, r2) == ("c", "d")


class TestEvalFunctor:
    def test_expected_value(self):
        g = {"p0": zero(TOP_ONE), "ph": Value(F(1, 2), TOP_ONE)}
        p = Distribution({"p0": F(1, 2), "ph": F(1, 2)})
        assert eval_functor(Dist(Id()), g, p, TOP_ONE) == Value(F(1, 4), TOP_ONE)

    def test_max_of_empty_set_is_zero(self):
        assert eval_functor(FinPow(Id()), {}, frozenset(), TOP_ONE).is_zero

    def test_diag_square_doubles_constant(self):
        g = {"a": Value(F(3), TOP_INF)}
        assert eval_functor(DiagSquare(Id()), g, ("a", "a"), TOP_INF) == Value(
            F(6), TOP_INF
        )

    def test_discount_scales(self):
        g = {"a": Value(F(1), TOP_ONE)}
        assert eval_functor(Id(F(9, 10)), g, "a", TOP_ONE) == Value(F(9, 10), TOP_ONE)

    def test_monotone_in_g(self):
        rng = random.Random(1)
        exprs = [
            Dist(Id()),
            FinPow(Id()),
            Product(Id(), Id(), MaxEval()),
            Product(Id(), Id(), PNormEval(1, F(1, 2), F(1, 2))),
            Coproduct(Id(), Id()),
            DiagSquare(Id()),
        ]
        from behametric.suites import random_structure

        carrier = ("a", "b", "c")
        grid = [F(0), F(1, 4), F(1, 2), F(3, 4), F(1)]
        for expr in exprs:
            bound = TOP_INF if isinstance(expr, DiagSquare) else TOP_ONE
            for _ in range(25):
                t = random_structure(rng, expr, carrier)
                lo = {a: Value(rng.choice(grid), bound) for a in carrier}
                hi = {
                    a: Value(rng.choice([q for q in grid if q >= lo[a].mag]), bound)
                    for a in carrier
                }
                assert eval_functor(expr, lo, t, bound) <= eval_functor(
                    expr, hi, t, bound
                )


@given(st.lists(st.sampled_from(["a", "b", "c"]), min_size=1, max_size=3, unique=True))
def test_struct_key_total_order_on_sets(atoms):
    s = frozenset(atoms)
    # deterministic, hash-seed independent ordering
    assert sorted(s, key=struct_key) == sorted(s)
