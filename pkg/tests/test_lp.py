import itertools
import random
from fractions import Fraction as F

import pytest

from behametric.lp import (
    Infeasible,
    LinearProgram,
    TransportationInstance,
    solve_max,
    solve_transportation,
)
from behametric.oracle import kantorovich_vertex_oracle, transportation_vertices
from behametric.values import INF, TOP_INF, TOP_ONE, Value, zero


class TestSolveMax:
    def test_box_only(self):
        lp = LinearProgram([F(1)], [(F(0), F(1))])
        value, witness = solve_max(lp)
        assert value == 1 and witness == [F(1)]

    def test_simple_constraint(self):
        lp = LinearProgram(
            [F(1), F(1)], [(F(0), F(1))] * 2, [([F(1), F(1)], "<=", F(1))]
        )
        value, _ = solve_max(lp)
        assert value == 1

    def test_kantorovich_lp_value(self):
        # P1 = {a: 1/2, b: 1/2}, P2 = {a: 1, b: 0}, d(a,b) = 1/3, top = 1.
        # Verified against exhaustive vertex enumeration of the polytope
        # {0 <= f <= 1, |f(a) - f(b)| <= 1/3}.
        lp = LinearProgram(
            objective=[F(1, 2) - F(1), F(1, 2)],
            bounds=[(F(0), F(1))] * 2,
            constraints=[
                ([F(1), F(-1)], "<=", F(1, 3)),
                ([F(-1), F(1)], "<=", F(1, 3)),
            ],
        )
        value, witness = solve_max(lp)
        assert value == F(1, 6)
        assert value == kantorovich_vertex_oracle(lp)
        # witness feasibility and exact attainment
        assert all(F(0) <= x <= F(1) for x in witness)
        assert abs(witness[0] - witness[1]) <= F(1, 3)
        assert sum(c * x for c, x in zip(lp.objective, witness)) == value

    def test_minimize(self):
        lp = LinearProgram(
            [F(1)], [(F(0), F(1))], [([F(1)], ">=", F(1, 4))], sense="min"
        )
        value, _ = solve_max(lp)
        assert value == F(1, 4)

    def test_infeasible(self):
        lp = LinearProgram(
            [F(1)], [(F(0), F(1))], [([F(1)], ">=", F(2))]
        )
        with pytest.raises(Infeasible):
            solve_max(lp)

    def test_equality_rows(self):
        lp = LinearProgram(
            [F(3), F(1)],
            [(F(0), F(5))] * 2,
            [([F(1), F(1)], "=", F(2))],
        )
        value, witness = solve_max(lp)
        assert value == 6 and witness == [F(2), F(0)]

    def test_witness_attains_value_on_random_lps(self):
        rng = random.Random(3)
        for _ in range(30):
            n = rng.randint(1, 4)
            obj = [F(rng.randint(-3, 3)) for _ in range(n)]
            cons = []
            for _ in range(rng.randint(0, 3)):
                cons.append(
                    (
                        [F(rng.randint(-2, 2)) for _ in range(n)],
                        rng.choice(["<=", ">="]),
                        F(rng.randint(0, 4), rng.randint(1, 3)),
                    )
                )
            lp = LinearProgram(obj, [(F(0), F(2))] * n, cons)
            try:
                value, witness = solve_max(lp)
            except Infeasible:
                continue
            assert sum(c * x for c, x in zip(obj, witness)) == value
            for coeffs, rel, rhs in cons:
                lhs = sum(c * x for c, x in zip(coeffs, witness))
                assert lhs <= rhs if rel == "<=" else lhs >= rhs


def _cost(mags, bound=TOP_ONE):
    return [[Value(INF, bound) if m == "inf" else Value(F(m), bound) for m in row] for row in mags]


class TestTransportation:
    def test_single_point(self):
        inst = TransportationInstance([F(1)], [F(1)], _cost([["1/2"]]))
        value, plan = solve_transportation(inst)
        assert value.is_zero is False and value == Value(F(1, 2), TOP_ONE)
        assert plan == [[F(1)]]

    def test_identical_marginals_zero(self):
        inst = TransportationInstance(
            [F(1, 2), F(1, 2)],
            [F(1, 2), F(1, 2)],
            _cost([[0, "9/10"], ["9/10", 0]]),
        )
        value, _ = solve_transportation(inst)
        assert value.is_zero

    def test_worked_probabilistic_pair(self):
        # marginals {u: 9/20, z: 11/20} vs {u: 1/2, z: 1/2} over the ground
        # distance with cross cost 9/10: the optimum moves mass 1/20
        inst = TransportationInstance(
            [F(9, 20), F(11, 20)],
            [F(1, 2), F(1, 2)],
            _cost([[0, "9/10"], ["9/10", 0]]),
        )
        value, plan = solve_transportation(inst)
        assert value == Value(F(9, 200), TOP_ONE)
        # plan is a feasible coupling
        assert [sum(row) for row in plan] == inst.supply
        assert [sum(col) for col in zip(*plan)] == inst.demand

    def test_forbidden_cells_infeasible(self):
        inst = TransportationInstance(
            [F(1)], [F(1)], [[Value(INF, TOP_INF)]]
        )
        value, plan = solve_transportation(inst)
        assert value.is_infinite and plan is None

    def test_sum_mismatch_rejected(self):
        with pytest.raises(ValueError):
            TransportationInstance([F(1)], [F(1, 2)], _cost([["1/2"]]))

    def test_matches_vertex_oracle_on_random_instances(self):
        rng = random.Random(11)
        for _ in range(40):
            m, n = rng.randint(1, 3), rng.randint(1, 3)
            supply = [F(rng.randint(1, 5)) for _ in range(m)]
            demand = [F(rng.randint(1, 5)) for _ in range(n)]
            total_s, total_d = sum(supply), sum(demand)
            supply = [s / total_s for s in supply]
            demand = [d / total_d for d in demand]
            cost = [
                [Value(F(rng.randint(0, 8), 8), TOP_ONE) for _ in range(n)]
                for _ in range(m)
            ]
            inst = TransportationInstance(supply, demand, cost)
            value, _ = solve_transportation(inst)
            best = min(
                sum(
                    (cost[i][j].as_fraction() * plan[i][j] for i in range(m) for j in range(n)),
                    F(0),
                )
                for plan in transportation_vertices(supply, demand)
            )
            assert value.as_fraction() == best

    def test_zero_value_iff_zero_cost_plan_exists(self):
        rng = random.Random(5)
        for _ in range(30):
            m = n = 2
            supply = [F(1, 2), F(1, 2)]
            demand = [F(1, 4), F(3, 4)]
            cost = [
                [Value(F(rng.choice([0, 0, 1]), 2), TOP_ONE) for _ in range(n)]
                for _ in range(m)
            ]
            inst = TransportationInstance(supply, demand, cost)
            value, _ = solve_transportation(inst)
            zero_plan_exists = any(
                all(
                    plan[i][j] == 0 or cost[i][j].is_zero
                    for i in range(m)
                    for j in range(n)
                )
                for plan in transportation_vertices(supply, demand)
            )
            assert value.is_zero == zero_plan_exists
