import random
from fractions import Fraction as F

import pytest

from behametric.coalgebra import MetricTS, ProbTS, from_metric_ts, from_prob_ts, load_system
from behametric.fixpoint import (
    IterationOptions,
    UnconvergedError,
    behavioral_distances,
    bisimilarity_partition,
    kernel_partition,
    matrix_to_csv,
    matrix_to_json,
    same_partition,
    trace_to_csv,
    verify_fixed_point,
)
from behametric.functors import PseudometricTable
from behametric.suites import random_prob_ts
from behametric.values import NumericMode, TOP_INF, Value


def fig1_left(c=F(9, 10), eps=F(1, 20)):
    return ProbTS(
        states=("x", "y", "u", "z"),
        transitions={
            "x": {"u": F(1, 2) - eps, "z": F(1, 2) + eps},
            "y": {"u": F(1, 2), "z": F(1, 2)},
            "u": {"u": F(1)},
            "z": {},
        },
        terminate={"z": F(1)},
        c=c,
    )


def fig1_right():
    import itertools

    vals = {"0": F(0), "2/5": F(2, 5), "7/10": F(7, 10), "1/2": F(1, 2), "1": F(1)}
    entries = {
        (a, b): Value(abs(va - vb), TOP_INF)
        for (a, va), (b, vb) in itertools.combinations(vals.items(), 2)
    }
    table = PseudometricTable(list(vals), entries, TOP_INF)
    return MetricTS(
        states=("x1", "x2", "x3", "y1", "y2", "y3"),
        propositions=[("r", table)],
        valuation={
            "x1": {"r": "0"},
            "x2": {"r": "2/5"},
            "x3": {"r": "7/10"},
            "y1": {"r": "0"},
            "y2": {"r": "1/2"},
            "y3": {"r": "1"},
        },
        tau={
            "x1": {"x2", "x3"},
            "x2": {"x2"},
            "x3": {"x3"},
            "y1": {"y2", "y3"},
            "y2": {"y2"},
            "y3": {"y3"},
        },
    )


class TestWorkedExamples:
    def test_probabilistic_distances(self):
        m = behavioral_distances(from_prob_ts(fig1_left()))
        assert m.converged
        assert m.get("u", "z") == Value(F(1), m.table.bound)
        assert m.get("x", "y") == Value(F(9, 200), m.table.bound)
        assert verify_fixed_point(from_prob_ts(fig1_left()), m)

    def test_metric_ts_distances(self):
        m = behavioral_distances(from_metric_ts(fig1_right()))
        assert m.converged and m.iterations <= 4
        expected = {
            ("x1", "y1"): F(3, 10),
            ("x2", "y2"): F(1, 10),
            ("x2", "y3"): F(3, 5),
            ("x3", "y2"): F(1, 5),
            ("x3", "y3"): F(3, 10),
        }
        for (a, b), q in expected.items():
            assert m.get(a, b) == Value(q, TOP_INF)

    def test_single_state(self):
        p = ProbTS(("s",), {}, {"s": F(1)}, F(1, 2))
        m = behavioral_distances(from_prob_ts(p))
        assert m.converged and m.iterations == 1
        assert m.get("s", "s").is_zero

    def test_empty_system(self):
        sys_ = load_system(
            {"kind": "system", "top": "1", "expr": {"dist": "id"},
             "states": [], "alpha": {}}
        )
        m = behavioral_distances(sys_)
        assert m.converged and m.states == ()


class TestIterationBehavior:
    def test_trace_is_monotone(self):
        m = behavioral_distances(
            from_prob_ts(fig1_left()), IterationOptions(trace=True)
        )
        for i in range(1, len(m.trace)):
            for a, b, v in m.trace[i].entries():
                assert m.trace[i - 1].get(a, b) <= v

    def test_unconverged_reported_not_raised(self):
        m = behavioral_distances(
            from_prob_ts(fig1_left(c=F(1, 2), eps=F(1, 20))),
            IterationOptions(max_iter=1),
        )
        assert not m.converged
        assert m.residual.as_float() > 0

    def test_float_mode_converges_with_tolerance(self):
        sys_ = from_prob_ts(fig1_left(), NumericMode.approx(1e-9))
        m = behavioral_distances(sys_)
        assert m.converged
        assert abs(m.get("x", "y").as_float() - 9 / 200) < 1e-8

    def test_workers_give_identical_results(self):
        m1 = behavioral_distances(from_prob_ts(fig1_left()))
        m2 = behavioral_distances(
            from_prob_ts(fig1_left()), IterationOptions(workers=4)
        )
        assert all(
            m1.get(a, b) == m2.get(a, b) for a, b, _ in m1.table.entries()
        )


class TestKernel:
    def test_all_separated_in_left_example(self):
        m = behavioral_distances(from_prob_ts(fig1_left()))
        assert len(kernel_partition(m)) == 4

    def test_zero_matrix_single_class(self):
        p = ProbTS(
            ("a", "b"),
            {"a": {"a": F(1)}, "b": {"b": F(1)}},
            {},
            F(1, 2),
        )
        m = behavioral_distances(from_prob_ts(p))
        assert kernel_partition(m) == [("a", "b")]

    def test_duplicate_states_share_class(self):
        p = ProbTS(
            ("a", "b", "t"),
            {"a": {"t": F(1)}, "b": {"t": F(1)}},
            {"t": F(1)},
            F(1, 2),
        )
        m = behavioral_distances(from_prob_ts(p))
        classes = {frozenset(c) for c in kernel_partition(m)}
        assert frozenset({"a", "b"}) in classes

    def test_unconverged_refused(self):
        m = behavioral_distances(
            from_prob_ts(fig1_left(c=F(1, 2))), IterationOptions(max_iter=1)
        )
        with pytest.raises(UnconvergedError):
            kernel_partition(m)


class TestBisimilarity:
    def test_left_example_separates_x_y(self):
        parts = bisimilarity_partition(fig1_left())
        blocks = {frozenset(b) for b in parts}
        assert not any({"x", "y"} <= b for b in blocks)

    def test_two_self_loops_one_block(self):
        p = ProbTS(
            ("a", "b"), {"a": {"a": F(1)}, "b": {"b": F(1)}}, {}, F(1, 2)
        )
        assert bisimilarity_partition(p) == [("a", "b")]

    def test_single_state(self):
        p = ProbTS(("s",), {}, {"s": F(1)}, F(1, 2))
        assert bisimilarity_partition(p) == [("s",)]

    def test_agrees_with_kernel_on_random_systems(self):
        rng = random.Random(77)
        for _ in range(15):
            p = random_prob_ts(rng, max_states=5)
            sys_ = from_prob_ts(p, NumericMode.approx(1e-9))
            m = behavioral_distances(sys_)
            assert m.converged
            assert same_partition(kernel_partition(m), bisimilarity_partition(p))


class TestRendering:
    def test_csv_contains_exact_entries(self):
        m = behavioral_distances(from_prob_ts(fig1_left()))
        csv = matrix_to_csv(m)
        assert "9/200" in csv and csv.splitlines()[0] == "state,x,y,u,z"

    def test_json_metadata(self):
        m = behavioral_distances(from_prob_ts(fig1_left()))
        doc = matrix_to_json(m)
        assert doc["converged"] is True
        assert doc["method"] == "wasserstein"
        assert ["x", "y", "9/200"] in doc["entries"]

    def test_trace_csv(self):
        m = behavioral_distances(
            from_prob_ts(fig1_left()), IterationOptions(trace=True)
        )
        lines = trace_to_csv(m).splitlines()
        assert lines[0] == "iteration,state1,state2,distance"
        assert len(lines) > 6
