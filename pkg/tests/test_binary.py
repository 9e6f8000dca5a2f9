import itertools

import numpy as np
import pytest

from aoskit import (
    Constraint,
    LpModel,
    Objective,
    SublevelSpec,
    Variable,
    enumerate_binary,
    no_good_cut,
    solve_binary,
)

from conftest import random_binary_program, scan_binary_assignments

GAP0 = SublevelSpec(gap=0.0)


def knapsack():
    """max 5a + 4b + 3c  s.t.  2a + 3b + 4c <= 5,  all three binary.

    All eight assignments by hand: feasible ones are 000=0, 100=5, 010=4,
    001=3, 110=9; the rest exceed the weight budget. Optimum 9 at (1,1,0).
    """
    return LpModel(
        variables=[Variable(n, 0.0, 1.0) for n in ("a", "b", "c")],
        constraints=[Constraint({"a": 2.0, "b": 3.0, "c": 4.0}, "<=", 5.0)],
        objective=Objective("max", {"a": 5.0, "b": 4.0, "c": 3.0}),
    )


BINARIES = ("a", "b", "c")


# ---------------------------------------------------------------------------
# solve_binary on the hand-enumerated knapsack


class TestSolveBinary:
    def test_knapsack_optimum(self):
        res = solve_binary(knapsack(), BINARIES)
        assert res.status == "optimal"
        assert res.value == pytest.approx(9.0, abs=1e-9)
        np.testing.assert_allclose(res.x, [1.0, 1.0, 0.0], atol=1e-9)

    def test_returned_point_is_integral(self):
        res = solve_binary(knapsack(), BINARIES)
        assert np.all(np.abs(res.x - np.round(res.x)) <= 1e-9)

    def test_infeasible_binary_program(self):
        model = LpModel(
            variables=[Variable("a", 0.0, 1.0), Variable("b", 0.0, 1.0)],
            constraints=[Constraint({"a": 1.0, "b": 1.0}, ">=", 3.0)],
            objective=Objective("min", {"a": 1.0, "b": 1.0}),
        )
        assert solve_binary(model, ("a", "b")).status == "infeasible"

    def test_non_unit_bounds_rejected(self):
        model = LpModel(
            variables=[Variable("a", 0.0, 2.0)],
            objective=Objective("min", {"a": 1.0}),
        )
        with pytest.raises(ValueError, match="bounds within"):
            solve_binary(model, ("a",))

    def test_unknown_binary_name_rejected(self):
        with pytest.raises(ValueError, match="not in the model"):
            solve_binary(knapsack(), ("a", "zz"))

    def test_mixed_continuous_and_binary(self):
        # min 10*on - 3*flow, flow <= 4*on, flow in [0, 4]: on=1 gives 10-12=-2,
        # on=0 forces flow=0 giving 0, so the optimum is -2 at (1, 4).
        model = LpModel(
            variables=[Variable("on", 0.0, 1.0), Variable("flow", 0.0, 4.0)],
            constraints=[Constraint({"flow": 1.0, "on": -4.0}, "<=", 0.0)],
            objective=Objective("min", {"on": 10.0, "flow": -3.0}),
        )
        res = solve_binary(model, ("on",))
        assert res.status == "optimal"
        assert res.value == pytest.approx(-2.0, abs=1e-9)
        np.testing.assert_allclose(res.x, [1.0, 4.0], atol=1e-9)


# ---------------------------------------------------------------------------
# no-good cuts


class TestNoGoodCut:
    def test_excludes_only_the_generator(self):
        names = ("a", "b")
        cut = no_good_cut(names, (1, 0))
        for bits in itertools.product((0, 1), repeat=2):
            lhs = sum(cut.coeffs[n] * v for n, v in zip(names, bits))
            satisfied = lhs >= cut.rhs - 1e-12
            assert satisfied == (bits != (1, 0))

    def test_every_assignment_excluded_exactly_once(self):
        names = ("a", "b", "c")
        for target in itertools.product((0, 1), repeat=3):
            cut = no_good_cut(names, target)
            violated = [
                bits
                for bits in itertools.product((0, 1), repeat=3)
                if sum(cut.coeffs[n] * v for n, v in zip(names, bits)) < cut.rhs - 1e-12
            ]
            assert violated == [target]


# ---------------------------------------------------------------------------
# enumerate_binary pools


class TestEnumerateBinary:
    def test_knapsack_gap0_is_the_unique_optimum(self):
        pool = enumerate_binary(knapsack(), BINARIES, GAP0)
        assert pool.assignments == [(1, 1, 0)]
        assert pool.values == [pytest.approx(9.0)]
        assert pool.exhausted is True
        assert (1, 1, 0) in pool

    def test_knapsack_wide_gap_matches_hand_enumeration(self):
        # gap 1.0 on optimum 9 (max sense) keeps values >= 9 - 1*9 = 0:
        # every feasible assignment qualifies.
        pool = enumerate_binary(knapsack(), BINARIES, SublevelSpec(gap=1.0))
        assert pool.exhausted is True
        expected = [(1, 1, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0)]
        assert pool.assignments == expected
        assert pool.values == pytest.approx([9.0, 5.0, 4.0, 3.0, 0.0])

    def test_infeasible_program_gives_empty_exhausted_pool(self):
        model = LpModel(
            variables=[Variable("a", 0.0, 1.0)],
            constraints=[Constraint({"a": 1.0}, ">=", 2.0)],
            objective=Objective("min", {"a": 1.0}),
        )
        pool = enumerate_binary(model, ("a",), GAP0)
        assert len(pool) == 0
        assert pool.exhausted is True
        assert pool.tau is None

    def test_limit_truncates_and_clears_exhausted(self):
        pool = enumerate_binary(knapsack(), BINARIES, SublevelSpec(gap=1.0), limit=2)
        assert len(pool) == 2
        assert pool.exhausted is False

    def test_limit_below_one_rejected(self):
        with pytest.raises(ValueError, match="limit"):
            enumerate_binary(knapsack(), BINARIES, GAP0, limit=0)

    def test_pool_entries_are_duplicate_free(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            model, names = random_binary_program(rng)
            pool = enumerate_binary(model, names, SublevelSpec(gap=0.05))
            assert len(set(pool.assignments)) == len(pool.assignments)

    def test_pool_values_never_degrade(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            model, names = random_binary_program(rng)
            pool = enumerate_binary(model, names, SublevelSpec(gap=0.05))
            sign = 1.0 if model.objective.sense == "min" else -1.0
            adjusted = [sign * v for v in pool.values]
            assert all(a <= b + 1e-9 for a, b in zip(adjusted, adjusted[1:]))

    def test_pool_assignments_pairwise_distinct_in_hamming(self):
        pool = enumerate_binary(knapsack(), BINARIES, SublevelSpec(gap=1.0))
        for a, b in itertools.combinations(pool.assignments, 2):
            assert sum(x != y for x, y in zip(a, b)) >= 1

    def test_json_dict_shape(self):
        pool = enumerate_binary(knapsack(), BINARIES, GAP0)
        doc = pool.to_json_dict()
        assert doc["binary_names"] == ["a", "b", "c"]
        assert doc["count"] == 1
        assert doc["exhausted"] is True
        assert doc["entries"] == [{"assignment": [1, 1, 0], "value": pytest.approx(9.0)}]


# ---------------------------------------------------------------------------
# pool == exhaustive 2^n scan on random programs


class TestAgainstExhaustiveScan:
    @pytest.mark.parametrize("gap", [0.0, 0.05])
    def test_random_programs_match_scan(self, gap):
        rng = np.random.default_rng(100 + int(gap * 100))
        spec = SublevelSpec(gap=gap)
        for trial in range(40):
            model, names = random_binary_program(
                rng, always_feasible=bool(trial % 2)
            )
            tau, expected = scan_binary_assignments(model, names, spec)
            pool = enumerate_binary(model, names, spec)
            assert pool.exhausted is True
            if tau is None:
                assert len(pool) == 0
                continue
            assert pool.tau == pytest.approx(tau, abs=1e-9)
            assert pool.assignments == [a for a, _ in expected]
            assert pool.values == pytest.approx([v for _, v in expected], abs=1e-7)
