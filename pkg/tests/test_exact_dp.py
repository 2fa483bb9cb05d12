import math
from fractions import Fraction as F

import pytest

from conewalk import (
    ConeSpec,
    StepDistribution,
    analyze,
    boundary_exit_g,
    brute_force_excursion,
    brute_force_survival,
    build_model,
    escape_probability_bounds,
    excursion_sequence,
    survival_layers,
    survival_sequence,
    tilted_survival_functional,
)
from conewalk.errors import (
    DriftNotInterior,
    MemoryBudgetExceeded,
    NotSmallStep,
    PointOutsideCone,
    Trapped,
    UnsupportedCone,
)


class TestSurvival:
    def test_five_step_prefix(self, five_step_model):
        seq = survival_sequence(five_step_model, 2)
        assert list(seq.terms) == [F(1), F(3, 5), F(13, 25)]

    def test_1d_prefix(self, sym_1d):
        seq = survival_sequence(sym_1d, 3)
        assert list(seq.terms) == [F(1), F(1, 2), F(1, 2), F(3, 8)]

    def test_matches_brute_force(self, five_step_model, exterior_2d, neg_1d):
        for model in (five_step_model, exterior_2d, neg_1d):
            seq = survival_sequence(model, 8)
            assert list(seq.terms) == brute_force_survival(model, 8)

    def test_trapped_constant(self, trapped_2d):
        seq = survival_sequence(trapped_2d, 10)
        assert all(t == 1 for t in seq.terms)

    def test_non_increasing_in_unit_interval(self, exterior_2d):
        terms = survival_sequence(exterior_2d, 30).terms
        assert all(0 <= t <= 1 for t in terms)
        assert all(a >= b for a, b in zip(terms, terms[1:]))

    def test_offset_start(self):
        dist = StepDistribution(1, (((1,), F(1, 4)), ((-1,), F(3, 4))))
        model = build_model(dist, ConeSpec.orthant(1), (2,))
        seq = survival_sequence(model, 6)
        assert list(seq.terms) == brute_force_survival(model, 6)

    def test_metadata(self, five_step_model):
        seq = survival_sequence(five_step_model, 4)
        assert seq.kind == "survival"
        assert seq.horizon == 4
        assert seq.model_hash == five_step_model.model_hash()

    def test_csv_round_trip(self, sym_1d):
        csv = survival_sequence(sym_1d, 3).to_csv()
        lines = csv.strip().splitlines()
        assert lines[0] == "n,numerator,denominator,value"
        n, num, den, value = lines[4].split(",")
        assert (n, num, den) == ("3", "3", "8")
        assert float(value) == 0.375

    def test_halfspace_cone_rejected(self):
        dist = StepDistribution(2, (((1, 0), F(1, 2)), ((-1, 0), F(1, 2))))
        cone = ConeSpec.polyhedral([[1, 0], [0, 1]])
        model = build_model(dist, cone, (0, 0))
        with pytest.raises(UnsupportedCone):
            survival_sequence(model, 3)


class TestLayers:
    def test_totals_match_survival(self, five_step_model):
        terms = survival_sequence(five_step_model, 6).terms
        for layer in survival_layers(five_step_model, 6):
            assert layer.total == terms[layer.index]

    def test_masses_positive_and_confined(self, exterior_2d):
        for layer in survival_layers(exterior_2d, 5):
            for pos, mass in layer.masses.items():
                assert mass > 0
                assert all(c >= 0 for c in pos)

    def test_first_layer_is_start(self, five_step_model):
        first = next(iter(survival_layers(five_step_model, 0)))
        assert first.masses == {(0, 0): F(1)}


class TestExcursion:
    def test_five_step_origin(self, five_step_model):
        seq = excursion_sequence(five_step_model, (0, 0), 2)
        assert list(seq.terms) == [F(1), F(0), F(2, 25)]

    def test_matches_brute_force(self, five_step_model, simple_walk_2d):
        for model in (five_step_model, simple_walk_2d):
            for target in ((0, 0), (1, 1), (2, 0)):
                seq = excursion_sequence(model, target, 7)
                assert list(seq.terms) == brute_force_excursion(model, target, 7)

    def test_pruning_preserves_target_mass(self, exterior_2d):
        # the pruned DP must agree with the unpruned full layers
        n = 12
        layers = list(survival_layers(exterior_2d, n))
        seq = excursion_sequence(exterior_2d, (0, 0), n)
        for k, layer in enumerate(layers):
            assert seq.terms[k] == layer.masses.get((0, 0), F(0))

    def test_periodicity_of_simple_walk(self, simple_walk_2d):
        terms = excursion_sequence(simple_walk_2d, (0, 0), 10).terms
        assert all(terms[k] == 0 for k in range(1, 11, 2))
        assert all(terms[k] > 0 for k in range(2, 11, 2))

    def test_target_outside_cone(self, five_step_model):
        with pytest.raises(PointOutsideCone):
            excursion_sequence(five_step_model, (0, -1), 4)

    def test_unreachable_target_is_zero(self, trapped_2d):
        seq = excursion_sequence(trapped_2d, (0, 0), 4)
        assert list(seq.terms) == [F(1), F(0), F(0), F(0), F(0)]


class TestTiltedFunctional:
    def test_reconstructs_survival(self, exterior_2d):
        an = analyze(exterior_2d.dist, exterior_2d.cone)
        n = 40
        func = tilted_survival_functional(exterior_2d, an.t0, n)
        exact = survival_sequence(exterior_2d, n).floats()
        pref = math.exp(sum(t * x for t, x in zip(an.t0, exterior_2d.start)))
        for k in range(n + 1):
            recon = an.rho ** k * pref * func[k]
            assert recon == pytest.approx(exact[k], rel=1e-11)

    def test_starts_at_one_from_origin(self, exterior_2d):
        an = analyze(exterior_2d.dist, exterior_2d.cone)
        func = tilted_survival_functional(exterior_2d, an.t0, 0)
        assert func[0] == pytest.approx(1.0)


class TestBoundaryExitG:
    def test_five_step_values(self, five_step_model):
        assert boundary_exit_g(five_step_model, (0, 0)) == F(1)
        assert boundary_exit_g(five_step_model, (2, 0)) == F(5, 8)

    def test_1d_ratio_power(self, pos_1d):
        assert boundary_exit_g(pos_1d, (0,)) == F(1, 3)
        assert boundary_exit_g(pos_1d, (3,)) == F(1, 3) ** 4

    def test_needs_small_steps(self):
        dist = StepDistribution(1, (((2,), F(3, 4)), ((-1,), F(1, 4))))
        model = build_model(dist, ConeSpec.orthant(1), (0,))
        with pytest.raises(NotSmallStep):
            boundary_exit_g(model, (0,))

    def test_needs_interior_drift(self, sym_1d):
        with pytest.raises(DriftNotInterior):
            boundary_exit_g(sym_1d, (0,))

    def test_trapped_has_no_exit(self, trapped_2d):
        with pytest.raises(Trapped):
            boundary_exit_g(trapped_2d, (0, 0))


class TestEscapeBounds:
    def test_1d_interval_is_exact(self, pos_1d):
        # for p=3/4 the escape probability is exactly 2/3 and the interval
        # closes on it completely
        bounds = escape_probability_bounds(pos_1d, 40)
        lo, hi = bounds.best
        assert lo <= F(2, 3) <= hi
        assert float(hi - lo) < 1e-6

    def test_intervals_contain_best(self, five_step_model):
        bounds = escape_probability_bounds(five_step_model, 30)
        lo, hi = bounds.best
        assert lo <= hi
        for a, b in bounds.intervals:
            assert a <= lo or a == lo
            assert b >= hi or b == hi

    def test_interval_width_shrinks(self, five_step_model):
        bounds = escape_probability_bounds(five_step_model, 30)
        widths = [float(b - a) for a, b in bounds.intervals]
        assert widths[-1] < widths[0]
        assert widths[-1] < 1e-2

    def test_g_sequence_matches_pointwise_sum(self, five_step_model):
        bounds = escape_probability_bounds(five_step_model, 6)
        layers = list(survival_layers(five_step_model, 6))
        for k, g_k in enumerate(bounds.g_sequence.terms):
            direct = sum(
                (mass * boundary_exit_g(five_step_model, pos)
                 for pos, mass in layers[k].masses.items()),
                F(0),
            )
            assert g_k == direct

    def test_survival_minus_g_is_lower_bound(self, five_step_model):
        bounds = escape_probability_bounds(five_step_model, 25)
        a = survival_sequence(five_step_model, 25).terms
        for k, (lo, _) in enumerate(bounds.intervals):
            assert lo == a[k] - bounds.g_sequence.terms[k]


class TestMemoryBudget:
    def test_budget_exceeded_suggests_horizon(self, five_step_model, monkeypatch):
        monkeypatch.setenv("CONEWALK_MEM_BUDGET", str(10_000))
        with pytest.raises(MemoryBudgetExceeded) as exc:
            survival_sequence(five_step_model, 500)
        assert "try horizon" in str(exc.value)

    def test_budget_allows_small_horizon(self, five_step_model, monkeypatch):
        monkeypatch.setenv("CONEWALK_MEM_BUDGET", str(2 * 2 ** 30))
        seq = survival_sequence(five_step_model, 5)
        assert len(seq.terms) == 6
