import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from refcast.engine import (
    ClassCriteria,
    EmpiricalDistribution,
    SmallClassWarning,
    adjust_forecast,
    build_reference_class,
    delay_adjustment,
    empirical_distribution,
    quantile,
    reference_forecast,
    required_uplift,
    uplift_curve,
)
from refcast.errors import EmptyClassError

nonempty_samples = st.lists(
    st.floats(min_value=-99.0, max_value=400.0), min_size=1, max_size=50
)


def dist(values) -> EmpiricalDistribution:
    return EmpiricalDistribution(values=tuple(sorted(float(v) for v in values)))


class TestBuildClass:
    def test_rail_cost_class_size(self, bundled_dataset):
        ref = build_reference_class(
            bundled_dataset, ClassCriteria(measure="cost_inaccuracy", project_type="rail")
        )
        assert ref.n == 58
        assert len(ref.member_ids) == 58

    def test_road_traffic_class_size(self, bundled_dataset):
        ref = build_reference_class(
            bundled_dataset,
            ClassCriteria(measure="traffic_inaccuracy", project_type="road"),
        )
        assert ref.n == 183

    def test_no_match_is_refused(self, bundled_dataset):
        with pytest.raises(EmptyClassError, match="empty reference class"):
            build_reference_class(
                bundled_dataset,
                ClassCriteria(measure="cost_inaccuracy", project_type="other"),
            )

    def test_members_satisfy_criteria(self, bundled_dataset):
        criteria = ClassCriteria(
            measure="cost_inaccuracy", project_type="rail", regions=frozenset({"UK"})
        )
        ref = build_reference_class(bundled_dataset, criteria)
        by_id = {r.id: r for r in bundled_dataset.records}
        assert ref.n == len(ref.sample) == len(ref.member_ids)
        for rid in ref.member_ids:
            assert criteria.matches(by_id[rid])
            assert by_id[rid].actual_cost is not None

    def test_bad_criteria(self):
        with pytest.raises(ValueError):
            ClassCriteria(measure="speed")
        with pytest.raises(ValueError):
            ClassCriteria(project_type="canal")


class TestQuantile:
    def test_sorting(self):
        assert dist([30, 10, 20]).values == (10.0, 20.0, 30.0)

    def test_single_value(self):
        assert quantile(dist([7]), 0.1) == 7.0

    def test_interpolation_rule(self):
        assert quantile(dist([10, 20, 30, 40]), 0.5) == 25.0

    def test_q_bounds(self):
        with pytest.raises(ValueError):
            quantile(dist([1.0]), -0.1)
        with pytest.raises(ValueError):
            quantile(dist([1.0]), 1.1)

    def test_against_numpy_oracle(self):
        rng = np.random.Generator(np.random.PCG64(17))
        sample = rng.normal(30, 25, 17)
        d = dist(sample)
        for q in (0.1, 0.5, 0.9):
            expected = float(np.quantile(sample, q))
            assert math.isclose(quantile(d, q), expected, rel_tol=1e-9)

    @given(nonempty_samples, st.floats(min_value=0.0, max_value=1.0))
    def test_bounds_property(self, values, q):
        d = dist(values)
        result = quantile(d, q)
        eps = 1e-9 * (1.0 + abs(d.values[-1]) + abs(d.values[0]))
        assert d.values[0] - eps <= result <= d.values[-1] + eps

    @given(nonempty_samples)
    def test_endpoints_exact(self, values):
        d = dist(values)
        assert quantile(d, 0.0) == d.values[0]
        assert quantile(d, 1.0) == d.values[-1]

    @given(nonempty_samples, st.floats(min_value=0.0, max_value=1.0),
           st.floats(min_value=0.01, max_value=100.0))
    def test_scale_equivariance(self, values, q, k):
        d = dist(values)
        scaled = dist([k * v for v in values])
        assert math.isclose(
            quantile(scaled, q), k * quantile(d, q), rel_tol=1e-9, abs_tol=1e-9
        )

    def test_empirical_distribution_is_permutation(self):
        rng = np.random.Generator(np.random.PCG64(23))
        from refcast.engine import ReferenceClass

        for _ in range(25):
            sample = tuple(rng.normal(0, 40, int(rng.integers(1, 40))))
            ref = ReferenceClass(
                name="x", criteria=ClassCriteria(), member_ids=("p",) * len(sample),
                sample=sample,
            )
            d = empirical_distribution(ref)
            assert sorted(sample) == list(d.values)
            assert sorted(map(float, sample)) == sorted(d.values)


class TestUplift:
    def test_constant_distribution(self):
        assert required_uplift(dist([5, 5, 5]), 0.25) == 5.0

    def test_anchors_on_bundled_uk_rail(self, bundled_dataset):
        ref = build_reference_class(
            bundled_dataset,
            ClassCriteria(measure="cost_inaccuracy", project_type="rail",
                          regions=frozenset({"UK"})),
        )
        d = empirical_distribution(ref)
        assert required_uplift(d, 0.5) == 40.0
        assert required_uplift(d, 0.1) == 68.0

    def test_risk_bounds(self):
        with pytest.raises(ValueError):
            required_uplift(dist([1.0]), 0.0)
        with pytest.raises(ValueError):
            required_uplift(dist([1.0]), 1.0001)

    @given(nonempty_samples, st.floats(0.01, 0.99), st.floats(0.001, 0.5))
    def test_monotone_in_risk(self, values, risk, step):
        d = dist(values)
        higher = min(risk + step, 1.0)
        assert required_uplift(d, higher) <= required_uplift(d, risk)

    def test_curve_points_and_invariant(self, bundled_dataset):
        ref = build_reference_class(
            bundled_dataset,
            ClassCriteria(measure="cost_inaccuracy", project_type="rail",
                          regions=frozenset({"UK"})),
        )
        curve = uplift_curve(empirical_distribution(ref), [0.1, 0.5])
        assert curve.points == ((0.1, 68.0), (0.5, 40.0))

    def test_curve_constant(self):
        curve = uplift_curve(dist([5, 5]), [0.2, 0.4, 0.9])
        assert all(u == 5.0 for _, u in curve.points)

    def test_curve_non_increasing_on_random(self):
        rng = np.random.Generator(np.random.PCG64(29))
        d = dist(rng.normal(20, 60, 37))
        grid = [i / 100 for i in range(1, 100)]
        ups = [u for _, u in uplift_curve(d, grid).points]
        assert all(a >= b for a, b in zip(ups, ups[1:]))

    def test_curve_grid_validation(self):
        with pytest.raises(ValueError):
            uplift_curve(dist([1.0]), [0.5, 0.5])
        with pytest.raises(ValueError):
            uplift_curve(dist([1.0]), [])

    def test_curve_csv(self):
        csv_text = uplift_curve(dist([40.0, 68.0, 10.0]), [0.1, 0.5]).to_csv()
        assert csv_text.splitlines()[0] == "acceptable_risk,uplift_pct"


class TestAdjust:
    def test_forty_percent_on_four_billion(self):
        adj = adjust_forecast(4000.0, 40.0)
        assert adj.uplift_amount == 1600.0
        assert adj.adjusted_estimate == 5600.0

    def test_sixty_eight_percent_rounding_band(self):
        adj = adjust_forecast(4000.0, 68.0)
        assert adj.uplift_amount == 2720.0
        assert abs(adj.uplift_amount - 2700.0) <= 20.0

    def test_zero_uplift_identity(self):
        assert adjust_forecast(123.4, 0.0).adjusted_estimate == 123.4

    def test_clamp(self):
        adj = adjust_forecast(100.0, -10.0, clamp_negative=True)
        assert adj.uplift_pct == 0.0
        assert adj.adjusted_estimate == 100.0
        assert adj.clamped

    def test_negative_without_clamp(self):
        adj = adjust_forecast(100.0, -10.0)
        assert adj.adjusted_estimate == 90.0
        assert not adj.clamped

    def test_bad_base(self):
        with pytest.raises(ValueError):
            adjust_forecast(0.0, 10.0)

    @given(st.floats(min_value=0.01, max_value=1e8),
           st.floats(min_value=-99.0, max_value=300.0))
    def test_apply_remove_round_trip(self, base, uplift):
        adj = adjust_forecast(base, uplift)
        back = adj.adjusted_estimate / (1.0 + uplift / 100.0)
        assert math.isclose(back, base, rel_tol=1e-9)


class TestDelay:
    def test_eight_billion_one_year(self):
        extra_pct, extra_cost = delay_adjustment(8000.0, 1.0)
        assert extra_pct == 4.64
        assert 368.0 <= extra_cost <= 372.0

    def test_per_day_about_one_million(self):
        _, extra_cost = delay_adjustment(8000.0, 1.0)
        assert 0.98 <= extra_cost / 365.0 <= 1.05

    def test_zero_delay(self):
        assert delay_adjustment(5000.0, 0.0) == (0.0, 0.0)

    def test_negative_delay_rejected(self):
        with pytest.raises(ValueError):
            delay_adjustment(100.0, -1.0)

    @given(st.floats(min_value=1.0, max_value=1e6),
           st.floats(min_value=0.0, max_value=50.0),
           st.floats(min_value=0.0, max_value=50.0))
    def test_additivity(self, base, t1, t2):
        p1, c1 = delay_adjustment(base, t1)
        p2, c2 = delay_adjustment(base, t2)
        p12, c12 = delay_adjustment(base, t1 + t2)
        assert math.isclose(p1 + p2, p12, rel_tol=1e-9, abs_tol=1e-12)
        assert math.isclose(c1 + c2, c12, rel_tol=1e-9, abs_tol=1e-9)


class TestReferenceForecast:
    def test_worked_example(self, bundled_dataset):
        ref = build_reference_class(
            bundled_dataset,
            ClassCriteria(measure="cost_inaccuracy", project_type="rail",
                          regions=frozenset({"UK"})),
        )
        report = reference_forecast(4000.0, ref, acceptable_risk=0.5)
        assert report.adjusted_estimate == 5600.0
        assert not report.clamped

    def test_delay_composes_additively(self, bundled_dataset):
        ref = build_reference_class(
            bundled_dataset,
            ClassCriteria(measure="cost_inaccuracy", project_type="rail",
                          regions=frozenset({"UK"})),
        )
        report = reference_forecast(4000.0, ref, acceptable_risk=0.5, delay_years=1.0)
        assert report.uplift_pct == pytest.approx(44.64)
        assert report.adjusted_estimate == pytest.approx(5785.6)

    def test_matches_adjust_forecast_composition(self, bundled_dataset):
        ref = build_reference_class(
            bundled_dataset, ClassCriteria(measure="cost_inaccuracy", project_type="rail")
        )
        d = empirical_distribution(ref)
        report = reference_forecast(1234.5, ref, acceptable_risk=0.3)
        adj = adjust_forecast(1234.5, required_uplift(d, 0.3))
        assert report.uplift_pct == adj.uplift_pct
        assert report.adjusted_estimate == adj.adjusted_estimate

    def test_constant_zero_class(self):
        from refcast.engine import ReferenceClass

        ref = ReferenceClass(name="flat", criteria=ClassCriteria(),
                             member_ids=tuple("abcdefghij"), sample=(0.0,) * 10)
        report = reference_forecast(500.0, ref, acceptable_risk=0.5)
        assert report.adjusted_estimate == 500.0
        assert not report.clamped

    def test_small_class_warns(self):
        from refcast.engine import ReferenceClass

        ref = ReferenceClass(name="thin", criteria=ClassCriteria(),
                             member_ids=("a", "b"), sample=(10.0, 20.0))
        with pytest.warns(SmallClassWarning):
            reference_forecast(100.0, ref, acceptable_risk=0.5)

    def test_report_invariants(self, bundled_dataset):
        ref = build_reference_class(
            bundled_dataset, ClassCriteria(measure="cost_inaccuracy", project_type="road")
        )
        report = reference_forecast(1000.0, ref, acceptable_risk=0.25, delay_years=2.5)
        assert math.isclose(
            report.adjusted_estimate,
            report.base_estimate * (1 + report.uplift_pct / 100.0),
            rel_tol=1e-12,
        )
        assert math.isclose(
            report.uplift_amount,
            report.adjusted_estimate - report.base_estimate,
            rel_tol=1e-9, abs_tol=1e-9,
        )

    def test_json_fields(self, bundled_dataset):
        ref = build_reference_class(
            bundled_dataset, ClassCriteria(measure="cost_inaccuracy", project_type="rail")
        )
        payload = reference_forecast(100.0, ref, acceptable_risk=0.5).to_json_dict()
        assert list(payload) == [
            "base_estimate", "class_name", "acceptable_risk", "uplift_pct",
            "uplift_amount", "adjusted_estimate", "clamped",
        ]
