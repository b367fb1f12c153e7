import pytest

from refcast.engine import ClassCriteria, build_reference_class, empirical_distribution, required_uplift
from refcast.sampledata import (
    COST_TARGETS,
    TRAFFIC_TARGETS,
    make_sample_dataset,
    sample_dataset_csv,
)
from refcast.stats import share_outside_band, share_overrun, summarize


def class_sample(dataset, measure, ptype, regions=None):
    return build_reference_class(
        dataset,
        ClassCriteria(measure=measure, project_type=ptype,
                      regions=frozenset(regions) if regions else None),
    ).sample


class TestTargets:
    def test_cost_classes(self, bundled_dataset):
        for ptype, (n, mean, sd) in COST_TARGETS.items():
            s = summarize(class_sample(bundled_dataset, "cost_inaccuracy", ptype))
            assert s.n == n
            assert s.mean == pytest.approx(mean, abs=0.05)
            assert s.sd == pytest.approx(sd, abs=0.05)

    def test_traffic_classes(self, bundled_dataset):
        for ptype, (n, mean, sd) in TRAFFIC_TARGETS.items():
            s = summarize(class_sample(bundled_dataset, "traffic_inaccuracy", ptype))
            assert s.n == n
            assert s.mean == pytest.approx(mean, abs=0.05)
            assert s.sd == pytest.approx(sd, abs=0.05)

    def test_nine_in_ten_overrun(self, bundled_dataset):
        pooled = []
        for ptype in COST_TARGETS:
            pooled.extend(class_sample(bundled_dataset, "cost_inaccuracy", ptype))
        assert 0.88 <= share_overrun(pooled) <= 0.92

    def test_band_shares(self, bundled_dataset):
        rail = class_sample(bundled_dataset, "traffic_inaccuracy", "rail")
        road = class_sample(bundled_dataset, "traffic_inaccuracy", "road")
        assert abs(share_outside_band(rail, 20.0) - 0.84) <= 1 / 25
        assert abs(share_outside_band(road, 20.0) - 0.50) <= 0.03

    def test_rail_traffic_mostly_overestimated(self, bundled_dataset):
        rail = class_sample(bundled_dataset, "traffic_inaccuracy", "rail")
        assert sum(1 for v in rail if v < 0) / len(rail) >= 0.88

    def test_uk_rail_quantile_anchors_exact(self, bundled_dataset):
        uk = build_reference_class(
            bundled_dataset,
            ClassCriteria(measure="cost_inaccuracy", project_type="rail",
                          regions=frozenset({"UK"})),
        )
        dist = empirical_distribution(uk)
        assert uk.n == 21
        assert required_uplift(dist, 0.5) == 40.0
        assert required_uplift(dist, 0.1) == 68.0

    def test_inaccuracy_floor(self, bundled_dataset):
        for measure in ("cost_inaccuracy", "traffic_inaccuracy"):
            for ptype in ("rail", "road", "bridge_tunnel"):
                try:
                    sample = class_sample(bundled_dataset, measure, ptype)
                except Exception:
                    continue
                assert min(sample) > -100.0


class TestDeterminism:
    def test_same_seed_byte_identical(self):
        assert sample_dataset_csv(123) == sample_dataset_csv(123)

    def test_different_seed_different_records_same_targets(self):
        default = sample_dataset_csv()
        for seed in (5, 99):
            other = make_sample_dataset(seed)
            assert sample_dataset_csv(seed) != default
            s = summarize(class_sample(other, "cost_inaccuracy", "rail"))
            assert (s.n, round(s.mean, 1), round(s.sd, 1)) == (58, 44.7, 38.4)
            uk = build_reference_class(
                other,
                ClassCriteria(measure="cost_inaccuracy", project_type="rail",
                              regions=frozenset({"UK"})),
            )
            dist = empirical_distribution(uk)
            assert required_uplift(dist, 0.5) == 40.0
            assert required_uplift(dist, 0.1) == 68.0


class TestJointSubgroup:
    def test_twelve_rail_projects_carry_both_outcomes(self, bundled_dataset):
        joint = [
            r for r in bundled_dataset.records
            if r.project_type == "rail" and r.actual_cost is not None
            and r.actual_traffic is not None
        ]
        assert len(joint) == 12
        from refcast.records import cost_inaccuracy, traffic_inaccuracy

        cost_mean = sum(cost_inaccuracy(r) for r in joint) / 12
        traffic_mean = sum(traffic_inaccuracy(r) for r in joint) / 12
        assert cost_mean == pytest.approx(40.3, abs=3.0)
        assert traffic_mean == pytest.approx(-47.8, abs=3.0)
