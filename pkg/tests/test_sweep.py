from __future__ import annotations

from dataclasses import asdict

import pytest
from pydantic import ValidationError

from greenslab.config import LabConfig, SamplingConfig
from greenslab.core.models import Family, Verdict
from greenslab.lab.settings import RunConfig, SweepSettings
from greenslab.lab.sweep import (
    FAILS_TO_HOLDS,
    HOLDS_TO_FAILS,
    SweepPoint,
    _bisect,
    _kernel_signs,
    _transitions,
    run_sweep,
    sweep_values,
)

FAST = SamplingConfig(quadratic_samples=10, bump_samples=6, noise_samples=6, positive_samples=3)


def make_config(family: Family, n: int, lo: float, hi: float, steps: int, **sweep) -> RunConfig:
    return RunConfig(
        family=family,
        counts=[n],
        sweep=SweepSettings(range=(lo, hi), steps=steps, **sweep),
    )


def test_sweep_values_log_from_zero():
    values = sweep_values(SweepSettings(range=(0.0, 1e6), steps=8))
    assert values[0] == 0.0
    assert values[1:] == pytest.approx([1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6])


def test_sweep_values_variants():
    assert sweep_values(SweepSettings(range=(1.0, 100.0), steps=3)) == pytest.approx([1.0, 10.0, 100.0])
    assert sweep_values(SweepSettings(range=(0.0, 1.0), steps=3, log=False)) == [0.0, 0.5, 1.0]
    assert sweep_values(SweepSettings(range=(-1.0, 1.0), steps=3)) == [-1.0, 0.0, 1.0]


@pytest.mark.parametrize(
    "payload",
    [
        {"range": (1.0, 1.0), "steps": 3},
        {"range": (0.0, float("inf")), "steps": 3},
        {"range": (0.0, 1.0), "steps": 1},
        {"range": (0.0, 1.0), "steps": 3, "bisect_precision": 0.0},
    ],
)
def test_sweep_settings_validation(payload):
    with pytest.raises(ValidationError):
        SweepSettings(**payload)


def test_beam_threshold():
    config = make_config(Family.FOURTH_ORDER_1D, 99, 0.0, 1e6, 6, bisect_precision=1e-2)
    lab = LabConfig(sampling=FAST)
    report = run_sweep(config, lab)

    assert report.points[0].verdicts["positivity_preserving"] == Verdict.HOLDS.value
    assert report.points[-1].verdicts["positivity_preserving"] == Verdict.FAILS.value
    assert report.equivalence_consistent
    assert report.all_positive
    assert report.violations == []

    threshold = report.thresholds["positivity_preserving"]
    assert threshold is not None
    assert 0.0 < threshold.lower < threshold.upper
    assert threshold.upper - threshold.lower <= 1e-2 * threshold.upper
    assert threshold.lambda_min > 0.0
    assert threshold.min_kernel_entry < 0.0
    assert threshold.direction == HOLDS_TO_FAILS
    assert threshold.value == threshold.upper
    assert _kernel_signs(config, lab, threshold.lower)["positivity_preserving"]
    assert not _kernel_signs(config, lab, threshold.upper)["positivity_preserving"]


def test_second_order_has_no_threshold():
    config = make_config(Family.SECOND_ORDER_1D, 49, 0.0, 1e3, 5)
    report = run_sweep(config, LabConfig(sampling=FAST))
    assert report.thresholds == {"positivity_preserving": None, "row_mass_nonneg": None}
    assert all(point.verdicts["positivity_preserving"] == Verdict.HOLDS.value for point in report.points)


def test_workers_do_not_change_results():
    config = make_config(Family.FOURTH_ORDER_1D, 39, 0.0, 1e5, 4, bisect_precision=1e-2)
    serial = run_sweep(config, LabConfig(sampling=FAST, workers=1))
    parallel = run_sweep(config, LabConfig(sampling=FAST, workers=2))
    assert [asdict(point) for point in serial.points] == [asdict(point) for point in parallel.points]
    assert serial.thresholds == parallel.thresholds


def test_sweep_requires_settings():
    with pytest.raises(ValueError):
        run_sweep(RunConfig(family=Family.SECOND_ORDER_1D, counts=[9]))


def make_point(index: int, verdict: str) -> SweepPoint:
    return SweepPoint(index=index, value=float(index), admissible=True, verdicts={"positivity_preserving": verdict})


def test_transitions_in_both_directions():
    holds, fails = Verdict.HOLDS.value, Verdict.FAILS.value
    points = [make_point(i, v) for i, v in enumerate([fails, fails, holds, holds, fails])]
    assert _transitions(points, "positivity_preserving") == [(2, False), (4, True)]

    skipped = [make_point(0, holds), SweepPoint(index=1, value=1.0, admissible=False), make_point(2, fails)]
    assert _transitions(skipped, "positivity_preserving") == []
    assert _transitions([make_point(0, holds), make_point(1, holds)], "positivity_preserving") == []


def test_bisect_a_recovering_verdict(monkeypatch):
    import greenslab.lab.sweep as sweep

    real = sweep._kernel_signs

    def signs(config, lab, value):
        return {**real(config, lab, value), "positivity_preserving": value >= 3.0}

    monkeypatch.setattr(sweep, "_kernel_signs", signs)
    config = make_config(Family.FOURTH_ORDER_1D, 9, 0.0, 10.0, 2)
    threshold = _bisect(config, LabConfig(sampling=FAST), "positivity_preserving", 2.0, 10.0, 1e-4, holds_below=False)
    assert threshold.direction == FAILS_TO_HOLDS
    assert threshold.lower < 3.0 <= threshold.upper
    assert threshold.upper - threshold.lower <= 1e-4 * threshold.upper
    assert threshold.lambda_min is not None


def test_sweep_reports_a_recovering_verdict(monkeypatch):
    import greenslab.lab.sweep as sweep

    holds, fails = Verdict.HOLDS.value, Verdict.FAILS.value
    original = sweep._classify_point

    def classify_point(config, lab, index, value):
        point = original(config, lab, index, value)
        point.verdicts["positivity_preserving"] = holds if value >= 3.0 else fails
        return point

    real = sweep._kernel_signs

    def signs(config, lab, value):
        return {**real(config, lab, value), "positivity_preserving": value >= 3.0}

    monkeypatch.setattr(sweep, "_classify_point", classify_point)
    monkeypatch.setattr(sweep, "_kernel_signs", signs)
    config = make_config(Family.SECOND_ORDER_1D, 9, 0.0, 10.0, 6, log=False, bisect_precision=1e-3)
    report = run_sweep(config, LabConfig(sampling=FAST))
    threshold = report.thresholds["positivity_preserving"]
    assert threshold is not None
    assert threshold.direction == FAILS_TO_HOLDS
    assert (threshold.lower, threshold.upper) == pytest.approx((3.0, 3.0), abs=1e-2)
    assert report.thresholds["row_mass_nonneg"] is None


def test_beam_sweep_at_fine_grid():
    config = make_config(Family.FOURTH_ORDER_1D, 399, 0.0, 1e6, 40)
    report = run_sweep(config, LabConfig(sampling=FAST, workers=4))
    assert len(report.points) == 40
    assert report.equivalence_consistent
    assert report.all_positive
    assert report.violations == []

    threshold = report.thresholds["positivity_preserving"]
    assert threshold is not None
    assert threshold.direction == HOLDS_TO_FAILS
    assert threshold.lambda_min > 0.0
    assert threshold.min_kernel_entry < 0.0
    for point in report.points:
        if point.min_row_mass is not None and point.verdicts["row_mass_nonneg"] == Verdict.FAILS.value:
            assert point.witness is not None
            assert point.witness["mean"] < 0.0


def test_threshold_is_stable_under_refinement():
    lab = LabConfig(sampling=FAST)
    found = []
    for n in (399, 799):
        config = make_config(Family.FOURTH_ORDER_1D, n, 0.0, 1e6, 2)
        threshold = _bisect(config, lab, "positivity_preserving", 0.0, 1e6, 1e-3)
        assert threshold.lambda_min > 0.0
        found.append(threshold.value)
    assert found[1] == pytest.approx(found[0], rel=0.1)
