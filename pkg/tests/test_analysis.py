import numpy as np
import pytest

from tcmsim import (LITERAL, ConfigurationError, TimeSeries, coherent_field,
                    collapse_windows, detect_revival_peaks, deviation_report,
                    mode_sweep, oscillation_rate)
from tcmsim.analysis import SweepRow, moving_average
from tcmsim.pipeline import closed_form_series


def flat_series(gts, c=0.0, w=0.0):
    n = gts.size
    return TimeSeries(gt=gts, w=np.full(n, w), concurrence=np.full(n, c),
                      eof=np.zeros(n))


def test_series_validation():
    gts = np.linspace(0, 1, 10)
    with pytest.raises(ConfigurationError):
        TimeSeries(gt=gts[::-1], w=np.zeros(10), concurrence=np.zeros(10),
                   eof=np.zeros(10))
    with pytest.raises(ConfigurationError):
        TimeSeries(gt=gts, w=np.full(10, 1.5), concurrence=np.zeros(10),
                   eof=np.zeros(10))
    with pytest.raises(ConfigurationError):
        TimeSeries(gt=gts, w=np.zeros(10), concurrence=np.full(10, 1.2),
                   eof=np.zeros(10))


def test_moving_average_constant():
    assert np.allclose(moving_average(np.ones(20), 3), np.ones(20))


def test_detect_triangular_bump():
    gts = np.linspace(0, 20, 801)
    w = np.maximum(0.0, 1.0 - np.abs(gts - 10.0) / 2.0)
    series = TimeSeries(gt=gts, w=w, concurrence=np.zeros_like(w),
                        eof=np.zeros_like(w))
    report = detect_revival_peaks(series, "W", 1, 1.0)
    assert report.found == 1
    assert report.peak_times[0] == pytest.approx(10.0, abs=0.1)


def test_detect_requires_long_enough_series():
    gts = np.linspace(0, 5, 100)
    series = flat_series(gts)
    with pytest.raises(ConfigurationError):
        detect_revival_peaks(series, "W", 2, 25.0)


def test_detect_scale_invariance():
    gts = np.linspace(0, 20, 801)
    w = np.maximum(0.0, 1.0 - np.abs(gts - 10.0) / 2.0)
    base = TimeSeries(gt=gts, w=w, concurrence=np.zeros_like(w), eof=np.zeros_like(w))
    scaled = TimeSeries(gt=gts, w=0.3 * w, concurrence=np.zeros_like(w),
                        eof=np.zeros_like(w))
    t1 = detect_revival_peaks(base, "W", 1, 1.0).peak_times
    t2 = detect_revival_peaks(scaled, "W", 1, 1.0).peak_times
    assert t1 == t2


def test_collapse_windows_trivial():
    gts = np.linspace(0, 10, 101)
    assert collapse_windows(flat_series(gts, c=0.0), 0.02) == [(0.0, 10.0)]
    assert collapse_windows(flat_series(gts, c=0.5), 0.02) == []
    with pytest.raises(ConfigurationError):
        collapse_windows(flat_series(gts), 0.5)


def test_collapse_windows_mean5_consistent():
    # consistent convention, grid [0, 15]: at least one interval below the
    # threshold, with the concurrence exceeding 0.1 afterwards
    gts = np.linspace(0, 15, 900)
    series = closed_form_series([coherent_field(5.0)], gts)
    wins = collapse_windows(series, 0.02)
    assert wins
    a, b = wins[0]
    assert series.concurrence[series.gt > b].max() > 0.1


def test_collapse_windows_sorted_disjoint():
    gts = np.linspace(0, 10, 201)
    c = np.where((gts > 2) & (gts < 4) | (gts > 6) & (gts < 7), 0.0, 0.5)
    wins = collapse_windows(TimeSeries(gt=gts, w=np.zeros_like(c),
                                       concurrence=c, eof=np.zeros_like(c)), 0.02)
    assert len(wins) == 2
    assert wins == sorted(wins)
    assert wins[0][1] < wins[1][0]


def test_oscillation_rate_cosine():
    gts = np.linspace(0, 2 * np.pi, 2001)
    series = TimeSeries(gt=gts, w=np.cos(2 * gts), concurrence=np.zeros_like(gts),
                        eof=np.zeros_like(gts))
    rate = oscillation_rate(series, "W", (0.0, 2 * np.pi))
    assert rate == pytest.approx(4 / (2 * np.pi), rel=1e-3)


def test_oscillation_rate_constant_and_offset_invariance():
    gts = np.linspace(0, 5, 500)
    assert oscillation_rate(flat_series(gts, w=0.3), "W", (0.0, 5.0)) == 0.0
    base = np.cos(3 * gts)
    s1 = TimeSeries(gt=gts, w=base * 0.5, concurrence=np.zeros_like(gts),
                    eof=np.zeros_like(gts))
    s2 = TimeSeries(gt=gts, w=base * 0.5 + 0.4, concurrence=np.zeros_like(gts),
                    eof=np.zeros_like(gts))
    r1 = oscillation_rate(s1, "W", (0.0, 5.0))
    r2 = oscillation_rate(s2, "W", (0.0, 5.0))
    assert r1 == r2


def test_oscillation_rate_window_validation():
    gts = np.linspace(0, 5, 100)
    with pytest.raises(ConfigurationError):
        oscillation_rate(flat_series(gts), "W", (1.0, 99.0))


def test_mode_sweep_wellformed():
    rows = mode_sweep([0.0, 1.0], 2.0, [1, 2], LITERAL,
                      sigma_width=4.0, coverage_epsilon=1e-8)
    assert len(rows) == 4
    assert all(isinstance(r, SweepRow) for r in rows)
    assert all(0.0 <= r.eof <= 1.0 for r in rows)
    at_zero = [r for r in rows if r.gt == 0.0]
    assert all(r.eof == 0.0 for r in at_zero)


def test_mode_sweep_errors():
    with pytest.raises(ConfigurationError):
        mode_sweep([1.0], 2.0, [1, 1], LITERAL)
    with pytest.raises(ConfigurationError):
        mode_sweep([1.0], 2.0, [], LITERAL)
    with pytest.raises(ConfigurationError):
        mode_sweep([], 2.0, [1], LITERAL)


def test_deviation_report_identical_and_mismatch():
    gts = np.linspace(0, 3, 50)
    series = closed_form_series([coherent_field(2.0)], gts)
    summary, combined = deviation_report(series, series)
    assert summary.max_dw == 0.0 and summary.max_dc == 0.0 and summary.max_def == 0.0
    assert np.all(combined.extras["delta_C"] == 0.0)
    other = closed_form_series([coherent_field(2.0)], np.linspace(0, 3, 49))
    with pytest.raises(ConfigurationError):
        deviation_report(series, other)


def test_mode_frequency_evidence():
    """The closed-form oscillation frequencies grow with the mode count, and
    the inversion's pre-collapse crossing rate ranks accordingly."""
    from tcmsim.closed_form import literal_stats
    freqs = []
    for m in (1, 2, 3):
        if m == 1:
            freqs.append(np.sqrt(4 * 25 + 6.0))
        else:
            cfg = np.full((1, m), 25)
            s = literal_stats(cfg, [coherent_field(25.0)] * m)
            d1 = (m - 1) * (2 * s["Sn"] + 3 * m) + 2 * (s["S1p"] * s["S2p"] - s["T12"])
            freqs.append(float(np.sqrt(d1[0])))
    assert freqs[0] < freqs[1] < freqs[2]

    gts = np.linspace(0, 10, 1200)
    rates = []
    for m in (1, 2, 3):
        series = closed_form_series([coherent_field(25.0)] * m, gts, LITERAL)
        rates.append(oscillation_rate(series, "W", (0.0, 1.0)))
    assert rates[0] < rates[1] < rates[2]
