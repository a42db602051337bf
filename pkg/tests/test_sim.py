import io
import math
from dataclasses import replace

import numpy as np
import pytest

from cache_noma.caching import CacheSpec
from cache_noma.channel import GeometryConfig
from cache_noma.rng import trial_stream
from cache_noma.sim import (
    CSV_HEADER, SCHEMES, ExperimentConfig, SchemeResult, TrialRecord, run_experiment, run_trial, summarize,
    write_means_csv, write_trials_csv,
)


def _rec(t, value=float("nan"), k=0):
    res = {s: SchemeResult(t, 2 * t) for s in SCHEMES}
    return TrialRecord("", value, k, 1e-3, 1e-2, "I", False, res)


def test_summary_of_one_record():
    row = summarize([_rec(5.0)])[0]
    assert row.t_mean == 5.0 and row.t_se == 0.0 and row.count == 1


def test_summary_of_equal_records():
    row = summarize([_rec(3.0), _rec(3.0, k=1)])[0]
    assert row.t_mean == 3.0 and row.t_se == 0.0


def test_summary_matches_hand_arithmetic():
    vals = np.arange(100, dtype=float) ** 1.5
    row = summarize([_rec(v, k=k) for k, v in enumerate(vals)])[0]
    mean = sum(vals) / 100
    var = sum((v - mean) ** 2 for v in vals) / 99
    assert row.t_mean == pytest.approx(mean, rel=1e-12)
    assert row.t_se == pytest.approx(math.sqrt(var / 100), rel=1e-12)
    assert row.energy_mean == pytest.approx(2 * mean, rel=1e-12)


def test_summary_rejects_empty():
    with pytest.raises(ValueError):
        summarize([])


def test_summary_groups_by_sweep_value_in_order():
    rows = summarize([_rec(1.0, 0.5), _rec(2.0, 0.1), _rec(3.0, 0.5, 1)])
    assert [r.sweep_value for r in rows[::4]] == [0.5, 0.1]
    assert rows[0].t_mean == 2.0


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(realizations=0)
    with pytest.raises(ValueError):
        ExperimentConfig(sweep_var="bogus", sweep_values=(1,))
    with pytest.raises(ValueError):
        ExperimentConfig(sweep_var="c_iA", sweep_values=(1.5,))
    with pytest.raises(ValueError):
        ExperimentConfig(sweep_var="r_i_km", sweep_values=(2.5,))


def test_runs_are_bit_identical():
    cfg = ExperimentConfig(realizations=3, seed=42)
    a, b = run_experiment(cfg), run_experiment(cfg)
    fa, fb = io.StringIO(), io.StringIO()
    write_trials_csv(a, fa)
    write_trials_csv(b, fb)
    assert fa.getvalue() == fb.getvalue()


def test_parallel_run_matches_serial():
    cfg = ExperimentConfig(realizations=4, seed=9, sweep_var="c_iB", sweep_values=(0.2, 0.9))
    a = run_experiment(cfg, workers=1)
    b = run_experiment(cfg, workers=4)
    assert [r.time("proposed") for r in a] == [r.time("proposed") for r in b]


def test_common_random_numbers_share_channels():
    cfg = ExperimentConfig(realizations=3, seed=1, sweep_var="c_iA", sweep_values=(0.0, 0.5))
    recs = run_experiment(cfg)
    assert [r.alpha_i for r in recs[:3]] == [r.alpha_i for r in recs[3:]]
    indep = run_experiment(replace(cfg, common_random_numbers=False))
    assert [r.alpha_i for r in indep[:3]] != [r.alpha_i for r in indep[3:]]


def test_records_are_canonical_and_priced():
    recs = run_experiment(ExperimentConfig(realizations=10, seed=3))
    P = GeometryConfig().tx_power_w
    for r in recs:
        assert r.alpha_i <= r.alpha_j
        for s in SCHEMES:
            assert r.results[s].energy_j == pytest.approx(P * r.results[s].t_s, rel=1e-15)


def test_csv_layout():
    buf = io.StringIO()
    write_trials_csv(run_experiment(ExperimentConfig(realizations=1, seed=0)), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + len(SCHEMES)
    t = lines[1].split(",")[7]
    assert len(t.replace(".", "").replace("e+", "").lstrip("0")) <= 9
    means = io.StringIO()
    write_means_csv(summarize(run_experiment(ExperimentConfig(realizations=2))), means)
    assert means.getvalue().startswith("sweep_var,sweep_value,scheme,count,T_mean")


def test_swapped_labels_swap_the_cache():
    # Force the nominal weak UE to be stronger: the harness relabels both the
    # channel and the cache, so the proposed scheme sees the mirrored spec.
    geom = GeometryConfig()
    cache = CacheSpec.from_mbytes((0.2, 0.8, 0.8, 0.2), 500, 300)
    for k in range(40):
        ch, case, res = run_trial(geom, cache, trial_stream(0, 0, k))
        if ch.swapped:
            break
    else:
        pytest.skip("no swapped draw in 40 trials")
    mirrored = cache.swapped()
    assert mirrored.v_a_bits == 300 * 8e6
    assert all(res[s].t_s > 0 for s in SCHEMES)


def test_without_side_information_proposed_equals_noma_cache():
    # Cache holdings equal per file: both subfile-1 volumes vanish.
    geom = GeometryConfig()
    for c in ((0.3, 0.6, 0.3, 0.6), (0.9, 0.1, 0.2, 0.7)):
        cache = CacheSpec.from_mbytes(c, 500, 500)
        for k in range(5):
            _, _, res = run_trial(geom, cache, trial_stream(2, 0, k), refine_boundaries=True)
            assert res["proposed"].t_s == pytest.approx(res["noma-cache"].t_s, rel=1e-8)


def test_fully_cached_requests_make_cache_schemes_coincide():
    cache = CacheSpec.from_mbytes((1.0, 0.2, 0.3, 1.0), 500, 500)
    _, _, res = run_trial(GeometryConfig(), cache, trial_stream(0, 0, 0))
    assert res["proposed"].t_s == res["noma-cache"].t_s == res["oma"].t_s == 0.0
    assert res["noma-nocache"].t_s > 0


def test_power_sweep_trades_time_for_energy():
    cfg = ExperimentConfig(realizations=20, seed=5, sweep_var="tx_power_dbm", sweep_values=(20.0, 46.0))
    rows = {(r.sweep_value, r.scheme): r for r in summarize(run_experiment(cfg))}
    for s in SCHEMES:
        lo, hi = rows[(20.0, s)], rows[(46.0, s)]
        assert hi.t_mean <= lo.t_mean
        assert hi.energy_mean >= lo.energy_mean
