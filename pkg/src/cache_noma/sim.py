"""Monte Carlo harness: random placements and fading, all schemes per trial."""
import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import noma_solve, oma_solve, noma_demands
from .caching import CacheSpec, classify_case, subfile_volumes
from .channel import DegenerateChannelError, GeometryConfig, channel_from_placement, sample_placement
from .delivery import solve_delivery
from .rng import trial_stream

SCHEMES = ("proposed", "noma-cache", "noma-nocache", "oma")
SWEEP_VARS = ("r_i_km", "r_j_km", "c_iA", "c_iB", "tx_power_dbm")
CSV_HEADER = ("sweep_var", "sweep_value", "realization", "alpha_i", "alpha_j", "case",
              "scheme", "T_s", "energy_J", "order_n", "branch")
MEANS_HEADER = ("sweep_var", "sweep_value", "scheme", "count", "T_mean", "T_se",
                "energy_mean", "energy_se")
MAX_RESAMPLES = 16


def default_cache():
    return CacheSpec.from_mbytes((0.2, 0.8, 0.8, 0.2), 500.0, 500.0)


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    cache: CacheSpec = field(default_factory=default_cache)
    realizations: int = 100
    seed: int = 0
    sweep_var: str = None
    sweep_values: tuple = ()
    common_random_numbers: bool = True
    refine_boundaries: bool = True  # exact optimum, including power-region boundaries

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.sweep_var is not None:
            if self.sweep_var not in SWEEP_VARS:
                raise ValueError(f"sweep variable must be one of {SWEEP_VARS}")
            if not self.sweep_values:
                raise ValueError("sweep_values must be nonempty")
            for v in self.sweep_values:
                self.point(v)  # validates the domain

    def point(self, value):
        """Geometry and cache for one sweep value."""
        g, c = self.geometry, self.cache
        var = self.sweep_var
        if var in ("r_i_km", "r_j_km", "tx_power_dbm"):
            g = replace(g, **{var: float(value)})
        elif var in ("c_iA", "c_iB"):
            c = replace(c, **{var: float(value)})
        return g, c

    def sweep_points(self):
        if self.sweep_var is None:
            return [(None, self.geometry, self.cache)]
        return [(v, *self.point(v)) for v in self.sweep_values]


@dataclass(frozen=True)
class SchemeResult:
    t_s: float
    energy_j: float
    order_n: str = ""
    branch: str = ""


@dataclass(frozen=True)
class TrialRecord:
    sweep_var: str
    sweep_value: float
    realization: int
    alpha_i: float
    alpha_j: float
    case: str
    swapped: bool
    results: dict

    def time(self, scheme):
        return self.results[scheme].t_s


def _draw_channel(geometry, rng):
    for _ in range(MAX_RESAMPLES):
        try:
            return channel_from_placement(geometry, *sample_placement(geometry, rng))
        except DegenerateChannelError:
            continue
    raise DegenerateChannelError(f"fading gain was zero in {MAX_RESAMPLES} consecutive draws")


def run_trial(geometry, cache, rng, refine_boundaries=False):
    """Solve all schemes on one channel draw; returns ``(channel, case, results)``."""
    ch = _draw_channel(geometry, rng)
    spec = cache.swapped() if ch.swapped else cache
    info = classify_case(spec)
    beta = subfile_volumes(spec, info).beta
    P, bw, alpha = geometry.tx_power_w, geometry.bandwidth_hz, ch.alpha

    prop = solve_delivery(info.case, beta, alpha, P, bw, refine_boundaries=refine_boundaries)
    n_cache = noma_solve(0, 0, alpha, P, bw, with_cache=True, cache_spec=spec)
    n_plain = noma_solve(0, 0, alpha, P, bw, with_cache=False, cache_spec=spec)
    oma = oma_solve(*noma_demands(spec, True), alpha, P, bw)

    def res(t, n="", br=""):
        return SchemeResult(t, P * t if math.isfinite(t) else math.inf, n, br)

    results = {
        "proposed": res(prop.t_star, prop.plan.label, prop.plan.branch.value),
        "noma-cache": res(n_cache.t_star, "IV"),
        "noma-nocache": res(n_plain.t_star, "IV"),
        "oma": res(oma.t_star),
    }
    return ch, info.case, results


def run_experiment(config, workers=1):
    """Records ordered by (sweep point, realization); deterministic for a seed."""
    jobs = []
    for s_idx, (value, geom, cache) in enumerate(config.sweep_points()):
        stream_idx = 0 if config.common_random_numbers else s_idx
        for k in range(config.realizations):
            jobs.append((value, geom, cache, stream_idx, k))

    def one(job):
        value, geom, cache, stream_idx, k = job
        rng = trial_stream(config.seed, stream_idx, k)
        ch, case, results = run_trial(geom, cache, rng, config.refine_boundaries)
        return TrialRecord(config.sweep_var or "", value if value is not None else float("nan"),
                           k, ch.alpha_i, ch.alpha_j, case.value, ch.swapped, results)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(one, jobs))
    return [one(j) for j in jobs]


@dataclass(frozen=True)
class SummaryRow:
    sweep_var: str
    sweep_value: float
    scheme: str
    count: int
    t_mean: float
    t_se: float
    energy_mean: float
    energy_se: float


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    if len(x) == 1:
        return float(x[0]), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x)))


def summarize(records):
    """Per (sweep value, scheme) means and standard errors, in first-seen order."""
    records = list(records)
    if not records:
        raise ValueError("no records to summarize")
    groups = {}
    for rec in records:
        for scheme, r in rec.results.items():
            key = (rec.sweep_var, rec.sweep_value if not math.isnan(rec.sweep_value) else None, scheme)
            groups.setdefault(key, []).append(r)
    rows = []
    for (var, value, scheme), rs in groups.items():
        tm, ts = _mean_se([r.t_s for r in rs])
        em, es = _mean_se([r.energy_j for r in rs])
        rows.append(SummaryRow(var, value if value is not None else float("nan"), scheme,
                               len(rs), tm, ts, em, es))
    return rows


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def write_trials_csv(records, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rec in records:
        for scheme in SCHEMES:
            r = rec.results[scheme]
            w.writerow([rec.sweep_var, _fmt(float(rec.sweep_value)), rec.realization,
                        _fmt(rec.alpha_i), _fmt(rec.alpha_j), rec.case, scheme,
                        _fmt(r.t_s), _fmt(r.energy_j), r.order_n, r.branch])


def write_means_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(MEANS_HEADER)
    for r in rows:
        w.writerow([r.sweep_var, _fmt(float(r.sweep_value)), r.scheme, r.count,
                    _fmt(r.t_mean), _fmt(r.t_se), _fmt(r.energy_mean), _fmt(r.energy_se)])
