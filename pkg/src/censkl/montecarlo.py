"""Seeded, parallel Monte Carlo studies.

Replicate ``i`` of a study with base seed ``s`` always draws from the stream
``SeedSequence(s, spawn_key=(i,))``. Work is split into fixed-size blocks of
replicates, so results are identical for any number of workers and any
scheduling order.
"""

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_sizes
from .estimators import EntropyKind, estimate_rows, exact_reference_hbar
from .exceptions import CensKLError, ParameterError, TableMissError
from .gof import TestStatisticKind, compute_statistic, rejects
from .sampling import EXPONENTIAL, DistributionSpec, censor_rows, get_alternative, sample
from .tables import (
    ALPHAS,
    GENERATED,
    CriticalValueRow,
    CriticalValueTable,
    default_table,
    window_for,
)

BLOCK_SIZE = 512
DEFAULT_REPS = 10_000


def replicate_rng(base_seed, index):
    """Independent generator for replicate ``index`` of a study."""
    return np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=(index,)))


def _draw_block(args):
    spec, n, seed, start, stop = args
    raw = np.empty((stop - start, n))
    for row, index in enumerate(range(start, stop)):
        raw[row] = sample(spec, n, replicate_rng(seed, index))
    raw.sort(axis=1)
    return raw


def draw_ordered(spec, n, reps, seed, workers=1):
    """Fully ordered samples of size ``n``, one replicate per row.

    Censor to ``r`` observations by slicing ``[:, :r]``; slicing one draw
    gives common random numbers across ``r``.
    """
    if reps < 1:
        raise ParameterError(f"reps must be >= 1, got {reps}")
    spec = EXPONENTIAL if spec is None else spec
    tasks = [
        (spec, n, seed, start, min(start + BLOCK_SIZE, reps))
        for start in range(0, reps, BLOCK_SIZE)
    ]
    if workers is None or workers <= 1 or len(tasks) == 1:
        blocks = [_draw_block(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_draw_block, tasks))
    return np.concatenate(blocks, axis=0)


def draw_censored(spec, n, r, reps, seed, workers=1):
    check_sizes(n, r)
    return censor_rows(draw_ordered(spec, n, reps, seed, workers), r)


def empirical_quantile(values, p):
    """The ``ceil(p * N)``-th smallest value.

    With this convention exactly ``floor((1 - p) * N)`` of ``N`` distinct
    values exceed the result.
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise ParameterError("empirical quantile of an empty sample")
    if not 0.0 < p < 1.0:
        raise ParameterError(f"p must lie in (0, 1), got {p}")
    k = max(1, math.ceil(round(p * values.size, 9)))
    return float(np.partition(values, k - 1)[k - 1])


def _lower_quantile(values, p):
    # exactly floor(p * N) distinct values fall strictly below the result
    values = np.asarray(values, dtype=float).ravel()
    k = min(values.size - 1, math.floor(round(p * values.size, 9)))
    return float(np.partition(values, k)[k])


def _evaluate(kind, x, n, m, k, seed):
    try:
        return np.asarray(compute_statistic(kind, x, n, m, k))
    except CensKLError as err:
        for index, row in enumerate(x):
            try:
                compute_statistic(kind, row, n, m, k)
            except CensKLError:
                raise type(err)(f"{err} [replicate {index}, seed {seed}]") from err
        raise


@dataclass
class SimulationConfig:
    """Description of one Monte Carlo cell."""

    statistic: TestStatisticKind
    n: int
    r: int
    m: int | None = None
    alpha_levels: tuple = ALPHAS
    reps: int = DEFAULT_REPS
    base_seed: int = 0
    alternative: DistributionSpec | str | None = None
    k: int = 3

    def __post_init__(self):
        self.statistic = TestStatisticKind.parse(self.statistic)
        self.n, self.r = check_sizes(self.n, self.r)
        if self.reps < 100:
            raise ParameterError(f"reps must be >= 100, got {self.reps}")
        self.alpha_levels = tuple(float(a) for a in self.alpha_levels)
        if any(not 0.0 < a < 1.0 for a in self.alpha_levels):
            raise ParameterError(f"alpha levels must lie in (0, 1): {self.alpha_levels}")
        if self.m is None and self.statistic.uses_window:
            self.m = window_for(self.statistic, self.r, k=self.k)
        if not self.statistic.uses_window:
            self.m = None

    @property
    def spec(self):
        if self.alternative is None:
            return EXPONENTIAL
        if isinstance(self.alternative, str):
            return get_alternative(self.alternative).spec
        return self.alternative

    @property
    def alternative_label(self):
        if self.alternative is None:
            return "null"
        if isinstance(self.alternative, str):
            return get_alternative(self.alternative).code
        return self.alternative.label()


@dataclass
class StudyResult:
    """Rows of a study, ready for CSV export."""

    columns: tuple
    rows: list = field(default_factory=list)
    seed: int | None = None
    reps: int | None = None

    def column(self, name):
        return [row[name] for row in self.rows]

    def where(self, **criteria):
        return [row for row in self.rows if all(row[k] == v for k, v in criteria.items())]

    def to_csv(self, fh=None):
        out = io.StringIO() if fh is None else fh
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(row[c]) for c in self.columns])
        return out.getvalue() if fh is None else None


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


CRITICAL_COLUMNS = ("statistic", "n", "r", "m", "alpha", "critical_value", "provenance", "seed", "reps")


def _critical_rows(kind, values, n, r, m, alphas, reps, seed):
    rows = []
    for alpha in alphas:
        if kind.two_sided:
            for label, cv in (("z:lower", _lower_quantile(values, alpha / 2)),
                              ("z:upper", empirical_quantile(values, 1 - alpha / 2))):
                rows.append(dict(statistic=label, n=n, r=r, m=None, alpha=alpha,
                                 critical_value=cv, provenance=GENERATED, seed=seed, reps=reps))
        else:
            rows.append(dict(statistic=kind.value, n=n, r=r, m=m, alpha=alpha,
                             critical_value=empirical_quantile(values, 1 - alpha),
                             provenance=GENERATED, seed=seed, reps=reps))
    return rows


def critical_value(config, workers=1):
    """Monte Carlo critical values of one statistic under the Exp(1) null."""
    if config.alternative is not None:
        raise ParameterError("critical values are computed under the null; drop the alternative")
    x = draw_censored(None, config.n, config.r, config.reps, config.base_seed, workers)
    values = _evaluate(config.statistic, x, config.n, config.m, config.k, config.base_seed)
    rows = _critical_rows(config.statistic, values, config.n, config.r, config.m,
                          config.alpha_levels, config.reps, config.base_seed)
    return StudyResult(CRITICAL_COLUMNS, rows, config.base_seed, config.reps)


def generate_table(statistic, n, r_values, alphas=ALPHAS, reps=DEFAULT_REPS, seed=0,
                   m=None, k=3, workers=1):
    """Critical values for a block of ``r`` values sharing one null draw."""
    kind = TestStatisticKind.parse(statistic)
    r_values = list(r_values)
    for r in r_values:
        check_sizes(n, r)
    # resolve every window before the expensive draw so table misses fail fast
    windows = {r: (m if m is not None else window_for(kind, r, k=k)) if kind.uses_window else None
               for r in r_values}
    ordered = draw_ordered(None, n, reps, seed, workers)
    rows = []
    for r in r_values:
        values = _evaluate(kind, ordered[:, :r], n, windows[r], k, seed)
        rows.extend(_critical_rows(kind, values, n, r, windows[r], alphas, reps, seed))
    return CriticalValueTable([CriticalValueRow(**row) for row in rows])


def select_window(statistic, n, r, alpha, m_candidates, reps=DEFAULT_REPS, seed=0, k=3,
                  workers=1):
    """Window size with the smallest Monte Carlo critical value at ``alpha``.

    Every candidate is evaluated on the same null draw; candidates
    the estimator rejects (out of bounds or degenerate) are skipped. Ties go
    to the smaller window.
    """
    kind = TestStatisticKind.parse(statistic)
    if not kind.uses_window:
        raise ParameterError(f"{kind.value} has no window size")
    candidates = sorted(set(int(m) for m in m_candidates))
    if not candidates:
        raise ParameterError("empty candidate set")
    x = draw_censored(None, n, r, reps, seed, workers)
    best = None
    for m in candidates:
        try:
            values = compute_statistic(kind, x, n, m, k)
        except CensKLError:
            continue
        cv = empirical_quantile(values, 1 - alpha)
        if best is None or cv < best[1]:
            best = (m, cv)
    if best is None:
        raise ParameterError(f"no valid window among {candidates} for {kind.value} at r={r}")
    return best[0]


def _resolve_critical_value(kind, n, r, alpha, m, table, fallback_reps, fallback_seed, k, workers):
    table = default_table() if table is None else table
    try:
        return table.lookup(kind, n, r, alpha, m=m)
    except TableMissError:
        if fallback_reps is None:
            raise
    cfg = SimulationConfig(kind, n, r, m=m, alpha_levels=(alpha,), reps=fallback_reps,
                           base_seed=fallback_seed, k=k)
    rows = critical_value(cfg, workers).rows
    if kind.two_sided:
        return (rows[0]["critical_value"], rows[1]["critical_value"])
    return rows[0]["critical_value"]


def rejections(statistics, spec, n, r, alpha, reps, seed, table=None, k=3, workers=1,
               fallback_reps=None, fallback_seed=None, samples=None):
    """Per-replicate rejection indicators for several statistics on shared samples.

    Returns
    -------
    dict
        Maps each :class:`TestStatisticKind` to ``(indicators, m, critical_value)``.
    """
    kinds = [TestStatisticKind.parse(s) for s in statistics]
    x = draw_censored(spec, n, r, reps, seed, workers) if samples is None else samples
    fallback_seed = seed + 1 if fallback_seed is None else fallback_seed
    out = {}
    for kind in kinds:
        m = window_for(kind, r, k=k) if kind.uses_window else None
        cv = _resolve_critical_value(kind, n, r, alpha, m, table, fallback_reps,
                                     fallback_seed, k, workers)
        values = _evaluate(kind, x, n, m, k, seed)
        out[kind] = (np.asarray(rejects(kind, values, cv)), m, cv)
    return out


def paired_difference(first, second):
    """Difference in rejection rate of two paired indicator vectors, with its SE."""
    d = np.asarray(first, dtype=float) - np.asarray(second, dtype=float)
    return float(d.mean()), float(d.std(ddof=1) / math.sqrt(d.size)) if d.size > 1 else 0.0


POWER_COLUMNS = ("statistic", "alternative", "n", "r", "alpha", "power", "se", "reps", "seed")


def _power_row(kind, label, n, r, alpha, indicators, reps, seed):
    p = float(np.mean(indicators))
    return dict(statistic=kind.value, alternative=label, n=n, r=r, alpha=alpha, power=p,
                se=math.sqrt(p * (1 - p) / reps), reps=reps, seed=seed)


def power(config, critical_value=None, table=None, workers=1, fallback_reps=None):
    """Rejection rate of ``config.statistic`` under ``config.alternative``."""
    alpha = config.alpha_levels[0]
    if critical_value is not None:
        table = CriticalValueTable([
            CriticalValueRow(lab, config.n, config.r, config.m, alpha, cv)
            for lab, cv in (zip(("z:lower", "z:upper"), critical_value)
                            if config.statistic.two_sided
                            else [(config.statistic.value, critical_value)])
        ])
    result = rejections([config.statistic], config.spec, config.n, config.r, alpha,
                        config.reps, config.base_seed, table=table, k=config.k,
                        workers=workers, fallback_reps=fallback_reps)
    indicators = result[config.statistic][0]
    row = _power_row(config.statistic, config.alternative_label, config.n, config.r, alpha,
                     indicators, config.reps, config.base_seed)
    return StudyResult(POWER_COLUMNS, [row], config.base_seed, config.reps)


def power_study(statistics, alternatives, n, r_values, alpha=0.1, reps=DEFAULT_REPS, seed=0,
                table=None, k=3, workers=1, fallback_reps=None):
    """Powers for every (alternative, r, statistic) with paired samples.

    Each alternative is drawn once per study and censored to every ``r``;
    all statistics see the same samples.
    """
    kinds = [TestStatisticKind.parse(s) for s in statistics]
    entries = [get_alternative(code) for code in alternatives]
    r_values = list(r_values)
    rows = []
    for entry in entries:
        ordered = draw_ordered(entry.spec, n, reps, seed, workers)
        for r in r_values:
            result = rejections(kinds, entry.spec, n, r, alpha, reps, seed, table=table, k=k,
                                workers=workers, fallback_reps=fallback_reps,
                                samples=ordered[:, :r])
            for kind in kinds:
                rows.append(_power_row(kind, entry.code, n, r, alpha, result[kind][0], reps, seed))
    return StudyResult(POWER_COLUMNS, rows, seed, reps)


BIAS_COLUMNS = ("n", "r", "estimator", "bias", "rmse", "reps", "seed")
# output label -> (estimator, statistic whose window rule applies)
BIAS_ESTIMATORS = (
    ("hbar1", EntropyKind.HBAR1, TestStatisticKind.T1),
    ("hbar2", EntropyKind.HBAR2, TestStatisticKind.T2),
    ("hbar", EntropyKind.PARK_HBAR, TestStatisticKind.PARK_T),
)


def bias_rmse(n, r_values, reps=DEFAULT_REPS, seed=0, k=3, workers=1):
    """Bias and RMSE of the three censored estimators against r/n under Exp(1)."""
    ordered = draw_ordered(None, n, reps, seed, workers)
    rows = []
    for r in r_values:
        n, r = check_sizes(n, r)
        reference = exact_reference_hbar(n, r)
        for label, kind, rule in BIAS_ESTIMATORS:
            m = window_for(rule, r, k=k)
            err = np.asarray(estimate_rows(kind, ordered[:, :r], n, m, k)) - reference
            rows.append(dict(n=n, r=r, estimator=label, bias=float(err.mean()),
                             rmse=float(np.sqrt(np.mean(err * err))), reps=reps, seed=seed))
    return StudyResult(BIAS_COLUMNS, rows, seed, reps)


def mean_absolute_deviation(kind, n, r, m, reps, seed, k=3, workers=1):
    """Mean |estimate - r/n| of one estimator under Exp(1)."""
    x = draw_censored(None, n, r, reps, seed, workers)
    est = np.asarray(estimate_rows(kind, x, n, m, k))
    return float(np.mean(np.abs(est - exact_reference_hbar(n, r))))


DENSITY_COLUMNS = ("statistic", "n", "r", "m", "bin_left", "bin_right", "midpoint", "density",
                   "reps", "seed")


def empirical_density(statistic, n, r, reps=DEFAULT_REPS, seed=0, bins=50, m=None, k=3,
                      workers=1):
    """Normalized histogram of a statistic's null distribution."""
    kind = TestStatisticKind.parse(statistic)
    if kind.uses_window and m is None:
        m = window_for(kind, r, k=k)
    x = draw_censored(None, n, r, reps, seed, workers)
    values = _evaluate(kind, x, n, m, k, seed)
    density, edges = np.histogram(values, bins=bins, density=True)
    rows = [
        dict(statistic=kind.value, n=n, r=r, m=m, bin_left=float(lo), bin_right=float(hi),
             midpoint=float((lo + hi) / 2), density=float(d), reps=reps, seed=seed)
        for lo, hi, d in zip(edges[:-1], edges[1:], density)
    ]
    return StudyResult(DENSITY_COLUMNS, rows, seed, reps)
