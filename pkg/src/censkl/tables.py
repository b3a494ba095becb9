"""Window-size rules and critical-value tables.

Two published tables are embedded verbatim (critical values of T1 and T2 at
n = 10, 20, 30). Critical values for Park's T and the Brain-Shapiro
statistics are not published; a Monte Carlo table generated with
:mod:`censkl.montecarlo` ships in ``censkl/data`` and is merged into
:func:`default_table`.

Tables persist as CSV with the header::

    statistic,n,r,m,alpha,critical_value,provenance,seed,reps

The two-sided z statistic stores its region as two rows labelled
``z:lower`` and ``z:upper``.
"""

import csv
import io
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from ._validation import largest_window
from .estimators import EntropyKind, smoothed_window_bound, spacing_window_bound
from .exceptions import ParameterError, TableMissError, TableParseError
from .gof import TestStatisticKind

logger = logging.getLogger(__name__)

ALPHAS = (0.1, 0.05, 0.025)
CSV_HEADER = ("statistic", "n", "r", "m", "alpha", "critical_value", "provenance", "seed", "reps")
PAPER = "paper"
GENERATED = "generated"

# minimum-critical-value windows for T1: (r_lo, r_hi, m)
_T1_RULE = ((5, 19, 3), (20, 40, 4), (41, 50, 5))
# minimum-critical-value windows for T2 for r < 14; beyond, pairs (r, r+1)
# with r even share m = r/2 + 3
_T2_RULE = {4: 5, 5: 5, 6: 6, 7: 6, 8: 7, 9: 7, 10: 8, 11: 8, 12: 9, 13: 9}

_T1_CRITICAL = {
    10: {5: (0.5962, 0.6855, 0.7692), 6: (0.6155, 0.7185, 0.8039),
         7: (0.6398, 0.7333, 0.8185), 8: (0.6676, 0.7607, 0.8648),
         9: (0.7152, 0.8075, 0.9025)},
    20: {10: (0.3148, 0.3640, 0.4061), 11: (0.3188, 0.3689, 0.4148),
         12: (0.3285, 0.3727, 0.4183), 13: (0.3374, 0.3825, 0.4329),
         14: (0.3442, 0.3911, 0.4371), 15: (0.3613, 0.4113, 0.4587),
         16: (0.3677, 0.4157, 0.4634), 17: (0.3830, 0.4333, 0.4795),
         18: (0.4022, 0.4521, 0.5024), 19: (0.4223, 0.4717, 0.5172)},
    30: {15: (0.2239, 0.2599, 0.2904), 16: (0.2293, 0.2625, 0.2922),
         17: (0.2320, 0.2659, 0.2945), 18: (0.2376, 0.2707, 0.3009),
         19: (0.2425, 0.2757, 0.3077), 20: (0.2470, 0.2800, 0.3108),
         21: (0.2537, 0.2834, 0.3121), 22: (0.2568, 0.2918, 0.3259),
         23: (0.2634, 0.2949, 0.3272), 24: (0.2691, 0.3017, 0.3318),
         25: (0.2736, 0.3090, 0.3398), 26: (0.2822, 0.3136, 0.3488),
         27: (0.2910, 0.3239, 0.3538)},
}

_T2_CRITICAL = {
    10: {5: (0.3445, 0.4253, 0.5087), 6: (0.3251, 0.4128, 0.5026),
         7: (0.3136, 0.4099, 0.4929), 8: (0.3104, 0.4046, 0.4915),
         9: (0.3101, 0.4038, 0.4902)},
    20: {10: (0.1474, 0.1913, 0.2310), 11: (0.1426, 0.1830, 0.2229),
         12: (0.1408, 0.1828, 0.2197), 13: (0.1369, 0.1805, 0.2181),
         14: (0.1322, 0.1773, 0.2168), 15: (0.1294, 0.1740, 0.2160),
         16: (0.1281, 0.1742, 0.2161), 17: (0.1280, 0.1739, 0.2073),
         18: (0.1268, 0.1649, 0.2072), 19: (0.1200, 0.1620, 0.1988)},
    30: {15: (0.0865, 0.1168, 0.1500), 16: (0.0859, 0.1152, 0.1430),
         17: (0.0843, 0.1124, 0.1383), 18: (0.0829, 0.1090, 0.1380),
         19: (0.0824, 0.1083, 0.1355), 20: (0.0815, 0.1079, 0.1311),
         21: (0.0806, 0.1043, 0.1294), 22: (0.0777, 0.1038, 0.1281),
         23: (0.0759, 0.1027, 0.1280), 24: (0.0741, 0.0988, 0.1275),
         25: (0.0699, 0.0976, 0.1265), 26: (0.0662, 0.0977, 0.1219),
         27: (0.0635, 0.0910, 0.1200)},
}


def _t1_rule(r):
    for lo, hi, m in _T1_RULE:
        if lo <= r <= hi:
            return m
    raise TableMissError(f"no T1 window rule for r={r} (covered: 5..50)")


def _t2_rule(r):
    if r in _T2_RULE:
        return _T2_RULE[r]
    if r >= 14:
        return (r - r % 2) // 2 + 3
    raise TableMissError(f"no T2 window rule for r={r} (covered: r >= 4)")


def window_for(statistic, r, k=3):
    """Recommended window size for ``statistic`` at ``r`` observed values.

    T1 and Park's T share the T1 rule; T2 uses its own rule. The rule's
    value is clamped down to the estimator's admissible bound if needed,
    with a log message. The Brain-Shapiro statistics have no window and
    return None.
    """
    statistic = TestStatisticKind.parse(statistic)
    if statistic is TestStatisticKind.T2:
        m = _t2_rule(r)
        bound = largest_window(smoothed_window_bound(r, k), inclusive=True)
    elif statistic in (TestStatisticKind.T1, TestStatisticKind.PARK_T):
        m = _t1_rule(r)
        bound = spacing_window_bound(r)
    else:
        return None
    if m > bound:
        logger.info("window m=%d for %s at r=%d exceeds bound; clamped to %d",
                    m, statistic.value, r, bound)
        m = bound
    if m < 1:
        raise TableMissError(f"no admissible window for {statistic.value} at r={r}")
    return m


def default_window(kind, r, k=3):
    """Window rule for a test statistic or the entropy estimator behind it."""
    if isinstance(kind, EntropyKind) or kind in {e.value for e in EntropyKind}:
        kind = EntropyKind(kind)
        statistic = {
            EntropyKind.PARK_HBAR: TestStatisticKind.PARK_T,
            EntropyKind.HBAR1: TestStatisticKind.T1,
            EntropyKind.HBAR2: TestStatisticKind.T2,
        }.get(kind)
        if statistic is None:
            raise ParameterError(f"no window rule for {kind.value}")
        return window_for(statistic, r, k=k)
    return window_for(kind, r, k=k)


@dataclass(frozen=True)
class CriticalValueRow:
    statistic: str
    n: int
    r: int
    m: int | None
    alpha: float
    critical_value: float
    provenance: str = PAPER
    seed: int | None = None
    reps: int | None = None

    @property
    def kind(self):
        return TestStatisticKind.parse(self.statistic.split(":")[0])


def _alpha_key(alpha):
    return round(float(alpha), 10)


@dataclass
class CriticalValueTable:
    """A collection of critical values keyed by (statistic, n, r, alpha)."""

    rows: list = field(default_factory=list)

    def __post_init__(self):
        self._index = {}
        for row in self.rows:
            self._index[(row.statistic, row.n, row.r, _alpha_key(row.alpha))] = row

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __eq__(self, other):
        return isinstance(other, CriticalValueTable) and self.rows == other.rows

    def merged(self, other):
        """Rows of ``self`` followed by rows of ``other`` not already present."""
        keys = set(self._index)
        extra = [
            row for row in other.rows
            if (row.statistic, row.n, row.r, _alpha_key(row.alpha)) not in keys
        ]
        return CriticalValueTable(self.rows + extra)

    def filter(self, statistic=None, n=None, provenance=None):
        def keep(row):
            if statistic is not None and row.kind is not TestStatisticKind.parse(statistic):
                return False
            if n is not None and row.n != n:
                return False
            return provenance is None or row.provenance == provenance
        return CriticalValueTable([row for row in self.rows if keep(row)])

    def _get(self, label, n, r, alpha, m):
        row = self._index.get((label, n, r, _alpha_key(alpha)))
        if row is None:
            raise TableMissError(f"no critical value for {label} at n={n}, r={r}, alpha={alpha}")
        if m is not None and row.m is not None and row.m != m:
            raise TableMissError(
                f"critical value for {label} at n={n}, r={r} was computed with "
                f"m={row.m}, not m={m}"
            )
        return row.critical_value

    def lookup(self, statistic, n, r, alpha, m=None):
        """Critical value for one cell; a (lower, upper) pair for z.

        When ``m`` is given it must match the window the value was computed
        with.
        """
        kind = TestStatisticKind.parse(statistic)
        if kind.two_sided:
            return (self._get("z:lower", n, r, alpha, None),
                    self._get("z:upper", n, r, alpha, None))
        return self._get(kind.value, n, r, alpha, m)


def _published_rows(statistic, data):
    rows = []
    for n, block in data.items():
        for r, values in block.items():
            m = window_for(statistic, r)
            for alpha, cv in zip(ALPHAS, values):
                rows.append(CriticalValueRow(statistic.value, n, r, m, alpha, cv))
    return rows


@lru_cache(maxsize=None)
def embedded_table():
    """The published T1 and T2 critical values, digit for digit."""
    return CriticalValueTable(
        _published_rows(TestStatisticKind.T1, _T1_CRITICAL)
        + _published_rows(TestStatisticKind.T2, _T2_CRITICAL)
    )


def embedded_critical_value(statistic, n, r, alpha):
    statistic = TestStatisticKind.parse(statistic)
    if statistic not in (TestStatisticKind.T1, TestStatisticKind.T2):
        raise TableMissError(f"no published critical values for {statistic.value}")
    return embedded_table().lookup(statistic, n, r, alpha)


@lru_cache(maxsize=None)
def generated_table():
    """Bundled Monte Carlo critical values for T, z and Z."""
    ref = resources.files("censkl").joinpath("data/generated_critical_values.csv")
    if not ref.is_file():
        return CriticalValueTable([])
    with ref.open("r", encoding="utf-8") as fh:
        return read_table(fh)


def default_table():
    return embedded_table().merged(generated_table())


def _fmt(value):
    return "" if value is None else repr(value) if isinstance(value, float) else str(value)


def write_table(table, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in table:
        writer.writerow([
            row.statistic, row.n, row.r, _fmt(row.m), _fmt(float(row.alpha)),
            _fmt(float(row.critical_value)), row.provenance, _fmt(row.seed), _fmt(row.reps),
        ])


def save_table(table, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_table(table, fh)


def _parse_int(text, name, line, optional=False):
    if text == "" and optional:
        return None
    try:
        return int(text)
    except ValueError:
        raise TableParseError(f"bad {name} {text!r}", line) from None


def _parse_float(text, name, line):
    try:
        return float(text)
    except ValueError:
        raise TableParseError(f"bad {name} {text!r}", line) from None


def read_table(fh):
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise TableParseError("empty file", 1) from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise TableParseError(f"expected header {','.join(CSV_HEADER)}", 1)
    rows = []
    for line, fields in enumerate(reader, start=2):
        if not fields:
            continue
        if len(fields) != len(CSV_HEADER):
            raise TableParseError(f"expected {len(CSV_HEADER)} fields, got {len(fields)}", line)
        statistic, n, r, m, alpha, cv, provenance, seed, reps = (f.strip() for f in fields)
        base, _, tail = statistic.partition(":")
        try:
            kind = TestStatisticKind.parse(base)
        except ParameterError:
            raise TableParseError(f"unknown statistic {statistic!r}", line) from None
        if tail and (not kind.two_sided or tail not in ("lower", "upper")):
            raise TableParseError(f"bad statistic label {statistic!r}", line)
        if kind.two_sided and not tail:
            raise TableParseError("z rows must be labelled z:lower or z:upper", line)
        if provenance not in (PAPER, GENERATED):
            raise TableParseError(f"bad provenance {provenance!r}", line)
        rows.append(CriticalValueRow(
            statistic=statistic,
            n=_parse_int(n, "n", line),
            r=_parse_int(r, "r", line),
            m=_parse_int(m, "m", line, optional=True),
            alpha=_parse_float(alpha, "alpha", line),
            critical_value=_parse_float(cv, "critical_value", line),
            provenance=provenance,
            seed=_parse_int(seed, "seed", line, optional=True),
            reps=_parse_int(reps, "reps", line, optional=True),
        ))
    return CriticalValueTable(rows)


def load_table(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return read_table(fh)


def table_to_csv(table):
    buf = io.StringIO()
    write_table(table, buf)
    return buf.getvalue()
