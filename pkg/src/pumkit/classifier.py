"""Data-movement bottleneck classification from profiling metrics.

Each function record carries four architecture-level metrics: last-level
cache misses per kilo-instruction, a temporal-locality score, arithmetic
intensity, and the last-to-first miss ratio (LLC misses over L1 misses)
measured at one or more core counts.  A threshold decision tree maps the
record onto one of six bottleneck classes and a suitability label for
offloading to near-memory compute.

The tree and its default thresholds are a reconstruction: the class
definitions are taken as given, the exact cutoffs are configurable and
should be recalibrated against local profiling data before drawing
research conclusions.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass

from .errors import MetricsError, MetricsRangeError


class BottleneckClass(enum.Enum):
    DRAM_BANDWIDTH_BOUND = "dram-bandwidth-bound"
    DRAM_LATENCY_BOUND = "dram-latency-bound"
    L1L2_CACHE_CAPACITY = "l1l2-cache-capacity"
    L3_CACHE_CONTENTION = "l3-cache-contention"
    L1_CACHE_CAPACITY = "l1-cache-capacity"
    COMPUTE_BOUND = "compute-bound"


@dataclass(frozen=True)
class Thresholds:
    mpki_high: float = 10.0
    locality_high: float = 0.1
    ai_high: float = 0.25
    lfmr_high: float = 0.7
    trend_epsilon: float = 0.05

    def __post_init__(self):
        for name in ("mpki_high", "locality_high", "ai_high", "lfmr_high",
                     "trend_epsilon"):
            if getattr(self, name) <= 0:
                raise MetricsRangeError(f"threshold {name} must be positive")
        for name in ("locality_high", "lfmr_high"):
            if not 0 < getattr(self, name) < 1:
                raise MetricsRangeError(f"threshold {name} must lie in (0,1)")


@dataclass(frozen=True)
class MetricsRecord:
    function_name: str
    llc_mpki: float
    temporal_locality: float
    arithmetic_intensity: float
    lfmr_by_cores: dict[int, float]

    def __post_init__(self):
        if self.llc_mpki < 0:
            raise MetricsRangeError(f"{self.function_name}: llc_mpki must be >= 0")
        if not 0 <= self.temporal_locality <= 1:
            raise MetricsRangeError(
                f"{self.function_name}: temporal_locality must lie in [0,1]"
            )
        if self.arithmetic_intensity < 0:
            raise MetricsRangeError(
                f"{self.function_name}: arithmetic_intensity must be >= 0"
            )
        if not self.lfmr_by_cores:
            raise MetricsRangeError(f"{self.function_name}: need at least one LFMR entry")
        cores = list(self.lfmr_by_cores)
        if cores != sorted(set(cores)) or any(c < 1 for c in cores):
            raise MetricsRangeError(
                f"{self.function_name}: core counts must be strictly increasing"
            )
        for c, v in self.lfmr_by_cores.items():
            if not 0 <= v <= 1:
                raise MetricsRangeError(
                    f"{self.function_name}: LFMR@{c} must lie in [0,1]"
                )


def compute_lfmr(llc_misses: int, l1_misses: int) -> float:
    """LLC misses over total L1 misses; near 1 means caches do nothing."""
    if l1_misses <= 0:
        raise MetricsRangeError("LFMR undefined: no L1 misses recorded")
    if llc_misses < 0 or llc_misses > l1_misses:
        raise MetricsRangeError(
            f"inconsistent counts: {llc_misses} LLC misses vs {l1_misses} L1 misses"
        )
    return llc_misses / l1_misses


def classify(m: MetricsRecord, t: Thresholds | None = None) -> tuple[BottleneckClass, str]:
    """Total, deterministic decision tree over one record."""
    if t is None:
        t = Thresholds()
    high_mpki = m.llc_mpki >= t.mpki_high
    high_locality = m.temporal_locality >= t.locality_high
    high_ai = m.arithmetic_intensity >= t.ai_high
    lfmr = [m.lfmr_by_cores[c] for c in sorted(m.lfmr_by_cores)]
    drop = lfmr[0] - lfmr[-1]
    rise = lfmr[-1] - lfmr[0]

    if not high_locality:
        if high_mpki:
            return (BottleneckClass.DRAM_BANDWIDTH_BOUND,
                    f"low locality ({m.temporal_locality:.2f}) with high LLC MPKI "
                    f"({m.llc_mpki:.1f}): memory traffic saturates DRAM bandwidth")
        if min(lfmr) >= t.lfmr_high:
            return (BottleneckClass.DRAM_LATENCY_BOUND,
                    f"low locality, low MPKI, LFMR stays >= {t.lfmr_high:.2f} at every "
                    "core count: L2/L3 never filter misses, each one pays DRAM latency")
        if drop > t.trend_epsilon:
            return (BottleneckClass.L1L2_CACHE_CAPACITY,
                    f"low locality, low MPKI, LFMR falls {drop:.2f} as cores (and "
                    "private cache space) grow: working set fits once L1/L2 scale up")
        return (BottleneckClass.L1L2_CACHE_CAPACITY,
                "low locality, low MPKI, LFMR already below the high mark: the "
                "cache hierarchy absorbs most misses")
    if high_mpki:
        return (BottleneckClass.DRAM_BANDWIDTH_BOUND,
                f"warning: high locality ({m.temporal_locality:.2f}) with high LLC "
                f"MPKI ({m.llc_mpki:.1f}); MPKI dominates, treating as bandwidth-bound")
    if rise > t.trend_epsilon:
        return (BottleneckClass.L3_CACHE_CONTENTION,
                f"high locality and LFMR rises {rise:.2f} with core count: threads "
                "evict each other out of the shared L3")
    if not high_ai:
        return (BottleneckClass.L1_CACHE_CAPACITY,
                f"high locality, low arithmetic intensity "
                f"({m.arithmetic_intensity:.2f}): bound by L1 capacity, any "
                "mitigation performs about the same")
    return (BottleneckClass.COMPUTE_BOUND,
            f"high locality and high arithmetic intensity "
            f"({m.arithmetic_intensity:.2f}): the core, not the memory system, "
            "is the limit")


@dataclass(frozen=True)
class Recommendation:
    label: str
    note: str


_RECOMMENDATIONS = {
    BottleneckClass.DRAM_BANDWIDTH_BOUND: Recommendation(
        "pnm-beneficial",
        "near-memory execution exposes far more bandwidth than the channel"),
    BottleneckClass.DRAM_LATENCY_BOUND: Recommendation(
        "pnm-beneficial",
        "sending L1 misses straight to DRAM removes pointless cache latency"),
    BottleneckClass.L1L2_CACHE_CAPACITY: Recommendation(
        "pnm-beneficial-at-low-core-counts",
        "wins while private caches are small; scaling cores shrinks the gap"),
    BottleneckClass.L3_CACHE_CONTENTION: Recommendation(
        "pnm-cost-effective-vs-larger-l3",
        "offloading relieves shared-cache contention more cheaply than more L3"),
    BottleneckClass.L1_CACHE_CAPACITY: Recommendation(
        "neutral",
        "performance and energy come out about even either way"),
    BottleneckClass.COMPUTE_BOUND: Recommendation(
        "pnm-harmful",
        "offloading strands the work far from the big cores and prefetchers"),
}


def recommend(cls: BottleneckClass) -> Recommendation:
    return _RECOMMENDATIONS[cls]


# --- CSV front end -----------------------------------------------------------

_FIXED_COLUMNS = ("function", "llc_mpki", "temporal_locality", "arithmetic_intensity")


def _parse_header(header: list[str]) -> list[int]:
    if len(header) < 5 or tuple(header[:4]) != _FIXED_COLUMNS:
        raise MetricsError(
            "bad header: expected 'function,llc_mpki,temporal_locality,"
            "arithmetic_intensity,lfmr@<cores>,...'"
        )
    cores = []
    for col in header[4:]:
        if not col.startswith("lfmr@"):
            raise MetricsError(f"bad header column {col!r}: expected lfmr@<cores>")
        try:
            cores.append(int(col[5:]))
        except ValueError as e:
            raise MetricsError(f"bad header column {col!r}: {e}") from e
    if cores != sorted(set(cores)) or any(c < 1 for c in cores):
        raise MetricsError("lfmr@ core counts must be strictly increasing")
    return cores


def parse_metrics_csv(text: str) -> list[MetricsRecord]:
    reader = csv.reader(io.StringIO(text))
    rows = [(lineno, row) for lineno, row in enumerate(reader, start=1) if row]
    if not rows:
        return []
    _, header = rows[0]
    cores = _parse_header([h.strip() for h in header])
    records = []
    for lineno, row in rows[1:]:
        if len(row) != 4 + len(cores):
            raise MetricsError(
                f"line {lineno}: expected {4 + len(cores)} fields, got {len(row)}"
            )
        name = row[0].strip()
        try:
            mpki = float(row[1])
            locality = float(row[2])
            ai = float(row[3])
            lfmr = {}
            for c, cell in zip(cores, row[4:]):
                cell = cell.strip()
                if cell:
                    lfmr[c] = float(cell)
        except ValueError as e:
            raise MetricsError(f"line {lineno}: {e}") from e
        try:
            records.append(MetricsRecord(name, mpki, locality, ai, lfmr))
        except MetricsRangeError as e:
            raise MetricsRangeError(f"line {lineno}: {e}") from e
    return records


def ingest_csv(path: str) -> list[MetricsRecord]:
    """Parse and range-check a metrics CSV file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_metrics_csv(fh.read())


def label_csv(text: str, thresholds: Thresholds | None = None) -> str:
    """Augment a metrics CSV with class, recommendation, and rationale."""
    records = parse_metrics_csv(text)
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if not rows:
        return ""
    writer.writerow(rows[0] + ["class", "recommendation", "rationale"])
    for row, rec in zip(rows[1:], records):
        cls, why = classify(rec, thresholds)
        writer.writerow(row + [cls.value, recommend(cls).label, why])
    return out.getvalue()
