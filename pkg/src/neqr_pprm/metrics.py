"""Compression ratio, optimization rate and the random-image sweep."""

from __future__ import annotations

import csv
import io
import json
import logging
import statistics
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .bitplane import extract_planes, random_image
from .circuit import CostModel, circuit_cost, synthesize_esop, synthesize_pprm

log = logging.getLogger(__name__)

CSV_FIELDS = ("m", "n", "q", "seed", "model", "qc_nonopt", "qc_opt", "rate", "ratio_percent")


class ZeroBaseline(ZeroDivisionError):
    pass


class ZeroOptimizedCost(ZeroDivisionError):
    pass


def compression_ratio(qc_nonopt: int, qc_opt: int) -> float:
    """(1 - optimized / non-optimized) * 100, in percent."""
    if qc_nonopt <= 0:
        raise ZeroBaseline("non-optimized cost must be positive")
    return float((1 - Fraction(qc_opt, qc_nonopt)) * 100)


def optimization_rate(qc_nonopt: int, qc_opt: int) -> float:
    if qc_opt <= 0:
        raise ZeroOptimizedCost("optimized cost must be positive")
    return float(Fraction(qc_nonopt, qc_opt))


@dataclass(frozen=True)
class SweepRecord:
    m: int
    n: int
    q: int
    seed: int
    model: CostModel
    qc_nonopt: int
    qc_opt: int
    rate: float
    ratio_percent: float

    def as_row(self) -> dict:
        row = asdict(self)
        row["model"] = self.model.value
        return row


def make_record(n, q, seed, model, qc_nonopt, qc_opt) -> SweepRecord:
    return SweepRecord(
        m=2 * n,
        n=n,
        q=q,
        seed=seed,
        model=model,
        qc_nonopt=qc_nonopt,
        qc_opt=qc_opt,
        rate=optimization_rate(qc_nonopt, qc_opt),
        ratio_percent=compression_ratio(qc_nonopt, qc_opt),
    )


def sweep(
    n_min: int,
    n_max: int,
    q: int,
    seeds: Sequence[int],
    model: CostModel | Iterable[CostModel],
) -> list[SweepRecord]:
    """Cost the ESOP and PPRM circuits of seeded random images.

    Records come out ordered by (n, seed, model). Passing several models
    reuses each synthesized pair of circuits.
    """
    if not 1 <= n_min <= n_max <= 16:
        raise ValueError(f"need 1 <= n_min <= n_max <= 16, got {n_min}..{n_max}")
    models = [model] if isinstance(model, CostModel) else list(model)
    records = []
    for n in range(n_min, n_max + 1):
        for seed in seeds:
            planes = extract_planes(random_image(n, q, seed))
            esop = synthesize_esop(planes)
            pprm = synthesize_pprm(planes)
            for mdl in models:
                rec = make_record(n, q, seed, mdl, circuit_cost(esop, mdl), circuit_cost(pprm, mdl))
                if rec.qc_opt > rec.qc_nonopt:
                    log.warning(
                        "PPRM costlier than ESOP: m=%d seed=%d model=%s (%d > %d)",
                        rec.m, seed, mdl.value, rec.qc_opt, rec.qc_nonopt,
                    )
                records.append(rec)
            del esop, pprm, planes
    return records


@dataclass(frozen=True)
class SweepSummary:
    model: CostModel
    m: int
    samples: int
    rate_mean: float
    rate_std: float
    ratio_mean: float
    ratio_std: float


def summarize(records: Iterable[SweepRecord]) -> list[SweepSummary]:
    """Mean and sample standard deviation per (model, m)."""
    groups: dict[tuple[str, int], list[SweepRecord]] = {}
    for r in records:
        groups.setdefault((r.model.value, r.m), []).append(r)
    out = []
    for (model, m), rs in sorted(groups.items()):
        rates = [r.rate for r in rs]
        ratios = [r.ratio_percent for r in rs]
        out.append(
            SweepSummary(
                CostModel(model),
                m,
                len(rs),
                statistics.fmean(rates),
                statistics.stdev(rates) if len(rs) > 1 else 0.0,
                statistics.fmean(ratios),
                statistics.stdev(ratios) if len(rs) > 1 else 0.0,
            )
        )
    return out


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def records_to_csv(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        row = r.as_row()
        row["rate"] = _fmt(r.rate)
        row["ratio_percent"] = _fmt(r.ratio_percent)
        writer.writerow([row[f] for f in CSV_FIELDS])
    return buf.getvalue()


def records_to_json(records: Iterable[SweepRecord]) -> str:
    rows = []
    for r in records:
        row = r.as_row()
        row["rate"] = float(_fmt(r.rate))
        row["ratio_percent"] = float(_fmt(r.ratio_percent))
        rows.append({f: row[f] for f in CSV_FIELDS})
    return json.dumps(rows, indent=1) + "\n"


def _from_row(row: dict) -> SweepRecord:
    return SweepRecord(
        m=int(row["m"]),
        n=int(row["n"]),
        q=int(row["q"]),
        seed=int(row["seed"]),
        model=CostModel(row["model"]),
        qc_nonopt=int(row["qc_nonopt"]),
        qc_opt=int(row["qc_opt"]),
        rate=float(row["rate"]),
        ratio_percent=float(row["ratio_percent"]),
    )


def read_records(text: str) -> list[SweepRecord]:
    """Parse sweep output in either CSV or JSON form."""
    if text.lstrip().startswith("["):
        return [_from_row(row) for row in json.loads(text)]
    reader = csv.DictReader(io.StringIO(text))
    missing = set(CSV_FIELDS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"sweep CSV lacks columns: {sorted(missing)}")
    return [_from_row(row) for row in reader]
