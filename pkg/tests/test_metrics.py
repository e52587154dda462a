import json
import logging

import pytest

from neqr_pprm.circuit import CostModel
from neqr_pprm.metrics import (
    ZeroBaseline,
    ZeroOptimizedCost,
    compression_ratio,
    optimization_rate,
    read_records,
    records_to_csv,
    records_to_json,
    summarize,
    sweep,
)

# (non-optimised, optimised) pairs from the published cost tables
TABLE1 = [
    (53865957128, 514219033, 99.05),
    (50562026908, 508945459, 98.99),
    (50633394160, 517464591, 98.98),
    (58309797340, 506508163, 99.13),
    (56223632296, 516989043, 99.08),
    (53324902920, 497631277, 99.07),
]
TABLE2 = [
    (74523104, 31476768, 57.76),
    (69952144, 30483500, 56.42),
    (70050880, 31264133, 55.37),
    (80671120, 30194410, 62.57),
    (77784928, 30924631, 60.24),
    (73774560, 28723803, 61.07),
]


@pytest.mark.parametrize("nonopt, opt, ratio", TABLE1 + TABLE2)
def test_published_ratios(nonopt, opt, ratio):
    assert compression_ratio(nonopt, opt) == pytest.approx(ratio, abs=0.005)


def test_published_rates():
    assert optimization_rate(53865957128, 514219033) == pytest.approx(104.75, abs=0.01)
    assert optimization_rate(74523104, 31476768) == pytest.approx(2.368, abs=0.001)
    mean1 = sum(optimization_rate(a, b) for a, b, _ in TABLE1) / 6
    mean2 = sum(optimization_rate(a, b) for a, b, _ in TABLE2) / 6
    assert mean1 == pytest.approx(105.5, abs=0.05)
    assert mean2 == pytest.approx(2.4, abs=0.05)


def test_identity_and_errors():
    assert compression_ratio(7, 7) == 0.0
    assert optimization_rate(7, 7) == 1.0
    with pytest.raises(ZeroBaseline):
        compression_ratio(0, 3)
    with pytest.raises(ZeroOptimizedCost):
        optimization_rate(3, 0)


def test_sweep_structure():
    recs = sweep(1, 3, 8, [5], CostModel.PLAIN)
    assert [r.m for r in recs] == [2, 4, 6]
    assert [r.n for r in recs] == [1, 2, 3]
    both = sweep(1, 2, 8, [0, 1], list(CostModel))
    assert [(r.n, r.seed, r.model) for r in both] == [
        (n, s, mdl) for n in (1, 2) for s in (0, 1) for mdl in CostModel
    ]


def test_sweep_record_invariants():
    for r in sweep(1, 6, 8, range(5), list(CostModel)):
        assert r.rate == pytest.approx(r.qc_nonopt / r.qc_opt, rel=1e-15)
        assert r.ratio_percent == pytest.approx((1 - 1 / r.rate) * 100, abs=1e-9)
        assert r.rate > 0 and r.ratio_percent < 100
        assert r.qc_opt <= r.qc_nonopt


def test_violations_logged(caplog, monkeypatch):
    import neqr_pprm.metrics as metrics

    monkeypatch.setattr(metrics, "circuit_cost", lambda c, m: 10 if c.form.value == "pprm" else 5)
    with caplog.at_level(logging.WARNING, logger="neqr_pprm.metrics"):
        recs = metrics.sweep(1, 1, 8, [0], CostModel.PLAIN)
    assert len(recs) == 1
    assert "PPRM costlier" in caplog.text


def test_sweep_range_checked():
    with pytest.raises(ValueError):
        sweep(3, 2, 8, [0], CostModel.PLAIN)
    with pytest.raises(ValueError):
        sweep(0, 2, 8, [0], CostModel.PLAIN)


def test_csv_and_json_formats():
    recs = sweep(1, 2, 8, [0, 1], CostModel.RESET)
    text = records_to_csv(recs)
    lines = text.split("\n")
    assert lines[0] == "m,n,q,seed,model,qc_nonopt,qc_opt,rate,ratio_percent"
    assert text.endswith("\n") and "\r" not in text
    assert len(lines) == len(recs) + 2
    assert records_to_csv(sweep(1, 2, 8, [0, 1], CostModel.RESET)) == text
    rows = json.loads(records_to_json(recs))
    assert list(rows[0]) == text.split("\n")[0].split(",")
    back = read_records(text)
    assert [(r.qc_nonopt, r.qc_opt, r.model) for r in back] == [
        (r.qc_nonopt, r.qc_opt, r.model) for r in recs
    ]
    assert read_records(records_to_json(recs))[0].qc_opt == recs[0].qc_opt


def test_summarize():
    recs = sweep(2, 3, 8, range(4), CostModel.PLAIN)
    stats = summarize(recs)
    assert [(s.m, s.samples) for s in stats] == [(4, 4), (6, 4)]
    rates = [r.rate for r in recs if r.m == 4]
    assert stats[0].rate_mean == pytest.approx(sum(rates) / 4)
