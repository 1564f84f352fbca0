import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ebci.lpreg import Sample
from ebci.simharness import (
    COLUMNS,
    ConfigError,
    CuspParams,
    ResultRow,
    SimConfig,
    ccf_mean,
    cusp_mean,
    emit_plot,
    emit_results,
    expand_config,
    gen_ccf,
    gen_cusp,
    load_config,
    load_reference,
    parse_results,
    plot_data,
    reference_for,
    replication_rng,
    resolve_workers,
    run_mc,
    skewed_errors,
)
from ebci.simharness import mc


def test_cusp_mean_values():
    p = CuspParams(delta=1.0)
    assert cusp_mean(0.0, p) == 1.0
    assert cusp_mean(0.5, p) == pytest.approx(4.0, abs=1e-14)
    assert cusp_mean(-0.5, p) == pytest.approx(1 - 0.5 + 0.5 - 0.5, abs=1e-14)


def test_ccf_mean_values():
    assert ccf_mean(0.0) == 0.0
    assert ccf_mean(1.0) == pytest.approx(-1 / 37, rel=1e-14)
    assert ccf_mean(-0.5) == pytest.approx(-math.sqrt(2) / 2, rel=1e-14)


def test_generators_shapes_and_support():
    rng = replication_rng(1, 0)
    smp = gen_cusp(CuspParams(support="boundary"), 300, rng)
    assert smp.n == 300 and smp.xs.min() >= 0 and smp.xs.max() <= 1
    ccf = gen_ccf(300, replication_rng(1, 1))
    assert ccf.xs.min() >= -1 and ccf.xs.max() <= 1
    with pytest.raises(ValueError):
        gen_ccf(1, rng)


def test_skewed_error_moments():
    e = skewed_errors(replication_rng(11, 0), 10**6)
    assert abs(e.mean()) < 0.01 and abs(e.var() - 1) < 0.01
    assert np.mean(e**3) > 1.0  # Gamma(2,1) skewness is sqrt(2)


def test_replication_streams_distinct_and_reproducible():
    a = replication_rng(3, 0).standard_normal(5)
    assert np.array_equal(a, replication_rng(3, 0).standard_normal(5))
    assert not np.array_equal(a, replication_rng(3, 1).standard_normal(5))
    assert not np.array_equal(a, replication_rng(4, 0).standard_normal(5))
    assert not np.array_equal(a, replication_rng(3, 0, stream=1).standard_normal(5))


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(B=0)
    with pytest.raises(ValueError):
        SimConfig(method="ebci_fixed_eta")
    assert SimConfig(dgp="ccf", x0=1.0).boundary_flag == "right"
    assert SimConfig(dgp="ccf", x0=-1.0).boundary_flag == "left"
    assert SimConfig(support="boundary").boundary_flag == "left"
    assert SimConfig(dgp="uniform_density").theta == 0.5


def test_resolve_workers(monkeypatch):
    monkeypatch.setenv("EBCI_THREADS", "2")
    assert resolve_workers(8) == 2
    monkeypatch.setenv("EBCI_THREADS", "zero")
    with pytest.raises(ValueError):
        resolve_workers(1)
    monkeypatch.delenv("EBCI_THREADS")
    assert resolve_workers(3) == 3


def test_determinism_across_worker_counts():
    cfg = SimConfig(n=200, B=600, seed=17)
    serial = run_mc(cfg, workers=1)
    parallel = run_mc(cfg, workers=3)
    assert serial == parallel
    assert np.array_equal(serial.widths, parallel.widths)
    assert serial.B_effective == 600 and serial.valid


def test_width_equals_twice_radius():
    from ebci.intervals import ebci_regression_eta_free

    cfg = SimConfig(n=300, B=3, seed=2)
    data = mc._draw(cfg, 1)
    _, width, bias, h = mc.replicate(cfg, 1)
    res = ebci_regression_eta_free(data, 0.0, 3, 0.05, unified_calibration=True)
    assert width == 2 * res.radius and bias == res.center - 1.0 and h == res.h_used


def test_pure_noise_snc_coverage():
    cfg = SimConfig(n=500, method="snc", B=2000)
    B, hits = 2000, 0
    for rep in range(B):
        rng = replication_rng(5, rep)
        smp = Sample(rng.uniform(-1, 1, 500), 1.0 + rng.standard_normal(500))
        center, radius, _ = mc._snc(cfg, smp, "interior")
        hits += abs(center - 1.0) <= radius
    se = math.sqrt(0.95 * 0.05 / B)
    assert abs(hits / B - 0.95) < min(2 / math.sqrt(B), 3 * se)


@pytest.mark.slow
def test_interior_cusp_cell_and_seed_variation():
    cfg = SimConfig(n=1000, B=2000, seed=20240)
    a = run_mc(cfg)
    assert 0.933 <= a.coverage <= 0.973 and 0.325 <= a.mean_width <= 0.345
    b = run_mc(SimConfig(n=1000, B=2000, seed=999))
    assert abs(a.coverage - b.coverage) < 3 / math.sqrt(2000)


def test_failures_recorded(monkeypatch):
    def flaky(config, rep):
        if rep % 50 == 0:
            raise ValueError("boom")
        return (1.0, 1.0, 0.0, 0.1)

    monkeypatch.setattr(mc, "replicate", flaky)
    s = run_mc(SimConfig(B=100), workers=1)
    assert s.failures == 2 and s.B_effective == 98 and not s.valid
    s = run_mc(SimConfig(B=200), workers=1)
    assert s.failures == 4 and not s.valid


def _row(**kw):
    base = dict(dgp="cusp", x0=0.0, delta=1.0, n=100, method="ebci_eta_free", side="two",
                alpha=0.05, h=0.5, coverage=0.95, width=0.4, bias=0.01, B=2000)
    base.update(kw)
    return ResultRow(**base)


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.lists(st.builds(
    ResultRow, dgp=st.sampled_from(["cusp", "ccf"]), x0=finite, delta=st.one_of(st.none(), finite),
    n=st.integers(4, 10**6), method=st.sampled_from(["snc", "ebci_eta_free"]),
    side=st.sampled_from(["two", "upper"]), alpha=finite, h=finite, coverage=finite, width=finite,
    bias=finite, B=st.integers(1, 10**5)), min_size=1, max_size=8))
def test_csv_round_trip(rows):
    assert parse_results(emit_results(rows)) == rows


def test_emit_single_row_layout():
    out = emit_results([_row()])
    lines = out.decode().split("\n")
    assert lines[0] == ",".join(COLUMNS)
    assert len([l for l in lines if l]) == 2 and b"\r" not in out
    with pytest.raises(ValueError):
        emit_results([])


def test_pivot_table_ordering():
    rows = [_row(delta=d, n=n) for d in (1.0, 0.01) for n in (1000, 50)]
    ordered = parse_results(emit_results(rows, paper_table=True))
    assert [(r.delta, r.n) for r in ordered] == [(0.01, 50), (0.01, 1000), (1.0, 50), (1.0, 1000)]
    md = emit_results(rows, format="markdown", paper_table=True).decode().splitlines()
    assert md[0].startswith("| delta | n | EBCI h | EBCI Cov.")
    assert md[2].startswith("| 0.01 | 50 |") and md[3].startswith("|  | 1000 |")


def test_reference_join():
    records = load_reference(method="rbc")
    cfg = SimConfig(n=1000, delta=1.0, B=1)
    summary = mc.SimSummary(cfg, 0.95, 0.33, 0.0, 0.37, 1, 0, True)
    ref = reference_for([summary], records)
    assert list(ref) == [(("cusp", 1.0), 1000)]
    md = emit_results([summary], format="markdown", paper_table=True, reference=ref).decode()
    assert "RBC CE-DPI Cov." in md


def test_plot_data_and_sidecar(tmp_path):
    rows = [_row(n=50, coverage=0.9), _row(n=100, coverage=0.94)]
    data = plot_data(rows, "coverage_vs_n")
    assert list(data.series.values()) == [[(50, 0.9), (100, 0.94)]]
    assert data.nominal == pytest.approx(0.95)
    emitted = parse_results(emit_results(rows))
    side = data.sidecar.decode().splitlines()
    assert side[0] == "method,delta,x0,n,coverage"
    assert side[1:] == [f"{r.method},{r.delta!r},{r.x0!r},{r.n},{r.coverage!r}" for r in emitted]
    written = emit_plot(rows, "width_vs_n", tmp_path, render=False)
    assert [p.name for p in written] == ["width_vs_n.csv"]
    with pytest.raises(ValueError):
        plot_data(rows[:1], "coverage_vs_n")


def test_config_expansion_and_errors():
    cells = expand_config({"defaults": {"B": 5}, "grid": {"delta": [0.1, 1.0], "n": [50, 100]}}, seed=3)
    assert [(c.delta, c.n, c.seed, c.B) for c in cells] == [(0.1, 50, 3, 5), (0.1, 100, 3, 5), (1.0, 50, 3, 5), (1.0, 100, 3, 5)]
    with pytest.raises(ConfigError) as err:
        expand_config({"defaults": {"n": "x"}})
    assert err.value.pointer == "/defaults/n"
    with pytest.raises(ConfigError, match="not both"):
        expand_config({"grid": {"n": [50]}, "cells": [{"n": 50}]})
    with pytest.raises(ConfigError) as err:
        expand_config({"cells": [{"method": "ebci_fixed_eta"}]})
    assert err.value.pointer == "/cells/0"


def test_bundled_table_configs_load():
    cells = load_config("table_reg_S3_int_normal.json", reps=7)
    assert len(cells) > 1 and all(c.B == 7 for c in cells)
    assert {c.delta for c in cells} == {0.01, 0.1, 1.0}
