import xml.etree.ElementTree as ET
from dataclasses import replace

import numpy as np
import pytest

from housemarket import Instance, ark, poa_ark_instance
from housemarket import experiment as ex
from housemarket.experiment import (HEADER, ExperimentConfig, ResultRow, derive_seed, emit_csv, emit_plot, linreg,
                                    load_config, max_size_points, parse_sizes, read_csv, run_experiment, summarize)
from housemarket.optimize import max_ark_value
from housemarket.procedures import DYNAMICS, PROCEDURES, reallocation_trace, solve
from housemarket.market import is_individually_rational

from conftest import random_instance

SVG = "{http://www.w3.org/2000/svg}"


def row(**kw):
    base = dict(culture="ic-sp", procedure="ttc", n=4, rep=0, seed=1, ark=10, mrk=2, ark_opt_noir=12,
                mrk_opt_noir=3, ratio_ark=10 / 12, ratio_mrk=2 / 3, num_deals=3, max_deal_size=2,
                mean_deal_size=4 / 3)
    base.update(kw)
    return ResultRow(**base)


# --- config -------------------------------------------------------------------

def test_parse_sizes():
    assert parse_sizes("2:10:2") == (2, 4, 6, 8, 10)
    assert parse_sizes("3:5") == (3, 4, 5)
    assert parse_sizes("4, 8 16") == (4, 8, 16)


def test_load_config(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text("[experiment]\ncultures = up-sp\nprocedures = ttc, c2-pw  # two\n"
                    "sizes = 4:8:2\nreps = 3\nseed = 11\nendowment = random\noutput = out.csv\n")
    cfg = load_config(path)
    assert cfg == ExperimentConfig(("up-sp",), ("ttc", "c2-pw"), (4, 6, 8), 3, 11, "out.csv", "random")


def test_load_flat_config(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("# comment first\nreps = 2\nsizes = 5\n")
    cfg = load_config(path)
    assert cfg.reps == 2 and cfg.sizes == (5,) and cfg.procedures == PROCEDURES


def test_commented_config_with_section(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text("# leading comment\n[experiment]\nreps = 4\n")
    assert load_config(path).reps == 4


@pytest.mark.parametrize("body", [
    "[other]\nreps = 1\n",
    "[experiment]\nreps = 0\n",
    "[experiment]\nsizes = 1:4\n",
    "[experiment]\ncultures = ic\n",
    "[experiment]\nprocedures = serial-dictatorship\n",
    "[experiment]\nendowment = sorted\n",
    "[experiment]\nrepetitions = 5\n",
])
def test_bad_configs(tmp_path, body):
    path = tmp_path / "bad.ini"
    path.write_text(body)
    with pytest.raises(ValueError):
        load_config(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(OSError):
        load_config(tmp_path / "nope.ini")


def test_derive_seed():
    assert derive_seed(1, 0, 4, 0) == derive_seed(1, 0, 4, 0)
    seeds = {derive_seed(1, c, n, r) for c in range(2) for n in range(2, 10) for r in range(20)}
    assert len(seeds) == 2 * 8 * 20


# --- rows and runs ------------------------------------------------------------

def test_rows_hold_six_significant_digits():
    r = row(ratio_ark=2 / 3)
    assert r.ratio_ark == 0.666667


def test_run_small_experiment():
    cfg = ExperimentConfig(sizes=(2, 5), reps=3, master_seed=4)
    rows = list(run_experiment(cfg))
    assert len(rows) == 2 * 2 * 3 * len(PROCEDURES)
    keys = [(PROCEDURES.index(r.procedure), r.rep, r.n, ex.CULTURES.index(r.culture)) for r in rows]
    assert [k[::-1] for k in keys] == sorted(k[::-1] for k in keys)
    cells = {}
    for r in rows:
        assert 0 < r.ratio_ark <= 1 and 0 < r.ratio_mrk <= 1
        cells.setdefault((r.culture, r.n, r.rep), set()).add((r.seed, r.ark_opt_noir, r.mrk_opt_noir))
        if r.procedure in DYNAMICS:
            assert r.num_deals <= (r.n * r.n - r.n) // 2
        if r.procedure in ("ttc", "crawler"):
            assert r.num_deals >= 1
    assert all(len(v) == 1 for v in cells.values())


def test_all_tops_instances_give_unit_ratios(monkeypatch):
    def tops(n, culture, rng, endowment):
        prefs = tuple(tuple(sorted(range(1, n + 1), key=lambda r: abs(r - i))) for i in range(1, n + 1))
        return Instance(prefs, tuple(range(1, n + 1)), tuple(range(1, n + 1)))

    monkeypatch.setattr(ex, "generate_instance", tops)
    rows = list(run_experiment(ExperimentConfig(procedures=("ttc",), sizes=(3, 6), reps=2)))
    assert all(r.ratio_ark == 1 and r.ratio_mrk == 1 for r in rows)


def test_worst_stable_ratio_of_ark_family():
    for n in (5, 10, 30):
        inst, worst, best = poa_ark_instance(n)
        assert max_ark_value(inst) == ark(inst, best)
        assert ark(inst, worst) / max_ark_value(inst) == pytest.approx(n / (2 * (n - 1)))


def test_procedures_registry(rng):
    inst = random_instance(7, rng, "up-sp")
    for proc in PROCEDURES:
        alloc, trace = solve(inst, proc, 5)
        assert is_individually_rational(inst, alloc)
        assert trace.final == alloc and trace.replays()
    with pytest.raises(ValueError):
        solve(inst, "serial-dictatorship")


def test_reallocation_trace():
    trace = reallocation_trace((1, 2, 3, 4, 5), (2, 3, 1, 4, 5))
    assert trace.final == (2, 3, 1, 4, 5)
    assert trace.sizes == [3]
    assert reallocation_trace((1, 2), (1, 2)).num_deals == 0


# --- csv ----------------------------------------------------------------------

def test_header_only_csv(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], path)
    assert path.read_bytes() == (",".join(HEADER) + "\n").encode()
    assert read_csv(path) == []


def test_csv_round_trip_and_format(tmp_path):
    rows = list(run_experiment(ExperimentConfig(sizes=(4,), reps=2, master_seed=9)))
    rows.append(row(culture="up,sp"))  # forces quoting
    path = tmp_path / "rows.csv"
    emit_csv(rows, path)
    data = path.read_bytes()
    assert b"\r" not in data
    assert b'"up,sp"' in data
    assert read_csv(path) == rows


def test_csv_float_precision(tmp_path):
    path = tmp_path / "one.csv"
    emit_csv([row(ratio_ark=0.123456789, mean_deal_size=12345678.9)], path)
    line = path.read_text().splitlines()[1].split(",")
    assert line[HEADER.index("ratio_ark")] == "0.123457"
    assert line[HEADER.index("mean_deal_size")] == "1.23457e+07"


def test_read_csv_rejects_foreign_header(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_csv(path)


def test_byte_identical_reruns(tmp_path):
    cfg = ExperimentConfig(sizes=(3, 6), reps=4, master_seed=21)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(run_experiment(cfg), a)
    emit_csv(run_experiment(cfg), b)
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    emit_csv(run_experiment(replace(cfg, master_seed=22)), c)
    assert a.read_bytes() != c.read_bytes()


# --- summaries and regression ---------------------------------------------------

def test_summarize_simple():
    s = summarize([row(ratio_ark=0.5), row(ratio_ark=1.0, rep=1)])
    g = s["ic-sp", "ttc", 4]
    assert g.count == 2 and g.mean["ratio_ark"] == 0.75
    assert g.lo["ratio_ark"] == 0.5 and g.hi["ratio_ark"] == 1.0
    single = summarize([row()])["ic-sp", "ttc", 4]
    assert single.mean["num_deals"] == 3 and single.lo["max_deal_size"] == single.hi["max_deal_size"] == 2
    assert summarize([]) == {}


def test_summarize_matches_independent_pass():
    rows = list(run_experiment(ExperimentConfig(cultures=("up-sp",), procedures=("c2-u", "ttc"), sizes=(8,),
                                                reps=200, master_seed=3)))
    s = summarize(rows)
    for proc in ("c2-u", "ttc"):
        mine = [r for r in rows if r.procedure == proc]
        for metric in ("ratio_ark", "ratio_mrk", "num_deals"):
            vals = np.array([getattr(r, metric) for r in mine], dtype=float)
            assert s["up-sp", proc, 8].mean[metric] == pytest.approx(vals.mean(), rel=1e-12)
            assert s["up-sp", proc, 8].hi[metric] == vals.max()


def test_linreg_exact_fit():
    b0, b1, r2 = linreg([(n, 2 + 0.5 * n) for n in range(2, 31, 2)])
    assert b0 == pytest.approx(2) and b1 == pytest.approx(0.5) and r2 == pytest.approx(1)


def test_linreg_matches_normal_equations(rng):
    for _ in range(20):
        x = rng.uniform(0, 60, 50)
        y = 3 - 0.7 * x + rng.normal(0, 5, 50)
        X = np.column_stack([np.ones_like(x), x])
        beta = np.linalg.solve(X.T @ X, X.T @ y)
        resid = y - X @ beta
        r2 = 1 - resid @ resid / ((y - y.mean()) @ (y - y.mean()))
        got = linreg(list(zip(x, y)))
        assert np.allclose(got, (beta[0], beta[1], r2), rtol=0, atol=1e-9)


def test_linreg_errors():
    with pytest.raises(ValueError):
        linreg([(1, 1), (2, 2)])
    with pytest.raises(ValueError):
        linreg([(3, 1), (3, 2), (3, 5)])


def test_max_size_points():
    rows = [row(n=4, max_deal_size=2), row(n=4, rep=1, max_deal_size=3), row(n=6, max_deal_size=1),
            row(n=6, procedure="crawler", max_deal_size=5)]
    assert max_size_points(rows, "ic-sp", "ttc") == [(4, 3), (6, 1)]


# --- plots --------------------------------------------------------------------

def test_plot_structure(tmp_path):
    rows = list(run_experiment(ExperimentConfig(procedures=("ttc", "c2-u", "c2-pw"), sizes=(4, 6), reps=3)))
    written = emit_plot(summarize(rows), tmp_path / "plots")
    assert len(written) == 2 * 4
    for path in written:
        root = ET.parse(path).getroot()
        assert root.tag == SVG + "svg"
        assert len(root.findall(SVG + "polyline")) == 3
        assert len(root.findall(SVG + "polygon")) == 3
    assert (tmp_path / "plots" / "up-sp_ratio_mrk.svg").exists()
