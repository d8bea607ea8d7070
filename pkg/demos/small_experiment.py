"""A small sweep with CSV, plots and the deal-size regression."""

# %%
import sys
import tempfile
from pathlib import Path

from housemarket import ExperimentConfig, emit_csv, emit_plot, linreg, run_experiment, summarize
from housemarket.experiment import max_size_points

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="housemarket-"))
out.mkdir(parents=True, exist_ok=True)

cfg = ExperimentConfig(sizes=tuple(range(4, 21, 4)), reps=30, master_seed=7)
rows = list(run_experiment(cfg))
emit_csv(rows, out / "results.csv")
summary = summarize(rows)
written = emit_plot(summary, out / "plots")
print(len(rows), "rows;", len(written), "plots in", out)

# %% mean efficiency at the largest size
n = max(cfg.sizes)
for culture in cfg.cultures:
    print(culture)
    for proc in cfg.procedures:
        g = summary[culture, proc, n]
        print(f"  {proc:11s} ark {g.mean['ratio_ark']:.3f}  mrk {g.mean['ratio_mrk']:.3f}  deals {g.mean['num_deals']:.1f}")

# %% largest deal against n
for culture in cfg.cultures:
    for proc in ("ttc", "crawler"):
        b0, b1, r2 = linreg(max_size_points(rows, culture, proc))
        print(f"{culture} {proc:8s} slope {b1:.3f} intercept {b0:.2f} R2 {r2:.2f}")
