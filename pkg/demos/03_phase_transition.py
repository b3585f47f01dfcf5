"""A desk-scale sparsity-separation phase transition campaign.

Runs the nuclear-norm completion solver over a small grid of model
orders and frequency separations (30 random samples out of 65), then
prints the success-rate table that the full-size campaign renders as a
white/black heatmap. Expect complete success at small K regardless of
separation and a sharp collapse near K ~ 10.

The same campaign is available from the command line:

    demac bench --config demos/configs/phase_small.txt --out /tmp/phase

Run:  python demos/03_phase_transition.py
"""

import csv
import tempfile
from pathlib import Path

from demac import ExperimentConfig, run_experiment

config = ExperimentConfig(
    kind="phase_transition",
    dims=(65,),
    trials=5,
    seed=0,
    methods=(("demac", "double-hankel"),),
    k_values=(1, 4, 7, 10, 13),
    delta_f=(0.5, 1.0, 1.5),
    m_values=(30,),
    sep_mode="exact-pair",
)

out = Path(tempfile.mkdtemp(prefix="demac-phase-"))
trials_csv, agg_csv = run_experiment(config, out)
print(f"per-trial rows: {trials_csv}")
print(f"aggregates:     {agg_csv}\n")

with open(agg_csv, newline="") as fh:
    rows = list(csv.DictReader(fh))

seps = sorted({float(r["delta_f"]) for r in rows})
print("success rate (rows: K, columns: separation in cycles/sample)")
print("K    " + "  ".join(f"{s:8.4f}" for s in seps))
for k in config.k_values:
    line = [f"{float(r['success_rate']):8.2f}" for s in seps for r in rows
            if int(r["K"]) == k and abs(float(r["delta_f"]) - s) < 1e-12]
    print(f"{k:<4d} " + "  ".join(line))

print("\nFeed the aggregate CSV to the figure renderer for the grayscale map:")
print(f"  python figs/render.py --input {agg_csv} --figure phase "
      "--x delta_f --y K --z success_rate --out phase.svg")
