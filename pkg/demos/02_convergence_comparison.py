"""Quadratic vs linear convergence on a zero-residual cubic ridge.

Fits the same ten datasets with the Gauss-Newton solver and with the
alternating baseline (100 steepest-descent steps per outer iteration)
and plots the per-iteration normalized residual traces side by side.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from polyridge import run_experiment

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

replicates = 10
res = run_experiment("convergence", {"seed": 0, "replicates": replicates})
records = res.to_records()

fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
for ax, solver, color in ((axes[0], "gauss_newton", "C0"), (axes[1], "alternating", "C1")):
    for rep in range(replicates):
        trace = [(r["iter"], r["residual"]) for r in records
                 if r["solver"] == solver and r["replicate"] == rep]
        it, resid = zip(*trace)
        ax.semilogy(it, resid, "-o", color=color, ms=2, lw=0.8, alpha=0.8)
    ax.set(title=solver.replace("_", " "), xlabel="iteration", xlim=(0, 40))
    ax.grid(alpha=0.3)
axes[0].set(ylabel=r"$\|r\| / \|f\|$", ylim=(1e-16, 1))
fig.suptitle("cubic ridge in $\\mathbb{R}^{10}$, $n=2$, $p=3$, $M=1000$")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "convergence.png"), dpi=150)

with open(os.path.join(OUT, "convergence.csv"), "w") as fh:
    res.write_csv(fh)
print(f"wrote {OUT}/convergence.png and convergence.csv")
