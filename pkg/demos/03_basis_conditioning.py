"""Why the scaled Legendre basis: conditioning of the design matrix.

Projects 1000 samples from [0,1]^100 onto the normalized ones vector and
tracks the condition number of the design matrix while the polynomial
degree grows, for raw monomials, monomials scaled to [-1,1], Legendre,
and Hermite bases.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from polyridge import run_experiment

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

res = run_experiment("conditioning", {"seed": 0})
records = res.to_records()

labels = {
    ("monomial", 0): ("monomial, unscaled", "C3"),
    ("monomial", 1): ("monomial, scaled", "C1"),
    ("legendre", 1): ("Legendre, scaled", "C0"),
    ("hermite", 1): ("Hermite, standardized", "C2"),
}
fig, ax = plt.subplots(figsize=(6.5, 4.5))
for (family, scaled), (label, color) in labels.items():
    pts = sorted(
        (r["degree"], r["cond"]) for r in records
        if r["basis"] == family and r["scaled"] == scaled
    )
    ax.semilogy(*zip(*pts), "o-", ms=4, color=color, label=label)
ax.set(xlabel="polynomial degree", ylabel="condition number of the design matrix")
ax.grid(alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "conditioning.png"), dpi=150)

with open(os.path.join(OUT, "conditioning.csv"), "w") as fh:
    res.write_csv(fh)
print(f"wrote {OUT}/conditioning.png and conditioning.csv")
