#!/usr/bin/env python3
"""Generates olive_synthetic.csv, a synthetic stand-in for the classic
572-sample olive oil fatty-acid dataset (pdfCluster::oliveoil).

The real dataset could not be redistributed with this repository, so this
script draws a dataset with the same shape: 572 rows, eight fatty-acid
composition columns, and a three-level macro.area label with class sizes
323 / 98 / 151. Class means and spreads are loosely modeled on published
summaries of the original data; a shared "compositional seesaw" factor
(oleic against palmitic + linoleic) dominates the within-class covariance,
and the second and third regions are separated mainly along directions
outside the top principal components, so clustering gets harder as the
feature encoding gets narrower.

Run from the repository root:  python3 data/make_olive_synthetic.py
"""

import numpy as np

COLUMNS = ["palmitic", "palmitoleic", "stearic", "oleic", "linoleic",
           "linolenic", "arachidic", "eicosenoic"]

CLASSES = [
    # name, count, mean per column
    ("South", 323,
     np.array([1350.0, 165.0, 228.0, 7090.0, 980.0, 38.0, 62.0, 28.0])),
    ("Sardinia", 98,
     np.array([1120.0, 98.0, 218.0, 7268.0, 1125.0, 33.0, 78.0, 2.0])),
    ("Centre.North", 151,
     np.array([1098.0, 87.0, 238.0, 7775.0, 682.0, 19.0, 36.0, 2.0])),
]

# Per-class diagonal scales. South is the most heterogeneous region.
SCALES = {
    "South": np.array([150.0, 45.0, 33.0, 260.0, 190.0, 11.0, 16.0, 8.0]),
    "Sardinia": np.array([85.0, 22.0, 28.0, 150.0, 110.0, 7.0, 11.0, 1.0]),
    "Centre.North": np.array([100.0, 27.0, 33.0, 200.0, 130.0, 7.0, 13.0, 1.0]),
}

# Shared within-class factors: the compositional seesaw (more oleic means
# less palmitic and linoleic) and a weaker saturated-fat factor. These
# dominate the pooled covariance so the top principal directions carry
# within-class variation rather than the Sardinia / Centre.North contrast.
SEESAW = np.array([-100.0, -24.0, 0.0, 265.0, -175.0, 0.0, 0.0, 0.0])
SATURATED = np.array([60.0, 16.0, 22.0, -55.0, -35.0, 4.0, 5.0, 0.0])


def main():
    rng = np.random.default_rng(20240516)
    rows = []
    for name, count, mean in CLASSES:
        scale = SCALES[name]
        factor1 = rng.normal(size=count)
        factor2 = rng.normal(size=count)
        noise = rng.normal(size=(count, 8)) * scale
        block = mean + np.outer(factor1, SEESAW) + np.outer(factor2, SATURATED) + noise
        block = np.maximum(np.rint(block), 1.0)
        for r in block:
            rows.append((r, name))

    with open("data/olive_synthetic.csv", "w") as out:
        out.write(",".join(COLUMNS) + ",macro.area\n")
        for values, name in rows:
            out.write(",".join(str(int(v)) for v in values) + f",{name}\n")
    print(f"wrote data/olive_synthetic.csv ({len(rows)} rows)")


if __name__ == "__main__":
    main()
