"""Rebuild the bundled UCI CSV files from offline copies.

The sandbox this package was developed in had no route to the UCI archive, so
the tables were assembled from redistributed copies:

* iris, wine: ``sklearn.datasets`` (iris is patched back to the UCI
  ``iris.data`` variant, which differs from Fisher's table in rows 35 and 38)
* glass: R ``MASS::fgl`` (RI column stored as ``(RI - 1.518) * 1000``)
* cancer: R ``MASS::biopsy`` (699 rows, missing bare nuclei written as ``?``)
* cmc: KEEL ``contraceptive.dat``

Usage::

    python scripts/build_uci_csvs.py RDATA_CSV_DIR KEEL_CONTRACEPTIVE_DAT OUTDIR
"""

import csv
import sys
from pathlib import Path

import numpy as np
from sklearn.datasets import load_iris, load_wine


def _write(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def _fmt(v):
    return np.format_float_positional(float(v), trim="-")


def main(rdata, keel_cmc, outdir):
    out = Path(outdir)
    rdata = Path(rdata)

    iris = load_iris()
    x = iris.data.copy()
    x[34] = [4.9, 3.1, 1.5, 0.1]
    x[37] = [4.9, 3.1, 1.5, 0.1]
    names = ["Iris-setosa", "Iris-versicolor", "Iris-virginica"]
    _write(
        out / "iris.csv",
        ["sepal_length", "sepal_width", "petal_length", "petal_width", "class"],
        [[*map(_fmt, r), names[t]] for r, t in zip(x, iris.target)],
    )

    wine = load_wine()
    _write(
        out / "wine.csv",
        [*wine.feature_names, "class"],
        [[*map(_fmt, r), int(t) + 1] for r, t in zip(wine.data, wine.target)],
    )

    with open(rdata / "MASS" / "fgl.csv") as f:
        rows = list(csv.reader(f))
    glass = []
    for r in rows[1:]:
        feats = [float(v) for v in r[1:10]]
        feats[0] = round(1.518 + feats[0] / 1000.0, 5)
        glass.append([*map(_fmt, feats), r[10]])
    _write(out / "glass.csv", [*rows[0][1:10], "type"], glass)

    with open(rdata / "MASS" / "biopsy.csv") as f:
        rows = list(csv.reader(f))
    cancer = [[v if v != "NA" else "?" for v in r[2:11]] + [r[11]] for r in rows[1:]]
    _write(
        out / "cancer.csv",
        ["clump_thickness", "cell_size", "cell_shape", "adhesion",
         "epithelial_size", "bare_nuclei", "chromatin", "nucleoli", "mitoses",
         "class"],
        cancer,
    )

    cmc = [
        line.strip().split(",")
        for line in open(keel_cmc)
        if line.strip() and not line.startswith("@")
    ]
    _write(
        out / "cmc.csv",
        ["wife_age", "wife_education", "husband_education", "children",
         "wife_religion", "wife_working", "husband_occupation",
         "living_index", "media_exposure", "method"],
        [[v.strip() for v in r] for r in cmc],
    )


if __name__ == "__main__":
    main(*sys.argv[1:4])
