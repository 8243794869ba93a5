#!/usr/bin/env python3
"""Build the UCI benchmark CSVs under data/ from locally available sources.

Sources:
  iris, wine, bcw, diabetes  -> scikit-learn's bundled copies
  pima, ionosphere           -> the KEEL copies shipped in the `keel_ds` wheel
                                (pip download --no-deps keel_ds)

Every CSV has a header row and a `target` column last. Banknote, Boston and
California housing are not bundled by any offline source; drop a
`banknote.csv` (4 features + `target`) into data/ to enable the benchmarks
that use it.
"""

import argparse
import csv
import glob
import gzip
import os
import zipfile

import sklearn

SK = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data")


def write(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def sklearn_bundled(name, features):
    with open(os.path.join(SK, name)) as f:
        r = csv.reader(f)
        next(r)
        rows = [row for row in r if row]
    header = features + ["target"]
    return header, [row[: len(features)] + [row[-1]] for row in rows]


def diabetes():
    with gzip.open(os.path.join(SK, "diabetes_data_raw.csv.gz"), "rt") as f:
        x = [line.split() for line in f if line.strip()]
    with gzip.open(os.path.join(SK, "diabetes_target.csv.gz"), "rt") as f:
        y = [line.strip() for line in f if line.strip()]
    header = ["age", "sex", "bmi", "bp", "s1", "s2", "s3", "s4", "s5", "s6", "target"]
    return header, [a + [b] for a, b in zip(x, y)]


PIMA = ["preg", "plas", "pres", "skin", "insu", "mass", "pedi", "age"]


def keel(wheel, name, features=None):
    z = zipfile.ZipFile(wheel)
    text = z.read(f"keel_ds/data/balanced/raw/{name}.dat").decode()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("@"):
            rows.append([c.strip() for c in line.split(",")])
    if features is None:
        features = [f"a{i}" for i in range(len(rows[0]) - 1)]
    return features + ["target"], rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    ap.add_argument("--keel-wheel", default=None)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    write(os.path.join(args.out, "iris.csv"),
          *sklearn_bundled("iris.csv", ["sepal_length", "sepal_width", "petal_length", "petal_width"]))
    write(os.path.join(args.out, "wine.csv"),
          *sklearn_bundled("wine_data.csv", [f"f{i}" for i in range(13)]))
    write(os.path.join(args.out, "bcw.csv"),
          *sklearn_bundled("breast_cancer.csv", [f"f{i}" for i in range(30)]))
    write(os.path.join(args.out, "diabetes.csv"), *diabetes())

    wheel = args.keel_wheel or next(iter(glob.glob("/tmp/**/keel_ds-*.whl", recursive=True)), None)
    if wheel is None:
        print("keel_ds wheel not found; skipping pima and ionosphere")
        return
    write(os.path.join(args.out, "pima.csv"), *keel(wheel, "pima", PIMA))
    write(os.path.join(args.out, "ionosphere.csv"), *keel(wheel, "ionosphere"))


if __name__ == "__main__":
    main()
