#!/usr/bin/env python3
"""Materialize the benchmark CSVs under data/.

Auto MPG (UCI, 398 rows) is rebuilt from the copy shipped in the
``vega_datasets`` wheel; Cleveland Heart Disease (303 rows) from the copy in
the ``scikit-lego`` wheel. House Sales in King County is not redistributed by
any package index; download ``kc_house_data.csv`` from Kaggle and place it in
data/ yourself.
"""
import csv
import io
import json
import pathlib
import subprocess
import sys
import tempfile
import zipfile

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "data"


def wheel(name: str, tmp: pathlib.Path) -> zipfile.ZipFile:
    subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q",
                    "--disable-pip-version-check", "-d", str(tmp), name],
                   check=True)
    stem = name.split("==")[0].replace("-", "_")
    whl = next(tmp.glob(stem + "-*.whl"))
    return zipfile.ZipFile(whl)


def auto_mpg(tmp: pathlib.Path) -> None:
    z = wheel("vega_datasets==0.9.0", tmp)
    cars = json.loads(z.read("vega_datasets/_data/cars.json"))
    out = DATA / "auto-mpg.csv"
    with out.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["mpg", "cylinders", "displacement", "horsepower", "weight",
                    "acceleration", "model_year", "origin", "car_name"])
        for c in cars:
            # rows without a target are not part of the 398-row UCI file
            if c["Miles_per_Gallon"] is None:
                continue
            hp = "?" if c["Horsepower"] is None else f'{c["Horsepower"]:g}'
            w.writerow([f'{c["Miles_per_Gallon"]:g}', c["Cylinders"],
                        f'{c["Displacement"]:g}', hp, c["Weight_in_lbs"],
                        f'{c["Acceleration"]:g}', c["Year"][:4], c["Origin"],
                        c["Name"]])
    print(f"wrote {out}")


def heart(tmp: pathlib.Path) -> None:
    z = wheel("scikit-lego==0.9.10", tmp)
    inner = zipfile.ZipFile(io.BytesIO(z.read("sklego/data/hearts.zip")))
    out = DATA / "heart.csv"
    out.write_bytes(inner.read("heart.csv"))
    print(f"wrote {out}")


def main() -> None:
    DATA.mkdir(exist_ok=True)
    with tempfile.TemporaryDirectory() as d:
        tmp = pathlib.Path(d)
        auto_mpg(tmp)
        heart(tmp)
    if not (DATA / "kc_house_data.csv").exists():
        print("note: data/kc_house_data.csv missing (download from Kaggle)")


if __name__ == "__main__":
    main()
