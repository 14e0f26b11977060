#!/usr/bin/env python3
"""Regenerate data/housing.csv and data/abalone.csv.

The UCI repository is not always reachable, so both tables are pulled from
PyPI packages that bundle verbatim copies:

  * housing: MASS::Boston as shipped in `pydataset` (the 506x14 UCI table;
    the column "black" is renamed to the UCI name "b").
  * abalone: the 4177x9 UCI table as shipped in `scikit-lego`. Sex is
    encoded numerically as M=1, F=2, I=3.

Usage: python3 scripts/fetch_uci_data.py [OUTPUT_DIR]
"""

import csv
import io
import pathlib
import subprocess
import sys
import tarfile
import tempfile
import zipfile

SEX_CODES = {"M": "1", "F": "2", "I": "3"}


def pip_download(package: str, dest: pathlib.Path) -> pathlib.Path:
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-d", str(dest), package],
        check=True,
    )
    stem = package.replace("-", "_").lower()
    for path in dest.iterdir():
        if path.name.replace("-", "_").lower().startswith(stem):
            return path
    raise FileNotFoundError(package)


def housing_rows(archive: pathlib.Path):
    with tarfile.open(archive) as outer:
        member = next(m for m in outer.getmembers() if m.name.endswith("resources.tar.gz"))
        inner_bytes = outer.extractfile(member).read()
    with tarfile.open(fileobj=io.BytesIO(inner_bytes)) as inner:
        member = next(
            m for m in inner.getmembers() if m.name.endswith("rdata/csv/MASS/Boston.csv")
        )
        text = inner.extractfile(member).read().decode()
    rows = list(csv.reader(io.StringIO(text)))
    header = ["b" if h == "black" else h for h in rows[0][1:]]
    yield header
    for row in rows[1:]:
        yield row[1:]


def abalone_rows(wheel: pathlib.Path):
    with zipfile.ZipFile(wheel) as whl:
        nested = zipfile.ZipFile(io.BytesIO(whl.read("sklego/data/abalone.zip")))
        text = nested.read(nested.namelist()[0]).decode()
    rows = list(csv.reader(io.StringIO(text)))
    yield rows[0]
    for row in rows[1:]:
        yield [SEX_CODES[row[0]]] + row[1:]


def write(path: pathlib.Path, rows) -> None:
    with open(path, "w") as out:
        for row in rows:
            out.write(",".join(row) + "\n")


def main() -> None:
    out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data")
    out_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        write(out_dir / "housing.csv", housing_rows(pip_download("pydataset", tmp)))
        write(out_dir / "abalone.csv", abalone_rows(pip_download("scikit-lego", tmp)))


if __name__ == "__main__":
    main()
