"""
Download the public body-fat dataset (underwater weighing, adult men) and
write it as a canonical CSV.

Accepts either the StatLib text file (15 whitespace-separated numeric
columns per data line, after a free-text description) or a CSV mirror with
a Density,BodyFat,Age,Weight,... header. Weight stays in pounds and height
in inches; load it with `--units imperial`.

    python scripts/fetch_dataset.py --out data/bodyfat.csv
"""
import argparse
import io
import sys
from pathlib import Path

# Add project root to path
sys.path.append(str(Path(__file__).parent.parent))

import httpx
import pandas as pd

from config import DataConfig
from errors import ArtifactIOError, ParseError

DEFAULT_URL = "http://lib.stat.cmu.edu/datasets/bodyfat"

# Source column order (everything after case_id in the canonical schema)
SOURCE_COLUMNS = DataConfig.SCHEMA[1:]


def parse_statlib(text: str) -> pd.DataFrame:
    """Keep lines made of exactly 15 numbers"""
    rows = []
    for line in text.splitlines():
        parts = line.split()
        if len(parts) != len(SOURCE_COLUMNS):
            continue
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            continue
    if not rows:
        raise ParseError("no data lines found in StatLib text")
    return pd.DataFrame(rows, columns=list(SOURCE_COLUMNS))


def parse_csv_mirror(text: str) -> pd.DataFrame:
    frame = pd.read_csv(io.StringIO(text))
    frame.columns = [str(c).strip().lower() for c in frame.columns]
    frame = frame.rename(columns={"percent body fat": "bodyfat"})
    missing = [c for c in SOURCE_COLUMNS if c not in frame.columns]
    if missing:
        raise ParseError(f"CSV mirror lacks column(s) {', '.join(missing)}")
    return frame[list(SOURCE_COLUMNS)]


def to_canonical(frame: pd.DataFrame) -> pd.DataFrame:
    out = frame.copy()
    out.insert(0, "case_id", range(1, len(out) + 1))
    return out[list(DataConfig.SCHEMA)]


def fetch(url: str, timeout: float = 30.0) -> str:
    try:
        response = httpx.get(url, timeout=timeout, follow_redirects=True)
        response.raise_for_status()
    except httpx.HTTPError as e:
        raise ArtifactIOError(f"download failed: {e}") from None
    return response.text


def parse_source(text: str) -> pd.DataFrame:
    """StatLib text or CSV mirror, sniffed from the first line"""
    first = text.lstrip().splitlines()[0] if text.strip() else ""
    if "," in first and "density" in first.lower():
        return parse_csv_mirror(text)
    return parse_statlib(text)


def download_dataset(out: str | Path, url: str = DEFAULT_URL, timeout: float = 30.0) -> Path:
    """Fetch, canonicalize and write the dataset; returns the written path"""
    canonical = to_canonical(parse_source(fetch(url, timeout)))
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    canonical.to_csv(out, index=False, lineterminator="\n")
    return out


def main() -> int:
    parser = argparse.ArgumentParser(description="Fetch the public body-fat dataset")
    parser.add_argument("--url", default=DEFAULT_URL)
    parser.add_argument("--out", default="data/bodyfat.csv")
    args = parser.parse_args()

    print(f"Downloading {args.url} ...")
    out = download_dataset(args.out, args.url)
    n = sum(1 for _ in out.open(encoding="utf-8")) - 1
    print(f"Wrote {n} records to {out} (weight lb, height in: use --units imperial)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
