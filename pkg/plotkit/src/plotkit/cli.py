"""One console script per figure kind, sharing --csv/--out flags."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import DEVICE_LAMBDA_BAND, FigureSpec, MissingColumnError, render


def _run(kind: str, argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog=f"plotkit-{kind}", description=f"Render a {kind} figure.")
    parser.add_argument("--csv", required=True, help="input CSV file")
    parser.add_argument("--out", required=True, help="output PNG file")
    parser.add_argument("--title", default="")
    if kind in ("cool-minima", "pipulse-band"):
        parser.add_argument("--band", action="store_true",
                            help="shade the achievable device lambda range")
    args = parser.parse_args(argv)
    band = DEVICE_LAMBDA_BAND if getattr(args, "band", False) else None
    try:
        spec = FigureSpec(kind=kind, csv_path=Path(args.csv),
                          out_path=Path(args.out), lambda_band=band,
                          title=args.title)
        result = render(spec)
    except (MissingColumnError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(result.out_path)
    return 0


def main_cool_curves(argv=None) -> int:
    return _run("cool-curves", argv)


def main_cool_minima(argv=None) -> int:
    return _run("cool-minima", argv)


def main_pipulse_band(argv=None) -> int:
    return _run("pipulse-band", argv)


def main_wigner_map(argv=None) -> int:
    return _run("wigner-map", argv)


if __name__ == "__main__":
    sys.exit(_run(sys.argv[1], sys.argv[2:]))
