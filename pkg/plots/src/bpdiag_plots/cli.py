"""Command-line front end for figure rendering.

Subcommands
-----------
- ``scatter``  shifted-pair scatter grid from the ``pairs_n*.csv`` dumps
  in a run directory
- ``decay``    log10 decay curves plus the stored fitted lines from a
  sweep ``summary.json``

Each subcommand writes exactly one image file; malformed or missing input
exits non-zero without creating it.
"""

from __future__ import annotations

import argparse

from .data import discover_pair_dumps, load_summary
from .figures import render_decay, render_scatter_grid


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render figures from stored diagnostic runs."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    scatter = sub.add_parser("scatter", help="scatter grid with marginal histograms")
    scatter.add_argument("--pairs", required=True,
                         help="directory holding pairs_n*.csv dumps")
    scatter.add_argument("--out", required=True, help="image file to write")
    decay = sub.add_parser("decay", help="decay curves with stored fitted lines")
    decay.add_argument("--summary", required=True,
                       help="summary.json written by a sweep run")
    decay.add_argument("--out", required=True, help="image file to write")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "scatter":
            out = render_scatter_grid(discover_pair_dumps(args.pairs), args.out)
        else:
            out = render_decay(load_summary(args.summary), args.out)
    except (OSError, ValueError) as err:
        raise SystemExit(str(err)) from err
    print(f"wrote {out}")
    return 0
