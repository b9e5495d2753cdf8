#!/usr/bin/env python3
"""Print the strategy cost tables: an m-sweep and the v-near-m ordering.

The first table sweeps register widths at fixed candidate counts. The
second sets v = m, the regime where relabeling pays off most, and shows
the ordering permutation <= disentangled <= iterative <= baseline.
"""

import argparse
import sys

from qtreesearch.cli import COST_COLUMNS, _csv_text, render_cost_text, write_output
from qtreesearch.costs import STRATEGIES, times_ratio, times_ratio_limit
from qtreesearch.runner import cost_table


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m", default="8,12,16,20,24", help="comma list of widths")
    parser.add_argument("--v", default="2,4", help="comma list of candidate counts")
    parser.add_argument("--format", choices=("text", "csv"), default="text")
    parser.add_argument("--out", default=None, help="write here instead of stdout")
    args = parser.parse_args()

    ms = [int(x) for x in args.m.split(",") if x.strip()]
    vs = [int(x) for x in args.v.split(",") if x.strip()]
    render = render_cost_text if args.format == "text" else (
        lambda rows: _csv_text(COST_COLUMNS, rows)
    )

    chunks = [render(cost_table(ms, vs, list(STRATEGIES)))]
    if args.format == "text":
        chunks.append("\nv = m ordering:\n")
        rows = []
        for m in ms:
            rows.extend(cost_table([m], [m], list(STRATEGIES)))
        chunks.append(render_cost_text(rows))
        ratios = ", ".join(f"m={m}: {times_ratio(m, 4):.4f}" for m in ms if m >= 16)
        chunks.append(
            f"\niterative/disentangled ratio at v=4 ({ratios}; "
            f"limit {times_ratio_limit(4):.4f})\n"
        )
    write_output("".join(chunks), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
