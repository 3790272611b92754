"""Write DOT and JSON exports for a few small quotient graphs into a directory.

Usage: python scripts/build_examples.py OUTDIR
"""

import argparse
from pathlib import Path

from btquot.export import export_graph
from btquot.graph import build_graph
from btquot.groups import Variant
from btquot.ring import ring_from_text

CONFIGS = [(2, "t", Variant.SL2), (2, "t^2", Variant.SL2), (2, "t^2", Variant.PGL_M),
           (2, "t^3", Variant.SL2), (3, "t^2", Variant.SL2), (3, "t^2+t", Variant.PGL_M),
           (4, "t^2", Variant.PGL_M)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir")
    args = ap.parse_args(argv)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for q, g, var in CONFIGS:
        graph = build_graph(ring_from_text(q, g), var)
        stem = f"q{q}_{g.replace('^', '').replace('+', 'p')}_{var.value}"
        for fmt in ("dot", "json"):
            export_graph(graph, fmt, out / f"{stem}.{fmt}")
        s = graph.summary()
        print(f"{stem}: levels {s['level_sizes']} edges {s['edges']} components {s['components']}")


if __name__ == "__main__":
    main()
