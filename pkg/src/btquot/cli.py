"""Command-line front end: build, table1, check, iso, lift.

Exit codes: 0 success, 1 usage or parse error, 2 budget exceeded, 3 check failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import (TABLE1_CLOSURE_CAP, bound_refutation, brute_force_orders, component_index,
                       expected_component_status,
                       format_table1, odd_q_connectivity_note, st_identity_check,
                       table1_row)
from .export import export_graph, write_text_atomic
from .field import FieldError, is_prime, prime_power
from .formulas import cusp_count, group_orders, level_size
from .graph import (DEFAULT_VERTEX_BUDGET, MODES, BudgetExceeded, GraphError, build_graph,
                    component_count_both, degree_profile_violations)
from .groups import (ClosureOverflow, GroupError, Variant, format_polymat, parse_matrix, random_sl2,
                     sl2_lift)
from .iso import DEFAULT_ISO_BUDGET, IsoBudgetExceeded, iso_check
from .poly import PolyError, format_poly, is_squarefree
from .ring import RgCtx, RingError, ring_from_text, square_class_index

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_CHECK = 0, 1, 2, 3

VARIANTS = [v.value for v in Variant]
CHECK_GRID = [(2, "t"), (2, "t^2"), (2, "t^3"), (2, "t^2+t"), (2, "t^2+t+1"),
              (3, "t"), (3, "t^2"), (3, "t^2+t"), (4, "t^2")]
ORDER_ORACLE_LIMIT = 1 << 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class CliConfig:
    command: str
    q: int | None = None
    g: str | None = None
    variant: Variant = Variant.SL2
    variant2: Variant = Variant.PGL_M
    mode: str = "full"
    levels: int | None = None
    budget: int | None = None
    format: str = "table"
    output: Path | None = None
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def ring(self) -> RgCtx:
        return ring_from_text(self.q, self.g)


def _resolve_q(args) -> int | None:
    q = args.q
    if args.p is not None:
        if not is_prime(args.p):
            raise UsageError(f"--p {args.p} is not prime")
        pq = args.p ** (args.k if args.k is not None else 1)
        if q is not None and q != pq:
            raise UsageError(f"--q {q} is inconsistent with --p {args.p} --k {args.k}")
        q = pq
    elif args.k is not None:
        raise UsageError("--k needs --p")
    if q is not None:
        try:
            prime_power(q)
        except FieldError as exc:
            raise UsageError(str(exc)) from None
    return q


def _n_values(specs: list[str]) -> list[int]:
    out = []
    for s in specs:
        try:
            if "-" in s:
                lo, hi = (int(x) for x in s.split("-", 1))
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(s))
        except ValueError:
            raise UsageError(f"bad n value {s!r}") from None
    if any(n < 2 for n in out):
        raise UsageError("n must be at least 2")
    return out


def make_config(args) -> CliConfig:
    """Validate everything before any computation."""
    cfg = CliConfig(args.command)
    if args.command != "table1":
        cfg.q = _resolve_q(args)
    cfg.g = getattr(args, "g", None)
    if getattr(args, "variant", None):
        cfg.variant = Variant.parse(args.variant)
    if getattr(args, "variant2", None):
        cfg.variant2 = Variant.parse(args.variant2)
    cfg.mode = getattr(args, "mode", cfg.mode)
    cfg.levels = getattr(args, "levels", None)
    if cfg.levels is not None and cfg.levels < 1:
        raise UsageError("--levels must be positive")
    cfg.budget = args.budget
    if cfg.budget is not None and cfg.budget <= 0:
        raise UsageError("--budget must be positive")
    cfg.format = getattr(args, "format", cfg.format)
    cfg.seed = args.seed
    if getattr(args, "output", None):
        cfg.output = Path(args.output)
        if not cfg.output.parent.is_dir():
            raise UsageError(f"output directory {cfg.output.parent} does not exist")
    needs_ring = args.command in ("build", "iso", "lift") or (args.command == "check" and cfg.g)
    if needs_ring:
        if cfg.q is None or cfg.g is None:
            raise UsageError("--q (or --p/--k) and --g are required")
        try:
            ring = cfg.ring()
        except (FieldError, PolyError, RingError) as exc:
            raise UsageError(f"bad ring: {exc}") from None
        cfg.extra["ring"] = ring
    if args.command == "check" and cfg.q is not None and cfg.g is None:
        raise UsageError("--q given without --g")
    if args.command == "table1":
        qs = args.q or [2]
        for q in qs:
            try:
                prime_power(q)
            except FieldError as exc:
                raise UsageError(str(exc)) from None
        cfg.extra["qs"] = qs
        cfg.extra["ns"] = _n_values(args.n)
        cfg.extra["timings"] = args.timings
    if args.command == "lift":
        try:
            cfg.extra["matrix"] = parse_matrix(args.matrix, cfg.extra["ring"])
        except (GroupError, PolyError) as exc:
            raise UsageError(str(exc)) from None
    if args.command == "iso":
        cfg.extra["subgraph01"] = args.subgraph01
        cfg.extra["build_budget"] = args.build_budget
    if args.command == "check":
        cfg.extra["samples"] = args.samples
    return cfg


def _emit(cfg: CliConfig, text: str):
    if cfg.output is not None:
        write_text_atomic(cfg.output, text)
    else:
        sys.stdout.write(text)


def _summary_text(summary: dict) -> str:
    rows = [("q", summary["q"]), ("g", summary["g"]), ("variant", summary["variant"]),
            ("mode", summary["mode"]), ("level sizes", " ".join(map(str, summary["level_sizes"]))),
            ("edges", summary["edges"]), ("components", summary["components"]),
            ("cusp count", summary["cusp_count"])]
    w = max(len(k) for k, _ in rows)
    return "".join(f"{k.ljust(w)}  {v}\n" for k, v in rows)


# -- commands --

def cmd_build(cfg: CliConfig) -> int:
    graph = build_graph(cfg.extra["ring"], cfg.variant, mode=cfg.mode, levels=cfg.levels,
                        budget=cfg.budget or DEFAULT_VERTEX_BUDGET)
    summary = _summary_text(graph.summary())
    if cfg.format == "table":
        _emit(cfg, summary)
        return EXIT_OK
    text = export_graph(graph, cfg.format)
    if cfg.output is not None:
        write_text_atomic(cfg.output, text)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(text)
        sys.stderr.write(summary)
    return EXIT_OK


def cmd_table1(cfg: CliConfig) -> int:
    cap = cfg.budget or TABLE1_CLOSURE_CAP
    rows = []
    for q in cfg.extra["qs"]:
        for n in cfg.extra["ns"]:
            try:
                rows.append(table1_row(q, n, closure_cap=cap, vertex_budget=cap))
            except (MemoryError, ClosureOverflow, BudgetExceeded) as exc:
                sys.stderr.write(f"row q={q} n={n} failed: {exc}\n")
    timings = cfg.extra["timings"]
    if cfg.format == "json":
        out = []
        for r in rows:
            d = r.to_dict()
            if not timings:
                d.pop("seconds")
            out.append(d)
        text = json.dumps(out, indent=1, sort_keys=True) + "\n"
    else:
        text = format_table1(rows, timings=timings)
        text += "conjectured values are predictions only (CONJECTURE), not established results\n"
    _emit(cfg, text)
    return EXIT_OK


def cmd_iso(cfg: CliConfig) -> int:
    ring = cfg.extra["ring"]
    levels = 2 if cfg.extra["subgraph01"] else cfg.levels
    bb = cfg.extra["build_budget"] or DEFAULT_VERTEX_BUDGET
    g1 = build_graph(ring, cfg.variant, mode=cfg.mode, levels=levels, budget=bb)
    g2 = build_graph(ring, cfg.variant2, mode=cfg.mode, levels=levels, budget=bb)
    res = iso_check(g1, g2, budget=cfg.budget or DEFAULT_ISO_BUDGET)
    what = f"{cfg.variant.value} vs {cfg.variant2.value}, q={ring.q}, g={format_poly(ring.g)}"
    if levels == 2:
        what += ", levels 0-1"
    if cfg.format == "json":
        obj = {"q": ring.q, "g": format_poly(ring.g), "variants": [cfg.variant.value, cfg.variant2.value],
               "levels": g1.num_levels, "isomorphic": res.isomorphic, "reason": res.reason,
               "search_nodes": res.nodes,
               "mapping": res.mapping.tolist() if res.mapping is not None else None}
        _emit(cfg, json.dumps(obj, separators=(",", ":")) + "\n")
        return EXIT_OK
    lines = [f"{'ISO' if res else 'NON-ISO'}: {what} ({res.reason}, {res.nodes} search nodes)"]
    if res:
        lev = g1.vertex_level
        lines.append("certificate (first graph vertex -> second graph vertex, level:index):")
        for v, w in enumerate(res.mapping.tolist()):
            i = int(lev[v])
            lines.append(f"  {i}:{v - int(g1.offsets[i])} -> {i}:{w - int(g2.offsets[i])}")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_lift(cfg: CliConfig) -> int:
    ring = cfg.extra["ring"]
    try:
        lifted = sl2_lift(ring, cfg.extra["matrix"])
    except GroupError as exc:
        raise UsageError(str(exc)) from None
    _emit(cfg, format_polymat(lifted) + "\n")
    return EXIT_OK


# -- check suites --

class _Suite:
    def __init__(self, name: str, out: list[str]):
        self.name, self.out, self.failures = name, out, 0

    def record(self, ok: bool, msg: str, expected_note: str = ""):
        if not ok:
            self.failures += 1
        self.out.append(f"  [{'ok' if ok else 'FAIL'}] {msg}{expected_note}")


def _suite_structure(rings, graphs, s: _Suite):
    for (ring, var), gr in graphs.items():
        bad = degree_profile_violations(gr)
        s.record(not bad, f"{_tag(ring)} {var.value}: degree profile and bipartite levels"
                 + (f" ({len(bad)} bad vertices)" if bad else ""))


def _suite_formulas(rings, graphs, s: _Suite):
    for (ring, var), gr in graphs.items():
        want = [level_size(ring, i) for i in range(gr.num_levels)]
        s.record(gr.level_sizes == want and gr.cusp_count == cusp_count(ring),
                 f"{_tag(ring)} {var.value}: level sizes {gr.level_sizes} cusps {gr.cusp_count}")
    for ring in rings:
        if ring.size <= ORDER_ORACLE_LIMIT:
            s.record(brute_force_orders(ring) == group_orders(ring), f"{_tag(ring)}: group orders vs enumeration")


def _suite_components(rings, graphs, s: _Suite):
    for (ring, var), gr in graphs.items():
        uf, quotient = component_count_both(gr)
        s.record(uf == quotient, f"{_tag(ring)} {var.value}: union-find {uf} = quotient {quotient}")
    for ring in rings:
        if ring.n >= 2:
            for var in (Variant.SL2, Variant.PGL_M):
                res = component_index(ring, var)
                s.record(res.method == "both", f"{_tag(ring)} {var.value}: closure index {res.closure}"
                         f" = 0-1 components {res.graph}")


def _suite_st(rings, graphs, s: _Suite):
    for ring in rings:
        if ring.n < 2:
            continue
        rep = st_identity_check(ring)
        s.record(bool(rep.holds), f"{_tag(ring)}: {rep.C}*{rep.index} = {rep.C_tilde}*|S:T| "
                 f"(|S|={len(rep.S)}, |T|={len(rep.T) if rep.T is not None else '?'})")
        if ring.q % 2 == 0 and not is_squarefree(ring.g) and rep.C_tilde is not None and rep.C_tilde <= rep.C:
            s.out.append(f"  [note] {_tag(ring)}: C~ = {rep.C_tilde} does not exceed C = {rep.C} "
                         f"although q is even and g is not squarefree (T is trivial)")


def _suite_connectivity(rings, graphs, s: _Suite):
    for ring in rings:
        x = graphs[(ring, Variant.SL2)].num_components
        xt = graphs[(ring, Variant.PGL_M)].num_components
        idx = square_class_index(ring)
        s.record(x == 1, f"{_tag(ring)}: sl2 graph connected ({x} component)")
        s.record(xt == idx, f"{_tag(ring)}: pgl-m components {xt} = square-class index {idx}")
        predicted = ring.q % 2 == 1 or is_squarefree(ring.g)
        if (xt == 1) != predicted:
            s.out.append(f"  [note] {_tag(ring)}: pgl-m graph has {xt} components although "
                         f"{'q is odd' if ring.q % 2 else 'g is squarefree'}")
        if ring.q % 2 == 1 and ring.n >= 2:
            s.out.append(f"  [note] {_tag(ring)}: sl2 levels 0-1: "
                         f"{odd_q_connectivity_note(component_index(ring, Variant.SL2).value)}")


def _suite_bound(rings, graphs, s: _Suite):
    for ring in rings:
        if ring.n < 2:
            continue
        comp, whole, ncomp = bound_refutation(ring)
        s.record(whole.status == "EQUALITY", f"{_tag(ring)}: S = level 1: {whole.describe()}")
        if ncomp > 1:
            want = expected_component_status(ring.q)
            s.record(comp.status == want, f"{_tag(ring)}: S = one component: {comp.describe()}",
                     f" (expected {want})")


def _suite_lift(rings, graphs, s: _Suite, seed: int, samples: int):
    rng = random.Random(seed)
    for ring in rings:
        bad = 0
        for _ in range(samples):
            try:
                sl2_lift(ring, random_sl2(ring, rng))
            except (AssertionError, GroupError):
                bad += 1
        s.record(bad == 0, f"{_tag(ring)}: {samples - bad}/{samples} random lifts verified")


def _tag(ring: RgCtx) -> str:
    return f"q={ring.q} g={format_poly(ring.g)}"


def cmd_check(cfg: CliConfig) -> int:
    grid = [cfg.extra["ring"]] if "ring" in cfg.extra else [ring_from_text(q, g) for q, g in CHECK_GRID]
    budget = cfg.budget or DEFAULT_VERTEX_BUDGET
    graphs = {}
    for ring in grid:
        for var in Variant:
            graphs[(ring, var)] = build_graph(ring, var, mode="full", budget=budget)
    suites = [("degree-profile", _suite_structure), ("formulas", _suite_formulas),
              ("components", _suite_components), ("st-identity", _suite_st),
              ("connectivity", _suite_connectivity), ("bound-refutation", _suite_bound),
              ("lift", lambda r, g, s: _suite_lift(r, g, s, cfg.seed, cfg.extra["samples"]))]
    out: list[str] = []
    first_fail = None
    for name, fn in suites:
        body: list[str] = []
        suite = _Suite(name, body)
        fn(grid, graphs, suite)
        out.append(f"{'PASS' if not suite.failures else 'FAIL'} {name}")
        out.extend(body)
        if suite.failures and first_fail is None:
            first_fail = name
    out.append("all checks passed" if first_fail is None else f"first failing suite: {first_fail}")
    _emit(cfg, "\n".join(out) + "\n")
    return EXIT_OK if first_fail is None else EXIT_CHECK


# -- parser --

def _ring_args(p: argparse.ArgumentParser, g_required: bool = True):
    p.add_argument("--q", type=int, help="field size (a prime power)")
    p.add_argument("--p", type=int, help="field characteristic (alternative to --q)")
    p.add_argument("--k", type=int, help="extension degree with --p (default 1)")
    p.add_argument("--g", required=g_required, help='modulus, e.g. "t^2+t" (coefficients as field codes)')


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="btquot", description="Levelled coset graphs of congruence quotients over F_q[t].")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="build a coset graph and export it")
    _ring_args(b)
    b.add_argument("--variant", choices=VARIANTS, default="sl2")
    b.add_argument("--mode", choices=MODES, default="full")
    b.add_argument("--levels", type=int, help="keep only levels 0..levels-1")
    b.add_argument("--format", choices=["dot", "json", "table"], default="table")

    t = sub.add_parser("table1", help="component counts C and C~ for g = t^n")
    t.add_argument("--q", type=int, action="append", help="field size; repeat for several")
    t.add_argument("--n", nargs="+", default=["2-4"], help="degrees, e.g. 2 3 or 2-7")
    t.add_argument("--format", choices=["table", "json"], default="table")
    t.add_argument("--timings", action="store_true", help="include wall-clock seconds (not reproducible)")

    c = sub.add_parser("check", help="run the exact invariant suites on a grid")
    _ring_args(c, g_required=False)
    c.add_argument("--samples", type=int, default=200, help="random lifts per ring")

    i = sub.add_parser("iso", help="decide level-respecting isomorphism of two variants")
    _ring_args(i)
    i.add_argument("--variant", choices=VARIANTS, default="sl2")
    i.add_argument("--variant2", choices=VARIANTS, default="pgl-m")
    i.add_argument("--mode", choices=MODES, default="full")
    i.add_argument("--levels", type=int)
    i.add_argument("--subgraph01", action="store_true", help="compare the level 0-1 subgraphs")
    i.add_argument("--build-budget", type=int, help="vertex budget for building each graph")
    i.add_argument("--format", choices=["table", "json"], default="table")

    lf = sub.add_parser("lift", help="lift a determinant-1 matrix over R_g to SL2(F_q[t])")
    _ring_args(lf)
    lf.add_argument("--matrix", required=True, help='e.g. "[[0,1],[1,0]]"')

    for p in (b, t, c, i, lf):
        p.add_argument("--budget", type=int, help="size budget (elements or vertices)")
        p.add_argument("--output", help="write the result here instead of stdout")
        p.add_argument("--seed", type=int, default=0, help="seed for randomised checks")
    return ap


COMMANDS = {"build": cmd_build, "table1": cmd_table1, "check": cmd_check, "iso": cmd_iso, "lift": cmd_lift}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        sys.stderr.write(f"btquot: error: {exc}\n")
        return EXIT_USAGE
    except (BudgetExceeded, IsoBudgetExceeded, ClosureOverflow, RingError) as exc:
        sys.stderr.write(f"btquot: budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except GraphError as exc:
        sys.stderr.write(f"btquot: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
