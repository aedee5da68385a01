"""Command-line entry point: ``medalg <subcommand> ...``.

Exit codes: 0 success, 1 a registry check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import bits
from .algebra import (
    FiniteMedianAlgebra,
    MedianAlgebraError,
    adjacent_pairs,
    chain_pairs,
    make_chain,
    make_grid,
    make_hypercube,
    make_starlet,
)
from .corpus import CorpusSpec, default_corpus
from .io import algebra_from_dict, algebra_to_dict, load, save
from .roller import (
    MAX_ORIENTATION_WALLS,
    PeriodicBiSequence,
    SymbolicCompactification,
    consistent_orientations,
    format_point,
    parse_point,
    parse_symbolic,
    periodic_square_witness,
)
from .topology import (
    gate_initial_topology,
    halfspace_topology,
    min_isolating_branches,
    small_star_leaf_bound,
    tau_m,
)
from .uniformity import chain_witness_from_t2m, t2m_check
from .walls import MAX_CLIQUE_WALLS, dilworth_colouring, interval_chain_embedding, rank, walls

ISOLATION_LISTING_CAP = 16
SCALING_NOTE = ("min isolating branches vs degree is a finite-scale proxy for the "
                "metric/intrinsic topology gap, not the infinite statement itself")
DEMOS = ("cube3-shadows", "square-nonconvex", "starlet", "periodic-square", "zline-ends")


class UsageError(Exception):
    pass


# -- helpers ----------------------------------------------------------------------------------

def _emit(text: str) -> None:
    sys.stdout.write(text + "\n")


def _element(alg: FiniteMedianAlgebra, token: str) -> int:
    """An element by index, or by coordinate label such as ``0,1,0`` or ``(0,1,0)``."""
    token = token.strip()
    if re.fullmatch(r"\d+", token) and not alg.is_coords:
        i = int(token)
        if i >= alg.n:
            raise UsageError(f"element {i} out of range (n={alg.n})")
        return i
    if alg.is_coords:
        try:
            label = tuple(int(v) for v in token.strip("()").split(","))
        except ValueError:
            raise UsageError(f"cannot parse element {token!r}") from None
        return alg.index_of(label)
    raise UsageError(f"cannot parse element {token!r}")


def _names(alg: FiniteMedianAlgebra, mask: int) -> str:
    return "{" + ", ".join(alg.names(mask)) + "}"


def gen_algebra(spec: str, seed: int = 42) -> FiniteMedianAlgebra:
    """``hypercube:k``, ``chain:k``, ``grid:3x3``, ``starlet:n`` or ``corpus:ID``."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "hypercube":
            return make_hypercube(int(arg))
        if kind == "chain":
            return make_chain(int(arg))
        if kind == "grid":
            return make_grid(*(int(v) for v in arg.split("x")))
        if kind == "starlet":
            return make_starlet(int(arg))
    except ValueError:
        raise UsageError(f"bad size in spec {spec!r}") from None
    if kind == "corpus":
        for inst in default_corpus(CorpusSpec(seed=seed)):
            if inst.id == arg:
                return inst.algebra
        raise UsageError(f"no corpus instance {arg!r} for seed {seed}")
    raise UsageError(f"unknown spec {spec!r} (hypercube:k, chain:k, grid:AxB, starlet:n, corpus:ID)")


def analyze_report(alg: FiniteMedianAlgebra) -> dict:
    ws = walls(alg)
    rep: dict = {
        "n": alg.n,
        "walls": len(ws),
        "rank": rank(alg) if len(ws) <= MAX_CLIQUE_WALLS else None,
        "adjacent_pairs": len(adjacent_pairs(alg)),
        "chain_intervals": len(chain_pairs(alg)),
    }
    t2 = t2m_check(alg)
    if t2.holds:
        witness = None
        if alg.n >= 2:
            (x, y), sep = min(t2.witnesses.items())
            c, d = chain_witness_from_t2m(alg, x, y, sep)
            witness = {"pair": [alg.name(x), alg.name(y)],
                       "chain": [alg.name(sep[0]), alg.name(sep[1])],
                       "inner_chain": [alg.name(c), alg.name(d)]}
        rep["t2m"] = {"holds": True, "witness": witness}
    else:
        x, y = t2.failure
        rep["t2m"] = {"holds": False, "unseparated": [alg.name(x), alg.name(y)]}
    top = tau_m(alg)
    rep["tau_m_discrete"] = top.is_discrete()
    rep["roller_orientations"] = (len(consistent_orientations(alg))
                                  if len(ws) <= MAX_ORIENTATION_WALLS else None)
    listing = []
    for x in range(min(alg.n, ISOLATION_LISTING_CAP)):
        if top.min_nbhd[x] == 1 << x:
            listing.append({"element": alg.name(x),
                            "min_isolating_branches": min_isolating_branches(alg, x).count})
    rep["isolation"] = {"listed": listing, "capped": alg.n > ISOLATION_LISTING_CAP,
                        "note": SCALING_NOTE}
    rep["topology_equalities"] = {
        "tau_m == halfspace topology": top == halfspace_topology(alg),
        "tau_m == chain-gate initial topology": top == gate_initial_topology(alg),
    }
    rep["algebra"] = algebra_to_dict(alg)
    return rep


def format_analysis(rep: dict) -> str:
    t2 = rep["t2m"]
    if t2["holds"]:
        w = t2["witness"]
        t2_line = "holds" if w is None else (
            f"holds (e.g. {w['pair'][0]} vs {w['pair'][1]} separated by the gate onto "
            f"[{w['chain'][0]}, {w['chain'][1]}]; inner chain [{w['inner_chain'][0]}, "
            f"{w['inner_chain'][1]}])")
    else:
        t2_line = f"fails: {t2['unseparated'][0]} and {t2['unseparated'][1]} not separated"
    lines = [
        f"n: {rep['n']}",
        f"rank: {rep['rank'] if rep['rank'] is not None else 'too many walls'}",
        f"walls: {rep['walls']}",
        f"adjacent pairs: {rep['adjacent_pairs']}",
        f"chain intervals: {rep['chain_intervals']}",
        f"T2^m: {t2_line}",
        f"tau_m discrete: {rep['tau_m_discrete']}",
        f"roller orientations: {rep['roller_orientations']}",
    ]
    iso = rep["isolation"]
    listing = ", ".join(f"{r['element']}:{r['min_isolating_branches']}" for r in iso["listed"])
    lines.append(f"min isolating branches: {listing}" + (" ..." if iso["capped"] else ""))
    for k, v in rep["topology_equalities"].items():
        lines.append(f"{k}: {v}")
    lines.append(f"note: {iso['note']}")
    return "\n".join(lines)


# -- subcommands ---------------------------------------------------------------------------------

def cmd_verify(args) -> int:
    from .registry import (format_summary, reports_to_json, run_registry, summarise,
                           write_reproducers)
    spec = CorpusSpec(seed=args.seed)
    overrides = {k: getattr(args, k) for k in ("cube_closures", "grid_closures", "trees", "products")
                 if getattr(args, k) is not None}
    if args.no_cube3:
        overrides["enumerate_cube3"] = False
    spec = replace(spec, **overrides)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()] if args.checks else None
    try:
        corpus = default_corpus(spec)
        reports = run_registry(corpus, checks, seed=args.seed, threads=args.threads)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    summary = summarise(reports)
    _emit(format_summary(summary))
    if args.out:
        Path(args.out).write_text(reports_to_json(reports) + "\n", encoding="utf-8")
        _emit(f"report: {args.out}")
        written = write_reproducers(reports, Path(args.out).with_suffix(".failures"))
        for path in written:
            _emit(f"reproducer: {path}")
    if args.figures:
        from .plots import verify_figures
        for path in verify_figures(reports, args.figures):
            _emit(f"figure: {path}")
    return 1 if summary.failures else 0


def cmd_analyze(args) -> int:
    alg = load(args.file)
    rep = analyze_report(alg)
    if args.format == "json":
        _emit(json.dumps(rep, indent=1, sort_keys=True))
    else:
        _emit(format_analysis(rep))
    if args.figures:
        from .plots import analyze_figures
        for path in analyze_figures(alg, args.figures):
            sys.stderr.write(f"figure: {path}\n")
    return 0


def cmd_roller(args) -> int:
    comp = parse_symbolic(args.symbolic)
    _emit(comp.boundary_report())
    if args.median:
        if not isinstance(comp, SymbolicCompactification):
            raise UsageError("--median needs a product of lines and chains")
        a, b, c = (parse_point(p) for p in args.median)
        _emit(f"median: {format_point(comp.median(a, b, c))}")
    for text in args.point or ():
        if not isinstance(comp, SymbolicCompactification):
            raise UsageError("--point needs a product of lines and chains")
        p = parse_point(text)
        where = ("not a point" if not comp.contains(p)
                 else "boundary" if comp.is_boundary(p) else "interior")
        _emit(f"{format_point(p)}: {where}")
    return 0


def cmd_embed_interval(args) -> int:
    alg = load(args.file)
    x, y = _element(alg, args.x), _element(alg, args.y)
    if x == y:
        _emit(f"[{alg.name(x)}, {alg.name(y)}] is a single point; no walls to colour")
        return 0
    classes = dilworth_colouring(alg, x, y)
    emb = interval_chain_embedding(alg, x, y)
    _emit(f"interval [{alg.name(x)}, {alg.name(y)}]: {bits.count(alg.interval_mask(x, y))} points, "
          f"{sum(len(c) for c in classes)} separating walls, {len(classes)} colour classes")
    for i, cls in enumerate(classes):
        sides = " < ".join(_names(alg, w.minus) for w in cls)
        _emit(f"class {i} (chain of {len(cls) + 1}): minus sides {sides}")
    for z, coord in sorted(emb.coords.items(), key=lambda kv: kv[1]):
        _emit(f"{alg.name(z)} -> {coord}")
    _emit(f"injective: {emb.injective}  median-preserving: {emb.median_preserving}")
    return 0


def demo_lines(name: str) -> list[str]:
    from .registry import cube3_shadow_sets, square_nonconvex
    if name == "cube3-shadows":
        sets = cube3_shadow_sets()
        lines = ["3-cube, x=(0,0,0), y=(1,1,0), z=(1,0,0)"]
        for key, members in sets.items():
            shown = ", ".join("(" + ",".join(map(str, p)) + ")" for p in sorted(members))
            lines.append(f"{key} = {{{shown}}}")
        lines.append(f"B(x,y) == B(z,y): {sets['B(x,y)'] == sets['B(z,y)']}")
        return lines
    if name == "square-nonconvex":
        sq = square_nonconvex()
        shown = ", ".join("(" + ",".join(map(str, p)) + ")" for p in sorted(sq["half_open"]))
        return ["2-cube, u=(0,0), v=(1,1)",
                f"med((1,0),(1,1),(0,1)) = ({sq['median'][0]},{sq['median'][1]})",
                f"[u,v) = {{{shown}}}",
                f"branch equals [u,v): {sq['branch_is_half_open']}",
                f"[u,v) convex: {sq['convex']}"]
    if name == "starlet":
        lines = []
        for n in range(2, 9):
            a = make_starlet(n)
            kept = [small_star_leaf_bound(a, 0, k) for k in range(n + 1)]
            lines.append(f"starlet({n}): min isolating branches at centre = "
                         f"{min_isolating_branches(a, 0).count}; leaves kept by k-branch stars "
                         f"{kept}")
        lines.append(parse_symbolic("starlet:3").boundary_report())
        return lines
    if name == "periodic-square":
        lines = []
        for xs, ys in (("01", "11"), ("0", "1"), ("0011", "0111")):
            x, y = PeriodicBiSequence.from_pattern(xs), PeriodicBiSequence.from_pattern(ys)
            sq = periodic_square_witness(x, y)
            lines.append(f"[{x}, {y}] contains the square " + ", ".join(str(z) for z in sq)
                         + " (minimal periods)")
        return lines
    if name == "zline-ends":
        return [parse_symbolic("zline").boundary_report(),
                parse_symbolic("zline^2").boundary_report()]
    raise UsageError(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}")


def cmd_demo(args) -> int:
    for line in demo_lines(args.name):
        _emit(line)
    return 0


def cmd_gen(args) -> int:
    if args.spec and args.from_report:
        raise UsageError("give either --spec or --from-report, not both")
    if args.spec:
        alg = gen_algebra(args.spec, args.seed)
    elif args.from_report:
        try:
            rep = json.loads(Path(args.from_report).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read {args.from_report}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.from_report}: invalid JSON ({exc.msg})") from None
        if not isinstance(rep, dict) or "algebra" not in rep:
            raise UsageError(f"{args.from_report} is not an analyze report (no 'algebra' key)")
        alg = algebra_from_dict(rep["algebra"])
    else:
        raise UsageError("gen needs --spec or --from-report")
    save(alg, args.out)
    _emit(f"wrote {args.out} (n={alg.n})")
    return 0


# -- parser ------------------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="medalg", description="Finite median algebras and their intrinsic structure.")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run the theorem registry over the seeded corpus")
    v.add_argument("--seed", type=int, default=42, help="corpus seed (default 42)")
    v.add_argument("--checks", help="comma-separated check ids (default: all)")
    v.add_argument("--out", help="write the JSON report here")
    v.add_argument("--figures", metavar="DIR", help="write summary figures into DIR")
    v.add_argument("--threads", type=int, help="worker processes (default MEDALG_THREADS or CPUs)")
    v.add_argument("--cube-closures", type=int, help="random closures in the 5-cube")
    v.add_argument("--grid-closures", type=int, help="random closures in the 3x3x3 grid")
    v.add_argument("--trees", type=int, help="random trees")
    v.add_argument("--products", type=int, help="random products")
    v.add_argument("--no-cube3", action="store_true", help="skip the 3-cube subalgebra scan")
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("analyze", help="summarise an algebra file")
    a.add_argument("file")
    a.add_argument("--format", choices=("text", "json"), default="text")
    a.add_argument("--figures", metavar="DIR", help="write median graph and metric figures")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("roller", help="describe a symbolic compactification")
    r.add_argument("--symbolic", required=True, metavar="SPEC",
                   help='e.g. "zline", "zline^2", "zline x chain:3", "starlet:4"')
    r.add_argument("--median", nargs=3, metavar="POINT", help="median of three points")
    r.add_argument("--point", action="append", metavar="POINT", help="classify a point")
    r.set_defaults(func=cmd_roller)

    e = sub.add_parser("embed-interval", help="Dilworth colouring of an interval")
    e.add_argument("file")
    e.add_argument("x")
    e.add_argument("y")
    e.set_defaults(func=cmd_embed_interval)

    d = sub.add_parser("demo", help="fixed worked examples")
    d.add_argument("name", choices=DEMOS)
    d.set_defaults(func=cmd_demo)

    g = sub.add_parser("gen", help="write an algebra file")
    g.add_argument("--spec", help="hypercube:k | chain:k | grid:AxB | starlet:n | corpus:ID")
    g.add_argument("--from-report", help="re-emit the algebra held in an analyze JSON report")
    g.add_argument("--seed", type=int, default=42, help="corpus seed for corpus:ID (default 42)")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)
    return p


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, MedianAlgebraError, ValueError, OSError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        sys.stderr.write(f"medalg: error: {msg}\n")
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
