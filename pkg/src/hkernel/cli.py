"""Command-line interface.

Exit codes: 0 pass / found, 1 fail / absent (a witness is printed),
2 usage or input error, 3 a cap or search budget was exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from typing import Any, Sequence

from . import corollaries as cor
from . import harness
from .hypotheses import HYPOTHESIS_IDS, check_all
from .kernels import (
    HypothesisFailure, PipelineError, build_semikernel_digraph, find_h_kernel_bruteforce, is_h_absorbent,
    is_h_independent, is_h_kernel, is_h_semikernel, is_h_semikernel_mod_d2, theorem_pipeline,
)
from .model import (
    ArcFilter, CapExceeded, Caps, Instance, InstanceError, IsolatedVertexWarning, _jsonable, dumps_canonical, load,
    to_raw, use_caps,
)
from .reachability import h_path, h_walk
from .structure import bipartition, color_class_digraph

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class _Out:
    """Collects a report and renders it as text or canonical structured data."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []
        self.data: dict[str, Any] = {}

    def line(self, text: str = "") -> None:
        self.lines.append(text)

    def emit(self, stream=None) -> None:
        stream = stream or sys.stdout
        if self.fmt == "structured":
            stream.write(dumps_canonical(self.data))
        else:
            stream.write("\n".join(self.lines) + ("\n" if self.lines else ""))


def _fmt_set(s: Sequence[str]) -> str:
    return "{" + ", ".join(s) + "}"


def _witness_text(payload: dict) -> str:
    return json.dumps(_jsonable(payload), sort_keys=True, ensure_ascii=False)


# --------------------------------------------------------------------------
# dot export


def _dot(inst: Instance) -> str:
    def q(s: str) -> str:
        return '"' + s.replace('"', '\\"') + '"'

    parts = ["digraph D {"]
    parts += [f"  {q(v)};" for v in inst.vertices]
    parts += [f"  {q(a)} -> {q(b)} [label={q(c)}];" for (a, b), c in sorted(inst.digraph.coloring.items())]
    parts.append("}")
    parts.append("digraph H {")
    parts += [f"  {q(v)};" for v in inst.pattern.vertices]
    parts += [f"  {q(a)} -> {q(b)};" for a, b in inst.pattern.sorted_arcs()]
    parts.append("}")
    ccd = color_class_digraph(inst)
    parts.append("digraph CCD {")
    parts += [f"  {q(v)};" for v in ccd.vertices]
    parts += [f"  {q(a)} -> {q(b)};" for a, b in ccd.sorted_arcs()]
    parts.append("}")
    if inst.partition is not None and not inst.isolated_vertices:
        try:
            dsk = build_semikernel_digraph(inst)
        except CapExceeded:
            dsk = None
        if dsk is not None:
            parts.append("digraph DS {")
            parts += [f"  n{i} [label={q(_fmt_set(node))}];" for i, node in enumerate(dsk.nodes)]
            parts += [f"  n{i} -> n{j};" for i, j in dsk.arcs]
            parts.append("}")
    return "\n".join(parts) + "\n"


# --------------------------------------------------------------------------
# subcommands


def _load(args) -> Instance:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IsolatedVertexWarning)
        inst = load(args.instance)
    for w in caught:
        if issubclass(w.category, IsolatedVertexWarning):
            print(f"warning: {w.message}", file=sys.stderr)
    if getattr(args, "emit_dot", None):
        with open(args.emit_dot, "w", encoding="utf-8") as fh:
            fh.write(_dot(inst))
    return inst


def cmd_check(args, out: _Out) -> int:
    inst = _load(args)
    p = inst.partition
    out.data = {
        "valid": True,
        "vertices": len(inst.vertices),
        "arcs": len(inst.digraph.coloring),
        "colors": len(inst.pattern.vertices),
        "pattern_arcs": len(inst.pattern.arcs),
        "pattern_shape": cor.classify_pattern(inst.pattern).value,
        "classes": None if p is None else p.k,
        "isolated_vertices": list(inst.isolated_vertices),
    }
    out.line(f"valid instance: |V(D)|={len(inst.vertices)} |A(D)|={len(inst.digraph.coloring)} "
             f"|V(H)|={len(inst.pattern.vertices)} |A(H)|={len(inst.pattern.arcs)}")
    out.line(f"pattern shape: {out.data['pattern_shape']}")
    if p is None:
        out.line("partition: none")
    else:
        out.line(f"partition: {p.k} classes; side 1 = {sorted(p.side1)}, side 2 = {sorted(p.side2)}")
    if inst.isolated_vertices:
        out.line(f"isolated vertices: {', '.join(inst.isolated_vertices)}")
    return EXIT_OK


def cmd_hypotheses(args, out: _Out) -> int:
    inst = _load(args)
    ids = tuple(args.only.split(",")) if args.only else HYPOTHESIS_IDS
    bad = [h for h in ids if h not in HYPOTHESIS_IDS]
    if bad:
        raise InstanceError("usage", f"unknown hypothesis id(s): {', '.join(bad)}")
    verdicts = check_all(inst, short_circuit=args.short_circuit, transitivity=args.transitivity, ids=ids)
    ok = all(verdicts)
    out.data = {"pass": ok, "verdicts": [v.to_dict() for v in verdicts]}
    for v in verdicts:
        status = "pass" if v else "FAIL"
        out.line(f"hypothesis {v.hypothesis}: {status} ({v.kind})")
        if not v:
            out.line(f"  witness: {_witness_text(dict(v.payload))}")
    out.line(f"overall: {'pass' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_reach(args, out: _Out) -> int:
    inst = _load(args)
    flt = ArcFilter.parse(args.filter)
    for v in (args.u, args.v):
        if v not in inst.vindex:
            raise InstanceError("usage", f"unknown vertex {v!r}")
    if args.u == args.v:
        raise InstanceError("usage", "reach needs two distinct vertices")
    if flt.kind != "all":
        inst.require_partition()
    path = h_path(inst, args.u, args.v, flt)
    walk = h_walk(inst, args.u, args.v, flt)
    out.data = {
        "from": args.u, "to": args.v, "filter": str(flt),
        "h_path": None if path is None else list(path),
        "h_walk": None if walk is None else list(walk),
    }
    out.line(f"H-path {args.u} -> {args.v} in {flt}: " + ("none" if path is None else " ".join(path)))
    out.line(f"H-walk {args.u} -> {args.v} in {flt}: " + ("none" if walk is None else " ".join(walk)))
    found = walk if args.walk else path
    return EXIT_OK if found is not None else EXIT_FAIL


def cmd_ccd(args, out: _Out) -> int:
    inst = _load(args)
    ccd = color_class_digraph(inst)
    bip = bipartition(ccd)
    out.data = {
        "pattern": {"vertices": list(ccd.vertices), "arcs": [list(a) for a in ccd.sorted_arcs()]},
    }
    if args.format == "structured":
        return EXIT_OK
    out.line("color-class digraph:")
    out.line(f"  vertices: {' '.join(ccd.vertices)}")
    out.line("  arcs: " + (" ".join(f"{a}->{b}" for a, b in ccd.sorted_arcs()) or "none"))
    if bip is None:
        out.line("  bipartite: no")
    else:
        out.line(f"  bipartite: yes, X={_fmt_set(sorted(bip[0]))} Y={_fmt_set(sorted(bip[1]))}")
    return EXIT_OK


def cmd_find(args, out: _Out) -> int:
    inst = _load(args)
    out.data = {"method": args.method}
    code = EXIT_OK
    brute = pipe = None
    if args.method in ("brute", "both"):
        if args.all:
            ks = find_h_kernel_bruteforce(inst, all_kernels=True)
            out.data["bruteforce_all"] = [list(k) for k in ks]
            brute = ks[0] if ks else None
            out.line(f"brute force: {len(ks)} H-kernel(s)")
            for k in ks:
                out.line(f"  {_fmt_set(k)}")
        else:
            brute = find_h_kernel_bruteforce(inst)
            out.line("brute force: " + ("no H-kernel" if brute is None else f"H-kernel {_fmt_set(brute)}"))
        out.data["bruteforce"] = None if brute is None else list(brute)
        if brute is None:
            code = EXIT_FAIL
    if args.method in ("pipeline", "both"):
        try:
            pipe = theorem_pipeline(inst, check=not args.no_check, transitivity=args.transitivity)
            out.data["pipeline"] = list(pipe)
            out.line(f"pipeline: H-kernel {_fmt_set(pipe)}")
        except HypothesisFailure as exc:
            out.data["pipeline"] = None
            out.data["pipeline_error"] = {"reason": str(exc), "verdicts": [v.to_dict() for v in exc.verdicts if not v]}
            out.line(f"pipeline: not applicable ({exc})")
            for v in exc.verdicts:
                if not v:
                    out.line(f"  hypothesis {v.hypothesis} witness: {_witness_text(dict(v.payload))}")
            code = EXIT_FAIL
        except PipelineError as exc:
            out.data["pipeline"] = None
            out.data["pipeline_error"] = {"reason": f"internal: {exc}"}
            out.line(f"pipeline: internal error: {exc}")
            code = EXIT_FAIL
    if args.method == "both" and brute is not None and pipe is not None:
        same = tuple(brute) == tuple(pipe)
        out.data["agree"] = True
        out.data["identical"] = same
        out.line("agreement: both sets verify as H-kernels" + ("" if not same else " (identical)"))
    return code


def cmd_verify(args, out: _Out) -> int:
    inst = _load(args)
    s = [v for v in args.set.split(",") if v] if args.set else []
    unknown = [v for v in s if v not in inst.vindex]
    if unknown:
        raise InstanceError("usage", f"unknown vertex/vertices: {', '.join(unknown)}")
    checker = {
        "kernel": is_h_kernel,
        "independent": is_h_independent,
        "absorbent": is_h_absorbent,
        "semikernel": is_h_semikernel,
        "semikernel-mod-d2": is_h_semikernel_mod_d2,
    }[args.property]
    rep = checker(inst, s)
    out.data = {"set": sorted(s), "property": args.property, "report": rep.to_dict()}
    out.line(f"{_fmt_set(sorted(s))} is {'' if rep else 'NOT '}{args.property.replace('-', ' ')} ({rep.kind})")
    if not rep:
        out.line(f"  witness: {_witness_text(dict(rep.payload))}")
    return EXIT_OK if rep else EXIT_FAIL


def _three_transitive_split(inst: Instance) -> list[tuple[str, str]]:
    p = inst.partition
    coloring = inst.digraph.coloring
    if p is not None:
        side1_colors = {c for i in p.side1 for c in p.classes[i - 1]}
    else:
        used = inst.digraph.colors_used()
        side1_colors = set(used[:1])
    return [a for a, c in coloring.items() if c in side1_colors]


def cmd_mode(args, out: _Out) -> int:
    inst = _load(args)
    try:
        if args.mode == "kernel":
            plain = cor.plain_instance(inst)
            kernel = find_h_kernel_bruteforce(plain)
        elif args.mode == "mp":
            kernel = cor.mp_kernel_via_bipartite_ccd(inst)
        elif args.mode == "pcp":
            kernel = cor.pcp_kernel_via_transitive_classes(inst)
        elif args.mode == "rainbow":
            kernel = cor.rainbow_kernel(inst)
        else:
            kernel = cor.three_transitive_kernel(
                inst.vertices, list(inst.digraph.coloring), _three_transitive_split(inst)
            )
    except cor.CorollaryPreconditionError as exc:
        out.data = {"mode": args.mode, "kernel": None, "precondition": exc.code, "witness": exc.witness}
        out.line(f"{args.mode}: precondition fails ({exc.code}): {exc}")
        out.line(f"  witness: {_witness_text(exc.witness)}")
        return EXIT_FAIL
    except (HypothesisFailure, PipelineError) as exc:
        out.data = {"mode": args.mode, "kernel": None, "error": str(exc)}
        out.line(f"{args.mode}: internal error: {exc}")
        return EXIT_FAIL
    out.data = {"mode": args.mode, "kernel": None if kernel is None else list(kernel)}
    if kernel is None:
        out.line(f"{args.mode}: no kernel")
        return EXIT_FAIL
    out.line(f"{args.mode}: kernel {_fmt_set(kernel)}")
    return EXIT_OK


def cmd_campaign(args, out: _Out) -> int:
    cfg = harness.LEMMA_CONFIGS[args.lemma].with_seed(args.seed)
    rep = harness.run_lemma_campaign(
        args.lemma, args.trials, cfg, sabotage=args.sabotage, reproducer_dir=args.reproducers
    )
    out.data = rep.to_dict()
    out.line(f"lemma {args.lemma}: {harness.LEMMAS[args.lemma].description}")
    out.line(f"trials: {rep.trials}, satisfying the hypotheses: {rep.qualifying}, violations: {rep.violations}")
    for ex in rep.examples:
        out.line(f"  trial {ex['trial']}: {_witness_text(ex['violation'])}")
    for path in rep.reproducers:
        out.line(f"  reproducer: {path}")
    return EXIT_OK if rep.violations == 0 else EXIT_FAIL


def cmd_search_tight(args, out: _Out) -> int:
    drop = None if args.drop == "none" else args.drop
    res = harness.search_tightness(drop, args.budget, seed=args.seed, jobs=args.jobs)
    label = "nothing (control)" if drop is None else f"hypothesis {drop}"
    if res is None:
        out.data = {"dropped": drop, "budget": args.budget, "seed": args.seed, "found": False}
        if drop is None:
            out.line(f"control run: no kernel-free instance passing every hypothesis in {args.budget} trials")
            return EXIT_OK
        out.line(f"dropping {label}: not found within budget ({args.budget} trials)")
        return EXIT_CAP
    cert = harness.recertify(res)
    out.data = {"found": True, "budget": args.budget, **res.to_dict(), "recertified": cert}
    out.line(f"dropping {label}: found at trial {res.trial}")
    out.line(dumps_canonical(to_raw(res.instance)).rstrip())
    out.line("verdicts: " + ", ".join(f"{h}={'pass' if ok else 'fail'}" for h, ok in cert["verdicts"].items()))
    out.line(f"no H-kernel among all {res.subsets_checked} subsets; recertified: {cert['valid']}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumps_canonical(res.to_dict()))
    if drop is None:
        return EXIT_FAIL  # a counterexample to the theorem would be a finding, not a pass
    return EXIT_OK


# --------------------------------------------------------------------------


def _common_options(top: bool) -> argparse.ArgumentParser:
    """Options accepted both before and after the subcommand.

    The subcommand copy suppresses defaults so it never overwrites a value
    given before the subcommand.
    """
    defaults = Caps()

    def d(value):
        return value if top else argparse.SUPPRESS

    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("output and limits")
    g.add_argument("--format", choices=("text", "structured"), default=d("text"),
                   help="text report (default) or canonical structured output")
    g.add_argument("--max-vertices", type=int, default=d(None),
                   help=f"cap on |V(D)| for path/cycle enumeration (default {defaults.max_vertices})")
    g.add_argument("--max-cycles", type=int, default=d(None),
                   help=f"cap on enumerated cycles (default {defaults.max_cycles})")
    g.add_argument("--max-paths", type=int, default=d(None),
                   help=f"cap on enumerated paths (default {defaults.max_paths})")
    g.add_argument("--max-subsets", type=int, default=d(None),
                   help=f"cap on |V(D)| for subset enumeration (default {defaults.max_subset_vertices})")
    g.add_argument("--jobs", type=int, default=d(1), help="worker processes for searches (results do not depend on it)")
    g.add_argument("--seed", type=int, default=d(0), help="seed for generated instances")
    g.add_argument("--emit-dot", metavar="PATH", default=d(None),
                   help="also write D, H, the color-class digraph and the semikernel digraph in dot format")
    g.add_argument("--transitivity", choices=("class", "global"), default=d("class"),
                   help="closing H-path must lie in the class subdigraph (class) or anywhere in D (global)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options(top=False)
    parser = argparse.ArgumentParser(
        prog="hkernel",
        description="Analyse H-colored digraphs: hypotheses, H-kernels, corollaries and experiments.",
        epilog="Exit codes: 0 pass/found, 1 fail/absent, 2 usage or input error, 3 cap or budget exceeded. "
               "Cap defaults can also be set with HKERNEL_MAX_VERTICES, HKERNEL_MAX_CYCLES, "
               "HKERNEL_MAX_PATHS, HKERNEL_MAX_SUBSET_VERTICES.",
        parents=[_common_options(top=True)],
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("check", parents=[common], help="validate an instance file and summarise it")
    p.add_argument("instance")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("hypotheses", parents=[common], help="check the theorem's hypotheses (T, 1-5)")
    p.add_argument("instance")
    p.add_argument("--short-circuit", action="store_true", help="stop at the first failing hypothesis")
    p.add_argument("--only", default=None, help="comma-separated subset of T,1,2,3,4,5")
    p.set_defaults(func=cmd_hypotheses)

    p = sub.add_parser("reach", parents=[common], help="H-path and H-walk from U to V")
    p.add_argument("instance")
    p.add_argument("u")
    p.add_argument("v")
    p.add_argument("--filter", default="all", help="all, d1, d2 or g<i> (class subdigraph i)")
    p.add_argument("--walk", action="store_true", help="exit status reflects the H-walk instead of the H-path")
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("ccd", parents=[common], help="color-class digraph (pattern-only instance format)")
    p.add_argument("instance")
    p.set_defaults(func=cmd_ccd)

    p = sub.add_parser("find", parents=[common], help="find an H-kernel")
    p.add_argument("instance")
    p.add_argument("--method", choices=("brute", "pipeline", "both"), default="both")
    p.add_argument("--all", action="store_true", help="brute force: list every H-kernel")
    p.add_argument("--no-check", action="store_true", help="pipeline: skip the hypothesis checks")
    p.set_defaults(func=cmd_find)

    p = sub.add_parser("verify", parents=[common], help="verify a vertex set")
    p.add_argument("instance")
    p.add_argument("--set", required=True, help="comma-separated vertices (empty string for the empty set)")
    p.add_argument("--property", default="kernel",
                   choices=("kernel", "independent", "absorbent", "semikernel", "semikernel-mod-d2"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser(
        "mode", parents=[common], help="kernels for the classical special patterns",
        description=(
            "kernel: a kernel (A(H) empty) by brute force.  "
            "mp: an mp-kernel; needs a bipartite color-class digraph.  "
            "pcp: a PCP-kernel; needs every color class to be a transitive digraph.  "
            "rainbow: a kernel by rainbow paths; needs transitive color classes and no cycle of length >= 2 "
            "in the color-class digraph.  "
            "three-transitive: a kernel of a 3-transitive digraph without directed triangles; arcs whose color "
            "lies in a side-1 class (or, without a partition, arcs of the smallest color) form H1, the rest H2, "
            "and both must be acyclic.  The pattern and partition of the file are otherwise ignored."
        ),
    )
    p.add_argument("mode", choices=("kernel", "mp", "pcp", "rainbow", "three-transitive"))
    p.add_argument("instance")
    p.set_defaults(func=cmd_mode)

    p = sub.add_parser("campaign", parents=[common], help="property campaign for one lemma")
    p.add_argument("--lemma", required=True, choices=tuple(harness.LEMMAS))
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--sabotage", action="store_true", help="skip the hypothesis filter (violations expected)")
    p.add_argument("--reproducers", metavar="DIR", default=None, help="write minimised violating instances here")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("search-tight", parents=[common], help="search for an example showing a hypothesis is needed")
    p.add_argument("--drop", required=True, choices=("1", "2", "3", "4", "5", "none"))
    p.add_argument("--budget", type=int, default=100_000, help="number of evaluated instances")
    p.add_argument("--out", default=None, help="write the certificate here")
    p.set_defaults(func=cmd_search_tight)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    caps = {}
    for flag, field in (("max_vertices", "max_vertices"), ("max_cycles", "max_cycles"),
                        ("max_paths", "max_paths"), ("max_subsets", "max_subset_vertices")):
        val = getattr(args, flag)
        if val is not None:
            if val < 1:
                print(f"error: --{flag.replace('_', '-')} must be positive", file=sys.stderr)
                return EXIT_USAGE
            caps[field] = val
    out = _Out(args.format)
    try:
        with use_caps(**caps):
            code = args.func(args, out)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InstanceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out.emit()
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
