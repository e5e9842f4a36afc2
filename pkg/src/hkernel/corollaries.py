"""Specialisations of the H-kernel machinery.

* plain kernels (``A(H)`` empty), mp-kernels (``H`` loops only), PCP-kernels
  (``H`` complete without loops) and kernels by rainbow paths;
* the constructions that reduce each of them to the semikernel-digraph
  pipeline: a bipartite color-class digraph, the disjoint doubling of a
  digraph with transitive chromatic classes, and the one-color-per-arc
  encoding of a 3-transitive digraph split into two acyclic parts.

Every function re-verifies its output with the definitional checkers.
"""
from __future__ import annotations

import enum
from typing import Iterable, Sequence

from .kernels import PipelineError, find_h_kernel_bruteforce, is_h_kernel, theorem_pipeline
from .model import CapExceeded, ChromaticPartition, ColoredDigraph, Instance, PatternDigraph, WitnessReport, get_caps
from .structure import bipartition, color_class_digraph, find_cycle

__all__ = [
    "PatternShape", "CorollaryPreconditionError", "classify_pattern",
    "plain_instance", "mp_instance", "pcp_instance",
    "acyclic_kernel", "mp_kernel_via_bipartite_ccd", "double_instance",
    "check_transitive_classes", "pcp_kernel_via_transitive_classes",
    "is_properly_colored_path", "is_rainbow_path", "rainbow_reach", "is_rainbow_kernel",
    "rainbow_kernel", "concat_pcp", "check_three_transitive", "three_transitive_kernel", "bruteforce_pcp_kernel",
]


class PatternShape(enum.Enum):
    EMPTY = "empty"
    LOOPS_ONLY = "loops-only"
    COMPLETE_LOOPLESS = "complete-loopless"
    ACYCLIC = "acyclic"
    GENERAL = "general"


class CorollaryPreconditionError(ValueError):
    """A specialised pipeline's precondition fails; ``witness`` shows where."""

    def __init__(self, code: str, message: str, witness: dict | None = None):
        super().__init__(message)
        self.code = code
        self.witness = witness or {}


def classify_pattern(pattern: PatternDigraph) -> PatternShape:
    """Exact classification of ``A(H)``; earlier members of the enum win ties."""
    vs, arcs = pattern.vertices, set(pattern.arcs)
    if not arcs:
        return PatternShape.EMPTY
    if arcs == {(v, v) for v in vs}:
        return PatternShape.LOOPS_ONLY
    if arcs == {(a, b) for a in vs for b in vs if a != b}:
        return PatternShape.COMPLETE_LOOPLESS
    if find_cycle(vs, arcs) is None:
        return PatternShape.ACYCLIC
    return PatternShape.GENERAL


# --------------------------------------------------------------------------
# instances for the classical notions


def _digraph(d: ColoredDigraph | Instance) -> ColoredDigraph:
    return d.digraph if isinstance(d, Instance) else d


def plain_instance(d: ColoredDigraph | Instance) -> Instance:
    """``D`` under ``A(H) = ∅``: H-paths are single arcs."""
    d = _digraph(d)
    return Instance(PatternDigraph.build(d.colors_used(), []), d)


def mp_instance(d: ColoredDigraph | Instance) -> Instance:
    """``D`` under a loops-only pattern: H-paths are monochromatic paths."""
    d = _digraph(d)
    cs = d.colors_used()
    return Instance(PatternDigraph.build(cs, [(c, c) for c in cs]), d)


def pcp_instance(d: ColoredDigraph | Instance) -> Instance:
    """``D`` under the complete loopless pattern: H-paths are properly colored paths."""
    d = _digraph(d)
    cs = d.colors_used()
    return Instance(PatternDigraph.build(cs, [(a, b) for a in cs for b in cs if a != b]), d)


def _split_isolated(d: ColoredDigraph) -> tuple[ColoredDigraph, tuple[str, ...]]:
    touched = {v for arc in d.coloring for v in arc}
    iso = tuple(v for v in d.vertices if v not in touched)
    if not iso:
        return d, ()
    return ColoredDigraph(tuple(v for v in d.vertices if v in touched), dict(d.coloring)), iso


def _verified(inst: Instance, kernel: Iterable[str], what: str) -> tuple[str, ...]:
    kernel = tuple(sorted(kernel))
    rep = is_h_kernel(inst, kernel)
    if not rep:
        raise PipelineError(f"{what}: {kernel} failed re-verification ({rep.kind}: {dict(rep.payload)})")
    return kernel


# --------------------------------------------------------------------------
# acyclic digraphs


def acyclic_kernel(d: ColoredDigraph | Instance) -> tuple[str, ...]:
    """The kernel of an acyclic digraph, peeling sinks and their in-neighbours."""
    d = _digraph(d)
    cyc = find_cycle(d.vertices, d.arcs, min_length=2)
    if cyc is not None:
        raise CorollaryPreconditionError("not-acyclic", "digraph has a cycle", {"cycle": list(cyc)})
    succ = {v: set() for v in d.vertices}
    pred = {v: set() for v in d.vertices}
    for a, b in d.arcs:
        succ[a].add(b)
        pred[b].add(a)
    alive = set(d.vertices)
    kernel = []
    while alive:
        sinks = [v for v in sorted(alive) if not succ[v] & alive]
        kernel.extend(sinks)
        alive -= set(sinks)
        alive -= {p for s in sinks for p in pred[s]}
    return _verified(plain_instance(d), kernel, "acyclic kernel")


# --------------------------------------------------------------------------
# mp-kernels


def mp_kernel_via_bipartite_ccd(d: ColoredDigraph | Instance) -> tuple[str, ...]:
    """An mp-kernel of ``D`` when its color-class digraph is bipartite.

    The chromatic partition is the set of singleton colors, with the sides
    given by a bipartition ``{X, Y}`` of the color-class digraph.
    """
    full = _digraph(d)
    core, iso = _split_isolated(full)
    if not core.coloring:
        return _verified(mp_instance(full), full.vertices, "mp-kernel")
    ccd = color_class_digraph(mp_instance(core))
    bip = bipartition(ccd)
    if bip is None:
        loop = find_cycle(ccd.vertices, ccd.arcs)
        raise CorollaryPreconditionError(
            "not-bipartite", "color-class digraph is not bipartite",
            {"odd_or_loop_cycle": list(_odd_cycle(ccd) or loop or ())},
        )
    x, y = bip
    colors = ccd.vertices
    if len(colors) == 1:
        # one color, no monochromatic 2-walk: D is acyclic and its arcs are its only H-paths
        kernel = acyclic_kernel(core)
    else:
        if not y:
            # every component is a single color without transitions; move the last one over
            last = max(x)
            x, y = x - {last}, frozenset({last})
        inst = mp_instance(core)
        order = list(colors)
        part = ChromaticPartition.build(
            [[c] for c in order],
            [i + 1 for i, c in enumerate(order) if c in x],
            [i + 1 for i, c in enumerate(order) if c in y],
        )
        kernel = theorem_pipeline(inst.with_partition(part))
    return _verified(mp_instance(full), tuple(kernel) + iso, "mp-kernel")


def _odd_cycle(ccd: PatternDigraph) -> list[str] | None:
    """An odd cycle of the underlying undirected graph (loops count), for witnesses."""
    adj = {v: set() for v in ccd.vertices}
    for a, b in ccd.arcs:
        if a == b:
            return [a]
        adj[a].add(b)
        adj[b].add(a)
    parent: dict[str, str | None] = {}
    depth: dict[str, int] = {}
    for root in ccd.vertices:
        if root in depth:
            continue
        depth[root], parent[root] = 0, None
        stack = [root]
        while stack:
            v = stack.pop()
            for w in sorted(adj[v]):
                if w not in depth:
                    depth[w], parent[w] = depth[v] + 1, v
                    stack.append(w)
                elif depth[w] % 2 == depth[v] % 2:
                    # climb both to their common ancestor
                    pa, pb = [v], [w]
                    while pa[-1] != pb[-1]:
                        if depth[pa[-1]] >= depth[pb[-1]]:
                            pa.append(parent[pa[-1]])
                        else:
                            pb.append(parent[pb[-1]])
                    return pa + pb[-2::-1]
    return None


# --------------------------------------------------------------------------
# PCP-kernels


def check_transitive_classes(d: ColoredDigraph | Instance) -> WitnessReport:
    """Each chromatic class (arcs of one color) is a transitive digraph."""
    d = _digraph(d)
    by_tail: dict[str, list[tuple[str, str]]] = {}
    for (a, b), c in d.coloring.items():
        by_tail.setdefault(a, []).append((b, c))
    for (u, v), c in sorted(d.coloring.items()):
        for w, c2 in sorted(by_tail.get(v, [])):
            if c2 == c and w != u and d.coloring.get((u, w)) != c:
                return WitnessReport(False, "non-transitive-class", {"color": c, "arcs": [[u, v], [v, w]], "missing": [u, w]})
    return WitnessReport(True, "transitive-classes")


def _fresh(names: Iterable[str], taken: set[str]) -> dict[str, str]:
    names = list(names)
    suffix = "*"
    while any(n + suffix in taken for n in names):
        suffix += "*"
    return {n: n + suffix for n in names}


def double_instance(d: ColoredDigraph | Instance, check: bool = True) -> Instance:
    """``D′ = D ∪ D*`` under ``H′ = H ∪ H*`` (``H`` complete loopless on the used
    colors), with classes ``{V(H), V(H*)}`` on opposite sides."""
    d = _digraph(d)
    if check:
        rep = check_transitive_classes(d)
        if not rep:
            raise CorollaryPreconditionError("non-transitive-class", "a chromatic class is not transitive", dict(rep.payload))
    if not d.coloring:
        raise CorollaryPreconditionError("no-arcs", "doubling needs at least one arc")
    cs = d.colors_used()
    f = _fresh(d.vertices, set(d.vertices))
    g = _fresh(cs, set(cs))
    cs2 = [g[c] for c in cs]
    h_arcs = [(a, b) for a in cs for b in cs if a != b] + [(a, b) for a in cs2 for b in cs2 if a != b]
    arcs = [(a, b, c) for (a, b), c in d.coloring.items()]
    arcs += [(f[a], f[b], g[c]) for (a, b), c in d.coloring.items()]
    pattern = PatternDigraph.build(list(cs) + cs2, h_arcs)
    digraph = ColoredDigraph.build(list(d.vertices) + [f[v] for v in d.vertices], arcs)
    part = ChromaticPartition.build([cs, cs2], [1], [2])
    return Instance(pattern, digraph, part)


def pcp_kernel_via_transitive_classes(d: ColoredDigraph | Instance) -> tuple[str, ...]:
    """A PCP-kernel of ``D`` when every chromatic class is transitive."""
    full = _digraph(d)
    rep = check_transitive_classes(full)
    if not rep:
        raise CorollaryPreconditionError("non-transitive-class", "a chromatic class is not transitive", dict(rep.payload))
    core, iso = _split_isolated(full)
    if not core.coloring:
        return _verified(pcp_instance(full), full.vertices, "PCP-kernel")
    doubled = double_instance(core, check=False)
    k2 = theorem_pipeline(doubled)
    keep = set(core.vertices)
    return _verified(pcp_instance(full), tuple(v for v in k2 if v in keep) + iso, "PCP-kernel")


# --------------------------------------------------------------------------
# rainbow paths


def _colors_along(d: ColoredDigraph, path: Sequence[str]) -> list[str]:
    try:
        return [d.coloring[(a, b)] for a, b in zip(path, path[1:])]
    except KeyError as exc:
        raise ValueError(f"{exc.args[0]} is not an arc") from None


def is_properly_colored_path(d: ColoredDigraph | Instance, path: Sequence[str]) -> bool:
    d = _digraph(d)
    cs = _colors_along(d, path)
    return len(path) >= 2 and len(set(path)) == len(path) and all(a != b for a, b in zip(cs, cs[1:]))


def is_rainbow_path(d: ColoredDigraph | Instance, path: Sequence[str]) -> bool:
    d = _digraph(d)
    cs = _colors_along(d, path)
    return len(path) >= 2 and len(set(path)) == len(path) and len(set(cs)) == len(cs)


def rainbow_reach(d: ColoredDigraph | Instance) -> dict[str, frozenset[str]]:
    """For each vertex, the vertices it reaches by a rainbow path."""
    d = _digraph(d)
    caps = get_caps()
    if len(d.vertices) > caps.max_vertices:
        raise CapExceeded("vertex count for rainbow search", caps.max_vertices, len(d.vertices))
    out: dict[str, list[tuple[str, str]]] = {v: [] for v in d.vertices}
    for (a, b), c in d.coloring.items():
        out[a].append((b, c))
    result = {}
    for s in d.vertices:
        reached: set[str] = set()
        seen = set()
        stack = [(s, frozenset(), frozenset([s]))]
        while stack:
            v, used, visited = stack.pop()
            for w, c in out[v]:
                if w in visited or c in used:
                    continue
                st = (w, used | {c}, visited | {w})
                if st not in seen:
                    seen.add(st)
                    reached.add(w)
                    stack.append(st)
        result[s] = frozenset(reached)
    return result


def is_rainbow_kernel(d: ColoredDigraph | Instance, vertex_set: Iterable[str]) -> WitnessReport:
    """Independent and absorbent with respect to rainbow paths."""
    d = _digraph(d)
    s = set(vertex_set)
    reach = rainbow_reach(d)
    for u in sorted(s):
        hit = sorted((reach[u] & s) - {u})
        if hit:
            return WitnessReport(False, "not-independent", {"pair": [u, hit[0]]})
    for z in d.vertices:
        if z not in s and not reach[z] & s:
            return WitnessReport(False, "not-absorbent", {"vertex": z})
    return WitnessReport(True, "rainbow-kernel", {"set": sorted(s)})


def rainbow_kernel(d: ColoredDigraph | Instance) -> tuple[str, ...]:
    """A kernel by rainbow paths, for transitive classes and a color-class
    digraph without cycles of length at least two."""
    full = _digraph(d)
    ccd = color_class_digraph(pcp_instance(full))
    cyc = find_cycle(ccd.vertices, ccd.arcs, min_length=2)
    if cyc is not None:
        raise CorollaryPreconditionError("ccd-cycle", "color-class digraph has a cycle of length >= 2", {"cycle": list(cyc)})
    kernel = pcp_kernel_via_transitive_classes(full)
    rep = is_rainbow_kernel(full, kernel)
    if not rep:
        raise PipelineError(f"rainbow kernel: {kernel} failed re-verification ({rep.kind}: {dict(rep.payload)})")
    return kernel


def concat_pcp(d: ColoredDigraph | Instance, p1: Sequence[str], p2: Sequence[str]) -> tuple[str, ...]:
    """Join a uv- and a vw-properly colored path into a uw-properly colored path.

    Cut ``p1`` at its first vertex lying on ``p2`` and continue along ``p2``;
    when the two arcs meeting there share a color, the transitivity of that
    color class supplies a shortcut arc skipping the meeting vertex.
    """
    d = _digraph(d)
    p1, p2 = tuple(p1), tuple(p2)
    if not (is_properly_colored_path(d, p1) and is_properly_colored_path(d, p2)):
        raise CorollaryPreconditionError("not-pcp", "inputs must be properly colored paths")
    u, v, w = p1[0], p1[-1], p2[-1]
    if p2[0] != v or len({u, v, w}) != 3:
        raise CorollaryPreconditionError("bad-endpoints", "need a uv-path and a vw-path with u, v, w distinct")
    rep = check_transitive_classes(d)
    if not rep:
        raise CorollaryPreconditionError("non-transitive-class", "a chromatic class is not transitive", dict(rep.payload))
    pos2 = {x: j for j, x in enumerate(p2)}
    i0 = next(i for i, x in enumerate(p1) if x in pos2)
    j = pos2[p1[i0]]
    if i0 == 0:
        out = p2[j:]
    elif j == len(p2) - 1:
        out = p1[: i0 + 1]
    else:
        before, after = d.coloring[(p1[i0 - 1], p1[i0])], d.coloring[(p2[j], p2[j + 1])]
        if before != after:
            out = p1[: i0 + 1] + p2[j + 1:]
        else:
            out = p1[:i0] + p2[j + 1:]
    if not is_properly_colored_path(d, out) or out[0] != u or out[-1] != w:
        raise PipelineError(f"concatenation produced an invalid path {out}")
    return out


# --------------------------------------------------------------------------
# 3-transitive digraphs


def check_three_transitive(vertices: Sequence[str], arcs: Iterable[tuple[str, str]]) -> WitnessReport:
    """Every path ``(a, b, c, e)`` of length 3 has the arc ``(a, e)``; no directed triangle."""
    arcs = set(arcs)
    succ: dict[str, list[str]] = {v: [] for v in vertices}
    for a, b in arcs:
        succ[a].append(b)
    for a in vertices:
        for b in sorted(succ[a]):
            for c in sorted(succ[b]):
                if c == a:
                    continue
                if (c, a) in arcs:
                    return WitnessReport(False, "directed-triangle", {"cycle": [a, b, c]})
                for e in sorted(succ[c]):
                    if e not in (a, b) and (a, e) not in arcs:
                        return WitnessReport(False, "not-3-transitive", {"path": [a, b, c, e]})
    return WitnessReport(True, "3-transitive")


def three_transitive_kernel(
    vertices: Sequence[str], arcs: Iterable[tuple[str, str]], h1_arcs: Iterable[tuple[str, str]]
) -> tuple[str, ...]:
    """A kernel of a 3-transitive digraph without directed triangles whose arcs
    split into two acyclic spanning parts ``H1`` (given) and ``H2`` (the rest)."""
    arcs = sorted(set(map(tuple, arcs)))
    h1 = set(map(tuple, h1_arcs))
    if not h1 <= set(arcs):
        raise CorollaryPreconditionError("bad-split", "H1 must be a set of arcs of D", {"extra": sorted(h1 - set(arcs))})
    h2 = [a for a in arcs if a not in h1]
    rep = check_three_transitive(vertices, arcs)
    if not rep:
        raise CorollaryPreconditionError(rep.kind, "D is not 3-transitive without triangles", dict(rep.payload))
    for name, part in (("H1", sorted(h1)), ("H2", h2)):
        cyc = find_cycle(vertices, part, min_length=2)
        if cyc is not None:
            raise CorollaryPreconditionError("side-not-acyclic", f"{name} has a cycle", {"part": name, "cycle": list(cyc)})
    width = len(str(len(arcs)))
    colors = {a: f"e{i:0{width}d}" for i, a in enumerate(arcs, 1)}
    full = ColoredDigraph.build(vertices, [(a, b, colors[(a, b)]) for a, b in arcs])
    if not h1 or not h2:
        return acyclic_kernel(full)
    core, iso = _split_isolated(full)
    inst = plain_instance(core)
    order = inst.pattern.vertices
    side1 = {colors[a] for a in h1}
    part = ChromaticPartition.build(
        [[c] for c in order],
        [i + 1 for i, c in enumerate(order) if c in side1],
        [i + 1 for i, c in enumerate(order) if c not in side1],
    )
    kernel = theorem_pipeline(inst.with_partition(part))
    return _verified(plain_instance(full), tuple(kernel) + iso, "kernel")


def bruteforce_pcp_kernel(d: ColoredDigraph | Instance):
    return find_h_kernel_bruteforce(pcp_instance(d))
