"""Decision procedures for the hypotheses of the H-kernel existence theorem.

Hypothesis ids:

``T``
    every class subdigraph ``G_i`` is transitive by H-paths;
``1``
    every cycle inside a side ``D_i`` uses colors from a single class;
``2``
    every H-walk inside a side ``D_i`` uses colors from a single class;
``3``
    no color transition of ``D`` that crosses sides is an arc of ``H``;
``4``
    ``D`` contains no C3-subdivision;
``5``
    every P3-subdivision from ``u`` to ``x`` is matched by a ux-H-path.

Every failing verdict carries a witness that can be re-checked
independently of the procedure that produced it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .model import ALL, D1, D2, ArcFilter, CapExceeded, Instance, WitnessReport, get_caps
from .reachability import _find_path, reach_masks
from .structure import color_transitions, enumerate_cycles

__all__ = [
    "HYPOTHESIS_IDS", "HypothesisVerdict", "SubdivisionWitness",
    "check_transitivity", "check_transitivity_all", "check_hyp1_cycles", "check_hyp2_walks",
    "check_hyp3_boundary", "find_c3_subdivision", "check_hyp4_c3", "enumerate_p3_subdivisions",
    "check_hyp5_p3", "check_all", "failing", "all_pass",
]

HYPOTHESIS_IDS = ("T", "1", "2", "3", "4", "5")


@dataclass(frozen=True, kw_only=True)
class HypothesisVerdict(WitnessReport):
    hypothesis: str

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["hypothesis"] = self.hypothesis
        return d


@dataclass(frozen=True)
class SubdivisionWitness:
    """A C3- or P3-subdivision.

    ``carrier`` is the vertex sequence (closed for C3, i.e. first == last);
    ``junctions`` are the obstruction vertices; ``segments`` are ``T1, T2, T3``
    where ``T1`` lies in ``D1``, ``T3`` in ``D2`` and ``T2`` anywhere.
    """

    kind: str
    carrier: tuple[str, ...]
    junctions: tuple[str, ...]
    segments: tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]

    @property
    def endpoints(self) -> tuple[str, str]:
        return self.carrier[0], self.carrier[-1]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "carrier": list(self.carrier),
            "junctions": list(self.junctions),
            "segments": [list(s) for s in self.segments],
        }


def _verdict(hid: str, ok: bool, kind: str, **payload) -> HypothesisVerdict:
    return HypothesisVerdict(passed=ok, kind=kind, payload=payload, hypothesis=hid)


def _bits(m: int) -> Iterator[int]:
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


# --------------------------------------------------------------------------
# T: transitivity of the class subdigraphs


def check_transitivity(instance: Instance, i: int, mode: str = "class") -> HypothesisVerdict:
    """Transitivity by H-paths of ``G_i``.

    ``mode="class"`` requires the closing xz-H-path inside ``G_i``;
    ``mode="global"`` accepts one anywhere in ``D``.
    """
    if mode not in ("class", "global"):
        raise ValueError(f"unknown transitivity mode {mode!r}")
    flt = ArcFilter.cls(i)
    inner = reach_masks(instance, flt)
    target = inner if mode == "class" else reach_masks(instance, ALL)
    for x in instance.filter_vertices(flt):
        for y in _bits(inner[x]):
            for z in _bits(inner[y] & ~(1 << x) & ~target[x]):
                out, hn = instance.out_arcs(flt), instance.hnext
                return _verdict(
                    "T", False, "non-transitive-class",
                    class_index=i, triple=instance.names((x, y, z)),
                    xy_path=instance.names(_find_path(out, hn, x, y)),
                    yz_path=instance.names(_find_path(out, hn, y, z)),
                    mode=mode,
                )
    return _verdict("T", True, "transitive-class", class_index=i, mode=mode)


def check_transitivity_all(instance: Instance, mode: str = "class") -> HypothesisVerdict:
    p = instance.require_partition()
    for i in range(1, p.k + 1):
        v = check_transitivity(instance, i, mode)
        if not v:
            return v
    return _verdict("T", True, "all-classes-transitive", mode=mode)


# --------------------------------------------------------------------------
# 1: cycles inside a side stay in one class


def _plain_reach(out) -> list[int]:
    n = len(out)
    reach = [0] * n
    for s in range(n):
        seen = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for h, _ in out[v]:
                if not seen >> h & 1:
                    seen |= 1 << h
                    stack.append(h)
        reach[s] = seen
    return reach


def check_hyp1_cycles(instance: Instance) -> HypothesisVerdict:
    instance.require_partition()
    cc = instance.color_class
    for side, flt in ((1, D1), (2, D2)):
        out = instance.out_arcs(flt)
        reach = _plain_reach(out)
        # arcs on some cycle, grouped by strong component
        comp_classes: dict[int, set[int]] = {}
        for u in range(len(out)):
            for h, c in out[u]:
                if reach[h] >> u & 1:
                    comp = reach[u] & _reached_by(reach, u)
                    comp_classes.setdefault(comp, set()).add(cc[c])
        if all(len(s) == 1 for s in comp_classes.values()):
            continue
        cidx = instance.cindex
        for cyc in enumerate_cycles(instance, flt):
            closed = cyc + cyc[:1]
            classes = {cc[cidx[instance.color(a, b)]] for a, b in zip(closed, closed[1:])}
            if len(classes) > 1:
                return _verdict("1", False, "mixed-cycle", side=side, cycle=closed, classes=sorted(classes))
    return _verdict("1", True, "side-cycles-single-class")


def _reached_by(reach: list[int], u: int) -> int:
    return sum(1 << v for v in range(len(reach)) if reach[v] >> u & 1) | (1 << u)


# --------------------------------------------------------------------------
# 2: H-walks inside a side stay in one class


def check_hyp2_walks(instance: Instance) -> HypothesisVerdict:
    """Local form: a class-crossing H-walk inside a side exists iff some pair
    of consecutive arcs at a vertex crosses classes, stays in one side and
    is a transition of ``H``."""
    instance.require_partition()
    cc, cs, hn = instance.color_class, instance.color_side, instance.hnext
    outs = instance.out_arcs(ALL)
    best = None
    for u, v, ci in instance.arc_list:
        for w, cj in outs[v]:
            if cs[ci] == cs[cj] and cc[ci] != cc[cj] and hn[ci] >> cj & 1:
                cand = (u, v, w)
                if best is None or cand < best:
                    best = cand
    if best is None:
        return _verdict("2", True, "side-walks-single-class")
    u, v, w = best
    names = instance.names(best)
    cname = instance.pattern.vertices
    c1 = cname[instance.arc_list[instance.arc_id[(u, v)]][2]]
    c2 = cname[instance.arc_list[instance.arc_id[(v, w)]][2]]
    return _verdict(
        "2", False, "class-crossing-walk", walk=names, colors=(c1, c2),
        side=cs[instance.cindex[c1]],
    )


# --------------------------------------------------------------------------
# 3: cross-side transitions are not arcs of H


def check_hyp3_boundary(instance: Instance) -> HypothesisVerdict:
    instance.require_partition()
    cs, ci = instance.color_side, instance.cindex
    for (a, b), triple in sorted(color_transitions(instance).items()):
        if cs[ci[a]] != cs[ci[b]] and instance.pattern.has_arc(a, b):
            return _verdict("3", False, "cross-side-transition", color_pair=(a, b), realized_by=triple)
    return _verdict("3", True, "no-cross-side-transition")


# --------------------------------------------------------------------------
# 4: C3-subdivisions


def _cyclic_obstructions(instance: Instance, cyc: Sequence[str]) -> list[int]:
    L = len(cyc)
    ci, hn = instance.cindex, instance.hnext
    cols = [ci[instance.color(cyc[i], cyc[(i + 1) % L])] for i in range(L)]
    return [i for i in range(L) if not hn[cols[i - 1]] >> cols[i] & 1]


def _c3_from_cycle(instance: Instance, cyc: Sequence[str]) -> SubdivisionWitness | None:
    obs = _cyclic_obstructions(instance, cyc)
    if len(obs) != 3:
        return None
    L = len(cyc)
    ci, cs = instance.cindex, instance.color_side

    def side_of(i):
        return cs[ci[instance.color(cyc[i % L], cyc[(i + 1) % L])]]

    def span(a, b):  # positions a..b walking forward
        return range(a, b if b > a else b + L)

    for r in range(3):
        u0, v0, w0 = obs[r], obs[(r + 1) % 3], obs[(r + 2) % 3]
        if all(side_of(i) == 1 for i in span(u0, v0)) and all(side_of(i) == 2 for i in span(w0, u0)):
            rot = [cyc[(u0 + j) % L] for j in range(L + 1)]
            lv = (v0 - u0) % L
            lw = (w0 - u0) % L
            return SubdivisionWitness(
                "C3", tuple(rot), (rot[0], rot[lv], rot[lw]),
                (tuple(rot[: lv + 1]), tuple(rot[lv: lw + 1]), tuple(rot[lw:])),
            )
    return None


def find_c3_subdivision(instance: Instance) -> SubdivisionWitness | None:
    """First C3-subdivision in canonical cycle order, or ``None``.

    A cycle qualifies when its cyclic obstruction set has exactly three
    positions and, for one of the three rotations, the first segment lies in
    ``D1`` and the last in ``D2``.  Segments between consecutive obstructions
    are H-paths automatically.
    """
    instance.require_partition()
    for cyc in enumerate_cycles(instance):
        if len(cyc) >= 3:
            w = _c3_from_cycle(instance, cyc)
            if w is not None:
                return w
    return None


def check_hyp4_c3(instance: Instance) -> HypothesisVerdict:
    w = find_c3_subdivision(instance)
    if w is None:
        return _verdict("4", True, "no-c3-subdivision")
    return _verdict("4", False, "c3-subdivision", subdivision=w.to_dict())


# --------------------------------------------------------------------------
# 5: P3-subdivisions


def enumerate_p3_subdivisions(instance: Instance) -> Iterator[SubdivisionWitness]:
    """Every path that is a P3-subdivision, in lexicographic order.

    Depth-first search carrying a phase: 0 inside ``T1`` (arcs in ``D1``),
    1 inside ``T2`` (any arcs), 2 inside ``T3`` (arcs in ``D2``).  An
    obstruction advances the phase; a third obstruction prunes the branch.
    """
    instance.require_partition()
    caps = get_caps()
    if len(instance.vertices) > caps.max_vertices:
        raise CapExceeded("vertex count for path enumeration", caps.max_vertices, len(instance.vertices))
    out, hn, cs = instance.out_arcs(ALL), instance.hnext, instance.color_side
    names = instance.vertices
    path: list[int] = []
    junction: list[int] = [0, 0]
    count = 0

    def dfs(v: int, c: int, m: int, phase: int):
        nonlocal count
        for h, c2 in out[v]:
            if m >> h & 1:
                continue
            if c < 0:
                if cs[c2] != 1:
                    continue
                nphase = 0
            else:
                obstructed = not hn[c] >> c2 & 1
                if phase == 0:
                    if obstructed:
                        nphase = 1
                        junction[0] = len(path) - 1
                    elif cs[c2] != 1:
                        continue
                    else:
                        nphase = 0
                elif phase == 1:
                    if obstructed:
                        if cs[c2] != 2:
                            continue
                        nphase = 2
                        junction[1] = len(path) - 1
                    else:
                        nphase = 1
                else:
                    if obstructed or cs[c2] != 2:
                        continue
                    nphase = 2
            count += 1
            if count > caps.max_paths:
                raise CapExceeded("enumerated paths", caps.max_paths, count - 1)
            path.append(h)
            if nphase == 2:
                p = tuple(names[i] for i in path)
                a, b = junction
                yield SubdivisionWitness("P3", p, (p[a], p[b]), (p[: a + 1], p[a: b + 1], p[b:]))
            yield from dfs(h, c2, m | (1 << h), nphase)
            path.pop()

    for u in range(len(names)):
        path.append(u)
        yield from dfs(u, -1, 1 << u, 0)
        path.pop()


def check_hyp5_p3(instance: Instance) -> HypothesisVerdict:
    reach = reach_masks(instance, ALL)
    vi = instance.vindex
    for w in enumerate_p3_subdivisions(instance):
        u, x = w.endpoints
        if not reach[vi[u]] >> vi[x] & 1:
            return _verdict(
                "5", False, "unmatched-p3-subdivision",
                subdivision=w.to_dict(), missing_h_path=(u, x),
            )
    return _verdict("5", True, "p3-subdivisions-matched")


# --------------------------------------------------------------------------

_CHECKS = {
    "1": check_hyp1_cycles,
    "2": check_hyp2_walks,
    "3": check_hyp3_boundary,
    "4": check_hyp4_c3,
    "5": check_hyp5_p3,
}


def check_one(instance: Instance, hid: str, transitivity: str = "class") -> HypothesisVerdict:
    if hid == "T":
        return check_transitivity_all(instance, transitivity)
    try:
        return _CHECKS[hid](instance)
    except KeyError:
        raise ValueError(f"unknown hypothesis id {hid!r}") from None


def check_all(
    instance: Instance,
    short_circuit: bool = False,
    transitivity: str = "class",
    ids: Sequence[str] = HYPOTHESIS_IDS,
) -> list[HypothesisVerdict]:
    """Run the hypothesis checks in order; stop at the first failure when
    ``short_circuit`` is set."""
    instance.require_partition()
    out = []
    for hid in ids:
        v = check_one(instance, hid, transitivity)
        out.append(v)
        if short_circuit and not v:
            break
    return out


def failing(verdicts: Sequence[HypothesisVerdict]) -> list[str]:
    return [v.hypothesis for v in verdicts if not v]


def all_pass(verdicts: Sequence[HypothesisVerdict]) -> bool:
    return all(verdicts)
