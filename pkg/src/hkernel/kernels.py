"""H-kernels, H-semikernels and the semikernel-digraph construction.

Vertex sets are handled internally as bitmasks over the canonical vertex
order and exposed as sorted tuples of vertex names.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .hypotheses import all_pass, check_all, check_transitivity, check_transitivity_all, failing
from .model import ALL, D1, D2, ArcFilter, CapExceeded, Instance, InstanceError, WitnessReport, get_caps
from .reachability import _find_path, reach_masks, reached_by_masks
from .structure import enumerate_cycles

__all__ = [
    "HypothesisFailure", "PipelineError", "SemikernelDigraph",
    "is_h_independent", "is_h_absorbent", "is_h_kernel", "find_h_kernel_bruteforce",
    "is_h_semikernel", "is_h_semikernel_mod_d2", "find_singleton_semikernel",
    "semikernels_mod_d2", "build_semikernel_digraph", "theorem_pipeline",
]


class HypothesisFailure(ValueError):
    def __init__(self, message: str, verdicts=()):
        super().__init__(message)
        self.verdicts = list(verdicts)


class PipelineError(RuntimeError):
    """Internal failure of the constructive pipeline (should never happen when
    the hypotheses hold)."""


def _bits(m: int) -> Iterator[int]:
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def _mask(instance: Instance, s: Iterable[str]) -> int:
    return instance.mask_of(s)


def _path(instance: Instance, a: int, b: int, flt: ArcFilter = ALL) -> tuple[str, ...]:
    return instance.names(_find_path(instance.out_arcs(flt), instance.hnext, a, b))


# --------------------------------------------------------------------------
# independence / absorbency


def _independence_violation(instance: Instance, m: int, flt: ArcFilter = ALL) -> tuple[int, int] | None:
    reach = reach_masks(instance, flt)
    for u in _bits(m):
        hit = reach[u] & m & ~(1 << u)
        if hit:
            return u, (hit & -hit).bit_length() - 1
    return None


def is_h_independent(instance: Instance, vertex_set: Iterable[str]) -> WitnessReport:
    """No H-path in ``D`` joins two distinct members."""
    m = _mask(instance, vertex_set)
    bad = _independence_violation(instance, m)
    if bad is None:
        return WitnessReport(True, "h-independent")
    u, v = bad
    return WitnessReport(False, "h-path-inside-set", {"pair": instance.names(bad), "path": _path(instance, u, v)})


def is_h_absorbent(instance: Instance, vertex_set: Iterable[str]) -> WitnessReport:
    """Every vertex outside the set has an H-path into it."""
    m = _mask(instance, vertex_set)
    reach = reach_masks(instance, ALL)
    for z in range(len(instance.vertices)):
        if not m >> z & 1 and not reach[z] & m:
            return WitnessReport(False, "unabsorbed-vertex", {"vertex": instance.vertices[z]})
    return WitnessReport(True, "h-absorbent")


def is_h_kernel(instance: Instance, vertex_set: Iterable[str]) -> WitnessReport:
    s = list(vertex_set)
    ind = is_h_independent(instance, s)
    if not ind:
        return WitnessReport(False, "not-independent", dict(ind.payload))
    ab = is_h_absorbent(instance, s)
    if not ab:
        return WitnessReport(False, "not-absorbent", dict(ab.payload))
    return WitnessReport(True, "h-kernel", {"set": instance.names(sorted(instance.vindex[v] for v in s))})


def _is_kernel_mask(m: int, reach: tuple[int, ...], full: int) -> bool:
    absorbed = m
    for z in range(len(reach)):
        if reach[z] & m:
            absorbed |= 1 << z
    return absorbed == full


# --------------------------------------------------------------------------
# subset enumeration


def _check_subset_cap(instance: Instance) -> None:
    caps = get_caps()
    n = len(instance.vertices)
    if n > caps.max_subset_vertices:
        raise CapExceeded("vertex count for subset enumeration", caps.max_subset_vertices, n)


def _independent_sets(conflict: tuple[int, ...], allowed: int | None = None) -> Iterator[int]:
    """All independent sets (including the empty one) of the symmetric
    conflict relation, each exactly once."""
    n = len(conflict)
    allowed = (1 << n) - 1 if allowed is None else allowed

    def rec(start: int, m: int, blocked: int):
        yield m
        for v in range(start, n):
            if allowed >> v & 1 and not blocked >> v & 1:
                yield from rec(v + 1, m | (1 << v), blocked | conflict[v])

    yield from rec(0, 0, 0)


def _conflicts(instance: Instance) -> tuple[int, ...]:
    fwd = reach_masks(instance, ALL)
    back = reached_by_masks(instance, ALL)
    return tuple(f | b | (1 << i) for i, (f, b) in enumerate(zip(fwd, back)))


def _canonical_key(m: int) -> tuple[int, tuple[int, ...]]:
    return bin(m).count("1"), tuple(_bits(m))


def find_h_kernel_bruteforce(instance: Instance, all_kernels: bool = False):
    """The first H-kernel in (size, lexicographic) order, or ``None``.

    With ``all_kernels=True`` returns the sorted list of every H-kernel.
    H-independent sets are generated directly (an H-kernel is one), which is
    equivalent to scanning all subsets but skips the dependent ones.
    """
    _check_subset_cap(instance)
    reach = reach_masks(instance, ALL)
    full = (1 << len(instance.vertices)) - 1
    found = [m for m in _independent_sets(_conflicts(instance)) if _is_kernel_mask(m, reach, full)]
    found.sort(key=_canonical_key)
    if all_kernels:
        return [instance.names_of_mask(m) for m in found]
    return instance.names_of_mask(found[0]) if found else None


# --------------------------------------------------------------------------
# semikernels


def is_h_semikernel(instance: Instance, vertex_set: Iterable[str], flt: ArcFilter = ALL) -> WitnessReport:
    """H-semikernel of the subdigraph selected by ``flt`` (``D`` by default).

    Independent there, and every vertex reached from the set by an H-path
    has an H-path back to the set.
    """
    m = _mask(instance, vertex_set)
    verts = 0
    for v in instance.filter_vertices(flt):
        verts |= 1 << v
    if m & ~verts:
        return WitnessReport(False, "outside-subdigraph", {"vertices": instance.names_of_mask(m & ~verts)})
    bad = _independence_violation(instance, m, flt)
    if bad is not None:
        return WitnessReport(False, "not-independent", {"pair": instance.names(bad), "path": _path(instance, *bad, flt)})
    reach = reach_masks(instance, flt)
    for z in _bits(verts & ~m):
        if not reach[z] & m:
            src = next((s for s in _bits(m) if reach[s] >> z & 1), None)
            if src is not None:
                return WitnessReport(
                    False, "no-return-path",
                    {"vertex": instance.vertices[z], "from": instance.vertices[src], "path": _path(instance, src, z, flt)},
                )
    return WitnessReport(True, "h-semikernel", {"filter": str(flt)})


def _mod_d2_violation(m: int, r_all, r_d1) -> tuple[str, int, int] | None:
    for u in _bits(m):
        hit = r_all[u] & m & ~(1 << u)
        if hit:
            return "dep", u, (hit & -hit).bit_length() - 1
    reached = 0
    for s in _bits(m):
        reached |= r_d1[s]
    for z in _bits(reached & ~m):
        if not r_all[z] & m:
            return "ret", z, 0
    return None


def is_h_semikernel_mod_d2(instance: Instance, vertex_set: Iterable[str]) -> WitnessReport:
    """H-independent in ``D``; each vertex reached from the set by an H-path
    inside ``D1`` has an H-path back to the set in ``D``."""
    instance.require_partition()
    m = _mask(instance, vertex_set)
    r_all, r_d1 = reach_masks(instance, ALL), reach_masks(instance, D1)
    bad = _mod_d2_violation(m, r_all, r_d1)
    if bad is None:
        return WitnessReport(True, "h-semikernel-mod-d2")
    if bad[0] == "dep":
        return WitnessReport(False, "not-independent", {"pair": instance.names(bad[1:]), "path": _path(instance, bad[1], bad[2])})
    z = bad[1]
    src = next(s for s in _bits(m) if r_d1[s] >> z & 1)
    return WitnessReport(
        False, "no-return-path",
        {"vertex": instance.vertices[z], "from": instance.vertices[src], "d1_path": _path(instance, src, z, D1)},
    )


def _escape_chain(reach: tuple[int, ...], back_reach: tuple[int, ...], verts: Iterable[int], limit: int) -> int:
    """Follow 'forward without return' successors until none is left."""
    verts = list(verts)
    if not verts:
        raise ValueError("empty vertex scope")
    x = verts[0]
    for _ in range(limit + 1):
        nxt = next((y for y in _bits(reach[x]) if not back_reach[y] >> x & 1), None)
        if nxt is None:
            return x
        x = nxt
    raise PipelineError("escape chain did not terminate; the scope's hypotheses cannot hold")


def find_singleton_semikernel(instance: Instance, scope: str = "mod-d2", class_index: int | None = None) -> str:
    """A vertex ``x`` such that ``{x}`` is an H-semikernel for the scope.

    ``scope`` is ``"class"`` (of ``G_i``, needs ``class_index``), ``"D"`` or
    ``"mod-d2"``.  The hypotheses each scope relies on are checked first.
    Starting from the smallest vertex, the search repeatedly moves to a vertex
    reachable by an H-path with no H-path back; under the hypotheses this
    chain cannot revisit a vertex, so it stops at a valid singleton.
    """
    n = len(instance.vertices)
    if scope == "class":
        if class_index is None:
            raise ValueError("scope 'class' needs class_index")
        t = check_transitivity(instance, class_index)
        if not t:
            raise HypothesisFailure("class subdigraph is not transitive by H-paths", [t])
        flt = ArcFilter.cls(class_index)
        r = reach_masks(instance, flt)
        return instance.vertices[_escape_chain(r, r, instance.filter_vertices(flt), n)]
    if scope == "D":
        _require_global_uniformity(instance)
        r = reach_masks(instance, ALL)
        return instance.vertices[_escape_chain(r, r, range(n), n)]
    if scope == "mod-d2":
        vs = check_all(instance, ids=("T", "1", "2"))
        if not all_pass(vs):
            raise HypothesisFailure(f"hypotheses {', '.join(failing(vs))} fail", vs)
        r = reach_masks(instance, D1)
        return instance.vertices[_escape_chain(r, reach_masks(instance, ALL), range(n), n)]
    raise ValueError(f"unknown scope {scope!r}")


def _require_global_uniformity(instance: Instance) -> None:
    """Classes transitive, and every cycle and every H-walk of ``D`` inside one class."""
    instance.require_partition()
    t = check_transitivity_all(instance)
    if not t:
        raise HypothesisFailure("class subdigraphs are not transitive by H-paths", [t])
    cc, hn = instance.color_class, instance.hnext
    outs = instance.out_arcs(ALL)
    for _, v, ci in instance.arc_list:
        for _, cj in outs[v]:
            if cc[ci] != cc[cj] and hn[ci] >> cj & 1:
                raise HypothesisFailure("an H-walk of D mixes classes")
    for cyc in enumerate_cycles(instance):
        closed = cyc + cyc[:1]
        if len({cc[instance.cindex[instance.digraph.color(a, b)]] for a, b in zip(closed, closed[1:])}) > 1:
            raise HypothesisFailure("a cycle of D mixes classes")


# --------------------------------------------------------------------------
# the semikernel digraph


@dataclass(frozen=True)
class SemikernelDigraph:
    """Nonempty H-semikernels modulo ``D2`` and the forwarding arcs between them.

    ``nodes`` are sorted by (size, lexicographic); ``adjacency[i, j]`` is the
    arc from node ``i`` to node ``j``.
    """

    vertex_names: tuple[str, ...]
    masks: tuple[int, ...]
    adjacency: np.ndarray

    @property
    def nodes(self) -> list[tuple[str, ...]]:
        return [tuple(self.vertex_names[i] for i in _bits(m)) for m in self.masks]

    @property
    def arcs(self) -> list[tuple[int, int]]:
        return [tuple(map(int, ij)) for ij in np.argwhere(self.adjacency)]

    def __len__(self) -> int:
        return len(self.masks)

    def sinks(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(~self.adjacency.any(axis=1))]

    def find_cycle(self) -> list[int] | None:
        """A directed cycle of node indices, or ``None`` when acyclic."""
        adj = self.adjacency
        alive = np.ones(len(self.masks), dtype=bool)
        outdeg = adj.sum(axis=1)
        stack = list(np.flatnonzero(outdeg == 0))
        while stack:
            v = stack.pop()
            alive[v] = False
            preds = np.flatnonzero(adj[:, v] & alive)
            outdeg[preds] -= 1
            stack.extend(int(p) for p in preds if outdeg[p] == 0)
        if not alive.any():
            return None
        # every remaining node keeps an out-arc inside the remainder: walk until repeat
        v = int(np.flatnonzero(alive)[0])
        seen: dict[int, int] = {}
        walk = []
        while v not in seen:
            seen[v] = len(walk)
            walk.append(v)
            v = int(np.flatnonzero(adj[v] & alive)[0])
        return walk[seen[v]:]

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None


def semikernels_mod_d2(instance: Instance) -> list[int]:
    """Bitmasks of all nonempty H-semikernels modulo ``D2``, canonical order."""
    _check_subset_cap(instance)
    instance.require_partition()
    r_all, r_d1 = reach_masks(instance, ALL), reach_masks(instance, D1)
    out = [
        m for m in _independent_sets(_conflicts(instance))
        if m and _mod_d2_violation(m, r_all, r_d1) is None
    ]
    out.sort(key=_canonical_key)
    return out


def build_semikernel_digraph(instance: Instance) -> SemikernelDigraph:
    """``(S1, S2)`` is an arc when ``S1 != S2`` and every ``s1`` in ``S1`` is
    either in ``S2`` or has an H-path inside ``D2`` to some ``s2`` in ``S2``
    with no H-path in ``D`` back from ``s2`` to ``s1``."""
    masks = semikernels_mod_d2(instance)
    n = len(instance.vertices)
    r_all, r_d2 = reach_masks(instance, ALL), reach_masks(instance, D2)
    # fwd[s]: vertices that may stand in for s inside S2
    fwd = []
    for s in range(n):
        f = 1 << s
        for t in _bits(r_d2[s]):
            if not r_all[t] >> s & 1:
                f |= 1 << t
        fwd.append(f)
    arr = np.array(masks, dtype=np.int64)
    N = len(masks)
    adj = np.ones((N, N), dtype=bool)
    for s in range(n):
        member = (arr >> s) & 1 == 1
        if not member.any():
            continue
        hit = (arr & fwd[s]) != 0
        adj[member] &= hit
    np.fill_diagonal(adj, False)
    return SemikernelDigraph(instance.vertices, tuple(masks), adj)


def theorem_pipeline(instance: Instance, check: bool = True, transitivity: str = "class") -> tuple[str, ...]:
    """Construct an H-kernel as a sink of the semikernel digraph.

    The hypotheses are verified first unless ``check=False``; the returned
    set is always re-verified as an H-kernel.
    """
    instance.require_partition()
    if instance.isolated_vertices:
        raise InstanceError(
            "isolated-vertex",
            f"the pipeline needs a digraph without isolated vertices: {', '.join(instance.isolated_vertices)}",
        )
    if check:
        vs = check_all(instance, transitivity=transitivity)
        if not all_pass(vs):
            raise HypothesisFailure(f"hypotheses {', '.join(failing(vs))} fail", vs)
    dsk = build_semikernel_digraph(instance)
    if len(dsk) == 0:
        raise PipelineError("no nonempty H-semikernel modulo D2")
    sinks = dsk.sinks()
    if not sinks:
        raise PipelineError("semikernel digraph has no sink")
    result = instance.names_of_mask(dsk.masks[sinks[0]])
    rep = is_h_kernel(instance, result)
    if not rep:
        raise PipelineError(f"sink {result} is not an H-kernel: {rep.kind} {dict(rep.payload)}")
    return result
