"""Global structure of an H-colored digraph: color-class digraph and cycles."""
from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Iterator, Sequence

from .model import ALL, ArcFilter, CapExceeded, ColorClassDigraph, Instance, PatternDigraph, get_caps

__all__ = [
    "color_class_digraph", "color_transitions", "simple_cycles", "enumerate_cycles",
    "extract_cycle", "bipartition", "is_bipartite", "find_cycle",
]


def color_transitions(instance: Instance) -> dict[tuple[str, str], tuple[str, str, str]]:
    """Map each color pair ``(i, j)`` realised by consecutive arcs to the
    first realising vertex triple ``(u, v, w)`` in canonical order."""
    vs, cs = instance.vertices, instance.pattern.vertices
    by_head: list[list[tuple[int, int]]] = [[] for _ in vs]
    for t, h, c in instance.arc_list:
        by_head[h].append((t, c))
    out: dict[tuple[str, str], tuple[str, str, str]] = {}
    triples = []
    outs = instance.out_arcs(ALL)
    for v in range(len(vs)):
        for u, ci in by_head[v]:
            for w, cj in outs[v]:
                triples.append((u, v, w, ci, cj))
    triples.sort()
    for u, v, w, ci, cj in triples:
        key = (cs[ci], cs[cj])
        if key not in out:
            out[key] = (vs[u], vs[v], vs[w])
    return out


def color_class_digraph(instance: Instance) -> ColorClassDigraph:
    """Colors used by the arcs of ``D``, with ``(i, j)`` whenever an arc of color
    ``i`` is immediately followed by an arc of color ``j`` (loops possible)."""
    used = instance.digraph.colors_used()
    return PatternDigraph(tuple(used), frozenset(color_transitions(instance)))


def simple_cycles(
    vertices: Sequence[Hashable], arcs: Iterable[tuple[Hashable, Hashable]], cap: int | None = None
) -> Iterator[tuple]:
    """Every simple directed cycle of length >= 2, each exactly once.

    Cycles are rotated to start at their smallest vertex (in the order of
    ``vertices``) and yielded in lexicographic order.  Loops are ignored.
    """
    cap = get_caps().max_cycles if cap is None else cap
    order = {v: i for i, v in enumerate(vertices)}
    n = len(vertices)
    succ: list[list[int]] = [[] for _ in range(n)]
    for a, b in arcs:
        if a != b:
            succ[order[a]].append(order[b])
    for s in succ:
        s.sort()
    count = 0
    for start in range(n):
        # vertices that can reach `start` using only vertices >= start
        back = _reaches_within(succ, start)
        path = [start]
        on_path = 1 << start
        stack = [iter(succ[start])]
        while stack:
            for w in stack[-1]:
                if w == start:
                    count += 1
                    if count > cap:
                        raise CapExceeded("enumerated cycles", cap, count - 1)
                    yield tuple(vertices[i] for i in path)
                elif w > start and not on_path >> w & 1 and back >> w & 1:
                    path.append(w)
                    on_path |= 1 << w
                    stack.append(iter(succ[w]))
                    break
            else:
                stack.pop()
                on_path &= ~(1 << path.pop())


def _reaches_within(succ: list[list[int]], start: int) -> int:
    n = len(succ)
    pred: list[list[int]] = [[] for _ in range(n)]
    for a in range(start, n):
        for b in succ[a]:
            if b >= start:
                pred[b].append(a)
    seen = 1 << start
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for p in pred[v]:
            if not seen >> p & 1:
                seen |= 1 << p
                queue.append(p)
    return seen


def enumerate_cycles(instance: Instance, flt: ArcFilter = ALL, cap: int | None = None) -> Iterator[tuple[str, ...]]:
    """Simple cycles of the filtered view of ``D`` (canonical rotation and order)."""
    caps = get_caps()
    if len(instance.vertices) > caps.max_vertices:
        raise CapExceeded("vertex count for cycle enumeration", caps.max_vertices, len(instance.vertices))
    mask = instance.arc_mask(flt)
    arcs = [(t, h) for a, (t, h, _) in enumerate(instance.arc_list) if mask[a]]
    names = instance.vertices
    for cyc in simple_cycles(range(len(names)), arcs, cap):
        yield tuple(names[i] for i in cyc)


def extract_cycle(walk: Sequence[Hashable], arcs: Iterable[tuple[Hashable, Hashable]] | None = None) -> tuple:
    """A simple cycle contained in a closed walk.

    The cycle returned is the one that closes first: scanning the walk, the
    first vertex seen twice delimits it.  The result omits the repeated
    closing vertex.  When ``arcs`` is given the walk is checked against it.
    """
    if len(walk) < 3 or walk[0] != walk[-1]:
        raise ValueError("extract_cycle needs a closed walk of length >= 2")
    if arcs is not None:
        arcset = set(arcs)
        for a, b in zip(walk, walk[1:]):
            if (a, b) not in arcset:
                raise ValueError(f"({a}, {b}) is not an arc")
    first: dict[Hashable, int] = {}
    for j, v in enumerate(walk):
        if v in first:
            return tuple(walk[first[v]:j])
        first[v] = j
    raise AssertionError("unreachable: closed walk repeats its first vertex")


def bipartition(digraph: PatternDigraph) -> tuple[frozenset[str], frozenset[str]] | None:
    """A partition ``(X, Y)`` of the vertices into independent sets, or ``None``.

    Arc direction is irrelevant; a loop makes bipartiteness impossible.
    Each weak component's smallest vertex goes to ``X``.
    """
    adj: dict[str, set[str]] = {v: set() for v in digraph.vertices}
    for a, b in digraph.arcs:
        if a == b:
            return None
        adj[a].add(b)
        adj[b].add(a)
    side: dict[str, int] = {}
    for root in digraph.vertices:
        if root in side:
            continue
        side[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in sorted(adj[v]):
                if w not in side:
                    side[w] = 1 - side[v]
                    queue.append(w)
                elif side[w] == side[v]:
                    return None
    x = frozenset(v for v, s in side.items() if s == 0)
    return x, frozenset(digraph.vertices) - x


def is_bipartite(digraph: PatternDigraph) -> bool:
    return bipartition(digraph) is not None


def find_cycle(vertices: Sequence[Hashable], arcs: Iterable[tuple[Hashable, Hashable]], min_length: int = 1) -> tuple | None:
    """Some cycle of length ``>= min_length`` or ``None`` (loops count as length 1)."""
    arcs = list(arcs)
    if min_length <= 1:
        for a, b in sorted(arcs, key=lambda ab: (str(ab[0]), str(ab[1]))):
            if a == b:
                return (a,)
    for cyc in simple_cycles(vertices, arcs):
        if len(cyc) >= min_length:
            return cyc
    return None
