"""H-walk and H-path reachability.

A walk is an H-walk when each pair of consecutive arc colors is an arc of
the pattern; an H-path is an H-walk without repeated vertices.  A single arc
is always both.

Path questions are decided exactly by depth-first search over states
``(vertex, color of the last arc, visited set)``.  A state fully determines
what can still be reached, so each state is expanded at most once per
source; this keeps the search exact while staying cheap at desk scale.
Walk questions are polynomial: a breadth-first search over the arcs of the
filtered digraph, stepping from ``(x, y)`` to ``(y, z)`` when the color pair
is an arc of the pattern.
"""
from __future__ import annotations

from collections import deque
from typing import Iterator, Sequence

from .model import ALL, D1, D2, ArcFilter, CapExceeded, Instance, get_caps

__all__ = [
    "ArcFilter", "ALL", "D1", "D2", "WalkError",
    "is_h_walk", "is_h_path", "obstructions",
    "h_path", "h_path_exists", "h_walk", "h_walk_exists",
    "enumerate_h_paths", "reach_masks", "reached_by_masks",
]


class WalkError(ValueError):
    """The given vertex sequence is not a walk of the digraph."""


def _walk_colors(instance: Instance, seq: Sequence[str], flt: ArcFilter = ALL) -> list[int]:
    if len(seq) < 2:
        raise WalkError("a walk needs at least one arc")
    vi = instance.vindex
    try:
        idx = [vi[v] for v in seq]
    except KeyError as exc:
        raise WalkError(f"unknown vertex {exc.args[0]!r}") from None
    arc_id, arcs = instance.arc_id, instance.arc_list
    mask = instance.arc_mask(flt)
    colors = []
    for a, b in zip(idx, idx[1:]):
        aid = arc_id.get((a, b))
        if aid is None or not mask[aid]:
            raise WalkError(f"({instance.vertices[a]}, {instance.vertices[b]}) is not an arc of the {flt} view")
        colors.append(arcs[aid][2])
    return colors


def is_h_walk(instance: Instance, seq: Sequence[str]) -> bool:
    """True iff the consecutive colors along ``seq`` form a walk in H."""
    colors = _walk_colors(instance, seq)
    hn = instance.hnext
    return all(hn[a] >> b & 1 for a, b in zip(colors, colors[1:]))


def is_h_path(instance: Instance, seq: Sequence[str]) -> bool:
    colors = _walk_colors(instance, seq)
    if len(set(seq)) != len(seq):
        return False
    hn = instance.hnext
    return all(hn[a] >> b & 1 for a, b in zip(colors, colors[1:]))


def obstructions(instance: Instance, seq: Sequence[str], cyclic: bool | None = None) -> frozenset[int]:
    """Positions ``i`` of ``seq`` carrying an H-obstruction.

    For a closed walk (first vertex equals last) positions are taken modulo
    the length, so position 0 compares the closing arc with the first arc.
    ``cyclic=False`` forces the open reading of a closed sequence.
    """
    colors = _walk_colors(instance, seq)
    hn = instance.hnext
    n = len(colors)
    out = {i for i in range(1, n) if not hn[colors[i - 1]] >> colors[i] & 1}
    if cyclic is None:
        cyclic = seq[0] == seq[-1]
    if cyclic:
        if seq[0] != seq[-1]:
            raise WalkError("cyclic obstruction positions need a closed walk")
        if not hn[colors[-1]] >> colors[0] & 1:
            out.add(0)
    return frozenset(out)


# --------------------------------------------------------------------------
# index-level engines


def _check_cap(instance: Instance) -> None:
    caps = get_caps()
    n = len(instance.vertices)
    if n > caps.max_vertices:
        raise CapExceeded("vertex count for exhaustive path search", caps.max_vertices, n)


def _reach_from(out, hnext, s: int) -> int:
    reached = 0
    seen = set()
    stack = []
    for h, c in out[s]:
        st = (h, c, (1 << s) | (1 << h))
        seen.add(st)
        stack.append(st)
    while stack:
        v, c, m = stack.pop()
        reached |= 1 << v
        nxt = hnext[c]
        for h, c2 in out[v]:
            if not m >> h & 1 and nxt >> c2 & 1:
                st = (h, c2, m | (1 << h))
                if st not in seen:
                    seen.add(st)
                    stack.append(st)
    return reached


def reach_masks(instance: Instance, flt: ArcFilter = ALL) -> tuple[int, ...]:
    """``masks[u]`` has bit ``v`` set iff a uv-H-path exists inside ``flt``."""
    cache = instance.__dict__.setdefault("_reach", {})
    got = cache.get(flt)
    if got is None:
        _check_cap(instance)
        out, hn = instance.out_arcs(flt), instance.hnext
        got = tuple(_reach_from(out, hn, s) for s in range(len(instance.vertices)))
        cache[flt] = got
    return got


def reached_by_masks(instance: Instance, flt: ArcFilter = ALL) -> tuple[int, ...]:
    """Transpose of :func:`reach_masks`: bit ``u`` of ``masks[v]`` iff uv-H-path."""
    cache = instance.__dict__.setdefault("_reached_by", {})
    got = cache.get(flt)
    if got is None:
        fwd = reach_masks(instance, flt)
        n = len(fwd)
        back = [0] * n
        for u in range(n):
            m = fwd[u]
            while m:
                low = m & -m
                back[low.bit_length() - 1] |= 1 << u
                m ^= low
        got = tuple(back)
        cache[flt] = got
    return got


def _find_path(out, hnext, s: int, t: int) -> list[int] | None:
    dead: set = set()
    path = [s]

    def dfs(v: int, c: int, m: int) -> bool:
        for h, c2 in out[v]:
            if m >> h & 1 or (c >= 0 and not hnext[c] >> c2 & 1):
                continue
            if h == t:
                path.append(h)
                return True
            st = (h, c2, m | (1 << h))
            if st in dead:
                continue
            path.append(h)
            if dfs(*st):
                return True
            path.pop()
            dead.add(st)
        return False

    return path if dfs(s, -1, 1 << s) else None


def h_path(instance: Instance, u: str, v: str, flt: ArcFilter = ALL) -> tuple[str, ...] | None:
    """Lexicographically first uv-H-path inside ``flt``, or ``None``."""
    if u == v:
        raise ValueError("h_path needs distinct endpoints")
    _check_cap(instance)
    vi = instance.vindex
    found = _find_path(instance.out_arcs(flt), instance.hnext, vi[u], vi[v])
    return None if found is None else instance.names(found)


def h_path_exists(instance: Instance, u: str, v: str, flt: ArcFilter = ALL) -> bool:
    if u == v:
        raise ValueError("h_path_exists needs distinct endpoints")
    vi = instance.vindex
    return bool(reach_masks(instance, flt)[vi[u]] >> vi[v] & 1)


def _path_witness(instance: Instance, s: int, t: int, flt: ArcFilter) -> tuple[str, ...]:
    found = _find_path(instance.out_arcs(flt), instance.hnext, s, t)
    assert found is not None
    return instance.names(found)


def h_walk(instance: Instance, u: str, v: str, flt: ArcFilter = ALL) -> tuple[str, ...] | None:
    """A shortest uv-H-walk inside ``flt`` (product automaton over arcs), or ``None``."""
    if u == v:
        raise ValueError("h_walk needs distinct endpoints")
    vi = instance.vindex
    s, t = vi[u], vi[v]
    arcs, mask, hn = instance.arc_list, instance.arc_mask(flt), instance.hnext
    by_tail: list[list[int]] = [[] for _ in instance.vertices]
    for a, (x, _, _) in enumerate(arcs):
        if mask[a]:
            by_tail[x].append(a)
    parent: dict[int, int] = {}
    queue: deque[int] = deque()
    for a in by_tail[s]:
        parent[a] = -1
        queue.append(a)
    while queue:
        a = queue.popleft()
        _, y, c = arcs[a]
        if y == t:
            chain = []
            while a != -1:
                chain.append(a)
                a = parent[a]
            chain.reverse()
            seq = [arcs[chain[0]][0]] + [arcs[b][1] for b in chain]
            return instance.names(seq)
        nxt = hn[c]
        for b in by_tail[y]:
            if b not in parent and nxt >> arcs[b][2] & 1:
                parent[b] = a
                queue.append(b)
    return None


def h_walk_exists(instance: Instance, u: str, v: str, flt: ArcFilter = ALL) -> bool:
    return h_walk(instance, u, v, flt) is not None


def enumerate_h_paths(
    instance: Instance, u: str, flt: ArcFilter = ALL, max_len: int | None = None
) -> Iterator[tuple[str, ...]]:
    """Every simple H-path leaving ``u`` inside ``flt``, in lexicographic order."""
    _check_cap(instance)
    caps = get_caps()
    out, hn, names = instance.out_arcs(flt), instance.hnext, instance.vertices
    limit = len(names) - 1 if max_len is None else max_len
    s = instance.vindex[u]
    path = [s]
    count = 0

    def dfs(v: int, c: int, m: int):
        nonlocal count
        if len(path) - 1 >= limit:
            return
        for h, c2 in out[v]:
            if m >> h & 1 or (c >= 0 and not hn[c] >> c2 & 1):
                continue
            path.append(h)
            count += 1
            if count > caps.max_paths:
                raise CapExceeded("enumerated H-paths", caps.max_paths, count - 1)
            yield tuple(names[i] for i in path)
            yield from dfs(h, c2, m | (1 << h))
            path.pop()

    yield from dfs(s, -1, 1 << s)
