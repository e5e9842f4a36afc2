"""Reference implementations used by the tests.

Everything here is written directly from the definitions, works on vertex
*names*, and deliberately shares no code with :mod:`hkernel` beyond reading
the instance's public fields.  The oracles are exponential and only meant for
the small instances the tests generate.
"""
from __future__ import annotations

import itertools

import networkx as nx


# -- basic views --------------------------------------------------------------

def side_of_color(inst, c):
    p = inst.partition
    for i, cls in enumerate(p.classes, 1):
        if c in cls:
            return 1 if i in p.side1 else 2
    raise KeyError(c)


def class_of_color(inst, c):
    for i, cls in enumerate(inst.partition.classes, 1):
        if c in cls:
            return i
    raise KeyError(c)


def arcs_of(inst, where="all"):
    """Arcs ``(t, h, color)`` kept by a filter written as 'all', 'd1', 'd2' or 'g<i>'."""
    out = []
    for (t, h), c in inst.digraph.coloring.items():
        if where == "all":
            keep = True
        elif where in ("d1", "d2"):
            keep = side_of_color(inst, c) == int(where[1])
        else:
            keep = class_of_color(inst, c) == int(where[1:])
        if keep:
            out.append((t, h, c))
    return out


def nx_digraph(inst, where="all"):
    g = nx.DiGraph()
    g.add_nodes_from(inst.digraph.vertices)
    for t, h, c in arcs_of(inst, where):
        g.add_edge(t, h, color=c)
    return g


def h_ok(inst, a, b):
    return (a, b) in inst.pattern.arcs


# -- walks and obstructions --------------------------------------------------

def seq_colors(inst, seq):
    return [inst.digraph.coloring[(seq[i], seq[i + 1])] for i in range(len(seq) - 1)]


def open_obstruction_positions(inst, seq):
    cols = seq_colors(inst, seq)
    return {i for i in range(1, len(seq) - 1) if not h_ok(inst, cols[i - 1], cols[i])}


def cyclic_obstruction_positions(inst, cyc):
    """Obstruction positions of the closed walk ``cyc[0] .. cyc[-1] cyc[0]``."""
    n = len(cyc)
    cols = [inst.digraph.coloring[(cyc[i], cyc[(i + 1) % n])] for i in range(n)]
    return {i for i in range(n) if not h_ok(inst, cols[i - 1], cols[i])}


def is_h_sequence(inst, seq):
    return len(seq) >= 2 and not open_obstruction_positions(inst, seq)


# -- reachability ------------------------------------------------------------

def h_path_oracle(inst, u, v, where="all"):
    """Existence of a u-v H-path by listing every simple path with networkx."""
    if u == v:
        return False
    g = nx_digraph(inst, where)
    return any(is_h_sequence(inst, p) for p in nx.all_simple_paths(g, u, v))


def h_path_matrix(inst, where="all"):
    vs = inst.digraph.vertices
    g = nx_digraph(inst, where)
    reach = {u: set() for u in vs}
    for u in vs:
        for v in vs:
            if u != v and any(is_h_sequence(inst, p) for p in nx.all_simple_paths(g, u, v)):
                reach[u].add(v)
    return reach


def h_walk_bfs(inst, u, v, where="all"):
    """Bounded breadth-first search over explicit walks, up to |A|*|V| arcs.

    The frontier holds (current vertex, colour of the last arc); the bound is
    the trivial one from the pigeonhole principle, not a product argument.
    """
    arcs = arcs_of(inst, where)
    out = {}
    for t, h, c in arcs:
        out.setdefault(t, []).append((h, c))
    bound = max(1, len(arcs) * len(inst.digraph.vertices))
    frontier = {(h, c) for h, c in out.get(u, [])}
    seen = set(frontier)
    for _ in range(bound):
        if any(x == v for x, _c in frontier):
            return True
        nxt = set()
        for x, c in frontier:
            for h, c2 in out.get(x, []):
                if h_ok(inst, c, c2) and (h, c2) not in seen:
                    seen.add((h, c2))
                    nxt.add((h, c2))
        if not nxt:
            return False
        frontier = nxt
    return False


def enumerate_walks(inst, where, max_arcs):
    """Every H-walk (as a vertex sequence) with 1..max_arcs arcs."""
    arcs = arcs_of(inst, where)
    out = {}
    for t, h, c in arcs:
        out.setdefault(t, []).append((h, c))
    stack = [((t, h), c) for t, h, c in arcs]
    while stack:
        seq, c = stack.pop()
        yield seq
        if len(seq) - 1 >= max_arcs:
            continue
        for h, c2 in out.get(seq[-1], []):
            if h_ok(inst, c, c2):
                stack.append((seq + (h,), c2))


# -- hypotheses --------------------------------------------------------------

def transitivity_oracle(inst, i):
    """True iff H-paths inside G_i are transitive on distinct endpoints."""
    r = h_path_matrix(inst, f"g{i}")
    for x in r:
        for y in r[x]:
            for z in r[y]:
                if z != x and z not in r[x]:
                    return False
    return True


def hyp1_oracle(inst):
    for side in ("d1", "d2"):
        g = nx_digraph(inst, side)
        for cyc in nx.simple_cycles(g):
            n = len(cyc)
            classes = {class_of_color(inst, inst.digraph.coloring[(cyc[j], cyc[(j + 1) % n])]) for j in range(n)}
            if len(classes) > 1:
                return False
    return True


def hyp2_oracle(inst):
    """Full enumeration of side H-walks with at most |V| arcs."""
    n = len(inst.digraph.vertices)
    for side in ("d1", "d2"):
        for seq in enumerate_walks(inst, side, n):
            if len({class_of_color(inst, c) for c in seq_colors(inst, seq)}) > 1:
                return False
    return True


def hyp3_oracle(inst):
    for (a, b), c1 in inst.digraph.coloring.items():
        for (b2, d), c2 in inst.digraph.coloring.items():
            if b2 == b and side_of_color(inst, c1) != side_of_color(inst, c2) and h_ok(inst, c1, c2):
                return False
    return True


def _segment_ok(inst, seg, where):
    if len(seg) < 2 or not is_h_sequence(inst, seg):
        return False
    if where == "all":
        return True
    side = int(where[1])
    return all(side_of_color(inst, c) == side for c in seq_colors(inst, seg))


def c3_oracle(inst):
    """Triple-split search for a C3-subdivision over every simple cycle.

    Returns the set of (rotated cycle, junction triple) pairs found, which is
    empty exactly when no subdivision exists.
    """
    found = set()
    for cyc in nx.simple_cycles(nx_digraph(inst)):
        n = len(cyc)
        if n < 3:
            continue
        obs = cyclic_obstruction_positions(inst, cyc)
        if len(obs) != 3:
            continue
        for i, j, l in itertools.permutations(range(n), 3):
            if {i, j, l} != obs:
                continue
            # walk the cycle from i: i .. j .. l .. i in cyclic order
            if not ((j - i) % n < (l - i) % n):
                continue
            rot = cyc[i:] + cyc[:i]
            jj, ll = (j - i) % n, (l - i) % n
            t1, t2, t3 = rot[: jj + 1], rot[jj: ll + 1], rot[ll:] + [rot[0]]
            if _segment_ok(inst, t1, "d1") and _segment_ok(inst, t2, "all") and _segment_ok(inst, t3, "d2"):
                found.add((tuple(rot), (rot[0], rot[jj], rot[ll])))
    return found


def p3_pairs_oracle(inst):
    """All (u, x) joined by a path that splits as D1 / D / D2 H-paths at
    exactly its two obstructions."""
    g = nx_digraph(inst)
    vs = inst.digraph.vertices
    pairs = set()
    for u in vs:
        for x in vs:
            if u == x:
                continue
            for p in nx.all_simple_paths(g, u, x):
                if len(p) < 4:
                    continue
                obs = sorted(open_obstruction_positions(inst, p))
                if len(obs) != 2:
                    continue
                i, j = obs
                if (_segment_ok(inst, p[: i + 1], "d1") and _segment_ok(inst, p[i: j + 1], "all")
                        and _segment_ok(inst, p[j:], "d2")):
                    pairs.add((u, x))
                    break
    return pairs


def hyp5_oracle(inst):
    return all(h_path_oracle(inst, u, x) for u, x in p3_pairs_oracle(inst))


# -- kernels -----------------------------------------------------------------

def kernels_oracle(inst, where="all"):
    """Every H-kernel, by testing all subsets of V(D)."""
    vs = inst.digraph.vertices
    r = h_path_matrix(inst, where)
    out = []
    for size in range(1, len(vs) + 1):
        for s in itertools.combinations(vs, size):
            ss = set(s)
            if any(r[a] & ss for a in s):
                continue
            if all(r[v] & ss for v in vs if v not in ss):
                out.append(s)
    return out


def is_kernel_oracle(inst, s):
    ss = set(s)
    if not ss:
        return False
    r = h_path_matrix(inst)
    return not any(r[a] & ss for a in ss) and all(r[v] & ss for v in inst.digraph.vertices if v not in ss)


def semikernel_mod_d2_oracle(inst, s):
    ss = set(s)
    r = h_path_matrix(inst)
    r1 = h_path_matrix(inst, "d1")
    if any(r[a] & ss for a in ss):
        return False
    for z in inst.digraph.vertices:
        if z in ss:
            continue
        if any(z in r1[a] for a in ss) and not (r[z] & ss):
            return False
    return True
