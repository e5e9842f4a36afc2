"""Test-side random generators for plain colored digraphs.

These are independent of :mod:`hkernel.harness`; they use numpy's generator
with explicit seeds so every test run sees the same instances.
"""
from __future__ import annotations

import itertools

import numpy as np

from hkernel import ColoredDigraph
from hkernel.corollaries import mp_instance
from hkernel.structure import color_class_digraph, is_bipartite

NAMES = "abcdefghij"


def random_colored_digraph(rng, n, m, density):
    vs = list(NAMES[:n])
    arcs = []
    for a, b in itertools.permutations(vs, 2):
        if rng.random() < density:
            arcs.append((a, b, str(int(rng.integers(1, m + 1)))))
    return ColoredDigraph.build(vs, arcs)


def close_colors(d, rng, rounds=20):
    """Make every color class transitive by adding closing arcs of the same
    color; an arc whose closure would clash with another color is dropped."""
    col = dict(d.coloring)
    for _ in range(rounds):
        changed = False
        for (u, v), c in sorted(col.items()):
            for (v2, w), c2 in sorted(col.items()):
                if v2 != v or c2 != c or w == u or (u, v) not in col or (v, w) not in col:
                    continue
                have = col.get((u, w))
                if have == c:
                    continue
                changed = True
                if have is None:
                    col[(u, w)] = c
                else:
                    # drop one of the two composing arcs at random
                    del col[(u, v) if rng.random() < 0.5 else (v, w)]
        if not changed:
            return ColoredDigraph(d.vertices, dict(sorted(col.items())))
    return None


def transitive_class_digraphs(count, seed, max_n=7, max_m=4):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(2, max_n + 1))
        m = int(rng.integers(1, max_m + 1))
        d = random_colored_digraph(rng, n, m, float(rng.uniform(0.15, 0.5)))
        if not d.coloring:
            continue
        d = close_colors(d, rng)
        if d is not None and d.coloring:
            out.append(d)
    return out


def bipartite_ccd_digraphs(count, seed, max_n=8, max_m=5):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(2, max_n + 1))
        m = int(rng.integers(1, max_m + 1))
        d = random_colored_digraph(rng, n, m, float(rng.uniform(0.1, 0.45)))
        if d.coloring and is_bipartite(color_class_digraph(mp_instance(d))):
            out.append(d)
    return out


def random_instance(rng, n_range=(3, 8), m_range=(2, 5), density=(0.15, 0.5), pattern_density=(0.0, 0.6),
                    k_max=4):
    """A random instance with a valid chromatic partition (or ``None`` if the
    draw leaves fewer than two colors on the arcs)."""
    from hkernel import make_instance

    n = int(rng.integers(n_range[0], n_range[1] + 1))
    m = int(rng.integers(m_range[0], m_range[1] + 1))
    d = random_colored_digraph(rng, n, m, float(rng.uniform(*density)))
    used = list(d.colors_used())
    if len(used) < 2:
        return None
    colors = [str(i) for i in range(1, m + 1)]
    pd = float(rng.uniform(*pattern_density))
    h = [(a, b) for a in colors for b in colors if rng.random() < pd]
    k = int(rng.integers(2, min(len(used), k_max) + 1))
    order = list(rng.permutation(used))
    classes = [[c] for c in order[:k]]
    for c in colors:
        if c not in order[:k]:
            classes[int(rng.integers(k))].append(c)
    idx = [int(i) + 1 for i in rng.permutation(k)]
    n1 = int(rng.integers(1, k))
    arcs = [(a, b, c) for (a, b), c in d.coloring.items()]
    return make_instance(colors, h, d.vertices, arcs, classes, idx[:n1], idx[n1:])


def random_instances(count, seed, **kw):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        inst = random_instance(rng, **kw)
        if inst is not None:
            out.append(inst)
    return out
