import itertools

import networkx as nx
import pytest
from hypothesis import given

from hkernel import ColoredDigraph, is_h_kernel
from hkernel.corollaries import (
    CorollaryPreconditionError, PatternShape, acyclic_kernel, bruteforce_pcp_kernel, check_three_transitive,
    check_transitive_classes, classify_pattern, concat_pcp, double_instance, is_properly_colored_path,
    is_rainbow_kernel, is_rainbow_path, mp_instance, mp_kernel_via_bipartite_ccd, pcp_instance,
    pcp_kernel_via_transitive_classes, plain_instance, rainbow_kernel, rainbow_reach, three_transitive_kernel,
)
from hkernel.model import PatternDigraph, side_subdigraph
from hkernel.reachability import is_h_path

from conftest import instances
from generators import bipartite_ccd_digraphs, transitive_class_digraphs
from oracles import is_kernel_oracle, kernels_oracle


def cd(arcs, vertices=None):
    vs = vertices or sorted({x for a, b, _ in arcs for x in (a, b)})
    return ColoredDigraph.build(vs, arcs)


# -- pattern shapes --------------------------------------------------------------

def test_classify_pattern():
    assert classify_pattern(PatternDigraph(("1", "2"), frozenset())) is PatternShape.EMPTY
    assert classify_pattern(PatternDigraph(("1", "2"), frozenset({("1", "1"), ("2", "2")}))) is PatternShape.LOOPS_ONLY
    assert classify_pattern(PatternDigraph(("1", "2"), frozenset({("1", "2"), ("2", "1")}))) is PatternShape.COMPLETE_LOOPLESS
    assert classify_pattern(PatternDigraph(("1", "2"), frozenset({("1", "2")}))) is PatternShape.ACYCLIC
    assert classify_pattern(PatternDigraph(("1", "2"), frozenset({("1", "1"), ("1", "2")}))) is PatternShape.GENERAL


def _classical_kernel(vs, arcs, s):
    s = set(s)
    return (not any((a, b) in arcs for a in s for b in s)
            and all(any((v, x) in arcs for x in s) for v in vs if v not in s))


@given(instances(max_n=6, partition=False))
def test_empty_pattern_is_classical_kernel(inst):
    plain = plain_instance(inst)
    arcs = set(inst.digraph.coloring)
    for n in range(len(inst.vertices) + 1):
        for s in itertools.combinations(inst.vertices, n):
            assert bool(is_h_kernel(plain, s)) == _classical_kernel(inst.vertices, arcs, s)


@given(instances(max_n=6, partition=False))
def test_loops_only_means_monochromatic(inst):
    mp = mp_instance(inst)
    g = nx.DiGraph(list(inst.digraph.coloring))
    for p in itertools.chain.from_iterable(
            nx.all_simple_paths(g, u, v) for u, v in itertools.permutations(g.nodes, 2)):
        cols = {inst.color(a, b) for a, b in zip(p, p[1:])}
        assert is_h_path(mp, p) == (len(cols) == 1)


@given(instances(max_n=6, partition=False))
def test_complete_loopless_means_properly_colored(inst):
    pcp = pcp_instance(inst)
    g = nx.DiGraph(list(inst.digraph.coloring))
    for p in itertools.chain.from_iterable(
            nx.all_simple_paths(g, u, v) for u, v in itertools.permutations(g.nodes, 2)):
        cols = [inst.color(a, b) for a, b in zip(p, p[1:])]
        proper = all(x != y for x, y in zip(cols, cols[1:]))
        assert is_h_path(pcp, p) == proper == is_properly_colored_path(inst.digraph, p)


# -- acyclic and mp ----------------------------------------------------------------

def test_acyclic_kernel():
    d = cd([("a", "b", "1"), ("b", "c", "1"), ("a", "d", "2")])
    assert acyclic_kernel(d) == ("c", "d")
    with pytest.raises(CorollaryPreconditionError) as exc:
        acyclic_kernel(cd([("a", "b", "1"), ("b", "a", "1")]))
    assert exc.value.code == "not-acyclic"


def test_mp_alternating_four_cycle():
    d = cd([("a", "b", "1"), ("b", "c", "2"), ("c", "d", "1"), ("d", "a", "2")])
    k = mp_kernel_via_bipartite_ccd(d)
    assert k == ("a", "c")
    assert sorted(kernels_oracle(mp_instance(d))) == [("a", "c"), ("b", "d")]


def test_mp_monochromatic_single_arc():
    d = cd([("a", "b", "1")])
    assert mp_kernel_via_bipartite_ccd(d) == ("b",)


def test_mp_rejects_loop_in_ccd():
    d = cd([("a", "b", "1"), ("b", "c", "1")])
    with pytest.raises(CorollaryPreconditionError) as exc:
        mp_kernel_via_bipartite_ccd(d)
    assert exc.value.code == "not-bipartite" and exc.value.witness["odd_or_loop_cycle"] == ["1"]


def test_mp_keeps_isolated_vertices():
    d = cd([("a", "b", "1"), ("b", "a", "2")], vertices=["a", "b", "z"])
    k = mp_kernel_via_bipartite_ccd(d)
    assert "z" in k and is_kernel_oracle(mp_instance(d), k)


@pytest.mark.parametrize("d", bipartite_ccd_digraphs(25, seed=5), ids=lambda d: f"n{len(d.vertices)}")
def test_mp_kernels_on_random_bipartite_ccd(d):
    k = mp_kernel_via_bipartite_ccd(d)
    assert is_kernel_oracle(mp_instance(d), k)


# -- PCP ----------------------------------------------------------------------------

def test_doubling_shape():
    d = cd([("a", "b", "1"), ("b", "c", "2")])
    dd = double_instance(d)
    assert len(dd.vertices) == 2 * len(d.vertices)
    assert len(dd.digraph.coloring) == 2 * len(d.coloring)
    assert side_subdigraph(dd, 1).arc_pairs() == set(d.coloring)
    assert side_subdigraph(dd, 2).arc_pairs() == {(a + "*", b + "*") for a, b in d.coloring}


def test_doubling_avoids_name_clashes():
    d = cd([("a", "a*", "1"), ("a*", "b", "2")])
    dd = double_instance(d)
    assert len(set(dd.vertices)) == 6 and "a**" in dd.vertices


def test_transitive_class_check():
    assert check_transitive_classes(cd([("a", "b", "1"), ("b", "c", "2")]))
    rep = check_transitive_classes(cd([("a", "b", "1"), ("b", "c", "1")]))
    assert not rep and rep.payload["missing"] == ["a", "c"]
    with pytest.raises(CorollaryPreconditionError):
        pcp_kernel_via_transitive_classes(cd([("a", "b", "1"), ("b", "c", "1")]))


def test_pcp_distinct_colors():
    d = cd([("a", "b", "1"), ("b", "c", "2"), ("c", "a", "3")])
    k = pcp_kernel_via_transitive_classes(d)
    assert is_kernel_oracle(pcp_instance(d), k)
    assert bruteforce_pcp_kernel(d) is not None


@pytest.mark.parametrize("d", transitive_class_digraphs(25, seed=9), ids=lambda d: f"n{len(d.vertices)}")
def test_pcp_kernels_on_random_transitive_classes(d):
    k = pcp_kernel_via_transitive_classes(d)
    assert is_kernel_oracle(pcp_instance(d), k)
    assert kernels_oracle(pcp_instance(d))


# -- rainbow ------------------------------------------------------------------------

def test_rainbow_single_color():
    d = cd([("a", "b", "1"), ("b", "c", "1"), ("a", "c", "1")])
    k = rainbow_kernel(d)
    assert k == ("c",) and is_rainbow_kernel(d, k)


def test_rainbow_rejects_ccd_two_cycle():
    d = cd([("a", "b", "1"), ("b", "c", "2"), ("c", "d", "1")])
    with pytest.raises(CorollaryPreconditionError) as exc:
        rainbow_kernel(d)
    assert exc.value.code == "ccd-cycle"


def _rainbow_oracle(d):
    g = nx.DiGraph(list(d.coloring))
    out = {v: set() for v in d.vertices}
    for u, v in itertools.permutations(g.nodes, 2):
        for p in nx.all_simple_paths(g, u, v):
            cols = [d.coloring[(a, b)] for a, b in zip(p, p[1:])]
            if len(set(cols)) == len(cols):
                out[u].add(v)
                break
    return out


@given(instances(max_n=6, partition=False))
def test_rainbow_reach_matches_path_enumeration(inst):
    d = inst.digraph
    expect = _rainbow_oracle(d)
    got = rainbow_reach(d)
    assert {v: set(s) for v, s in got.items()} == expect


def test_rainbow_and_pcp_agree_when_ccd_acyclic():
    checked = 0
    for d in transitive_class_digraphs(60, seed=21, max_m=3):
        try:
            k = rainbow_kernel(d)
        except CorollaryPreconditionError:
            continue
        checked += 1
        assert is_rainbow_kernel(d, k) and is_kernel_oracle(pcp_instance(d), k)
    assert checked > 0


def test_path_predicates():
    d = cd([("a", "b", "1"), ("b", "c", "2"), ("c", "d", "1")])
    assert is_properly_colored_path(d, ["a", "b", "c", "d"])
    assert not is_rainbow_path(d, ["a", "b", "c", "d"])
    assert is_rainbow_path(d, ["a", "b", "c"])
    with pytest.raises(ValueError):
        is_rainbow_path(d, ["a", "c"])


# -- concatenation ------------------------------------------------------------------

def test_concat_plain():
    d = cd([("u", "v", "1"), ("v", "w", "2")])
    assert concat_pcp(d, ["u", "v"], ["v", "w"]) == ("u", "v", "w")


def test_concat_shortcut():
    d = cd([("u", "x", "2"), ("x", "v", "1"), ("v", "y", "1"), ("y", "w", "2"), ("x", "y", "1")])
    out = concat_pcp(d, ["u", "x", "v"], ["v", "y", "w"])
    assert out == ("u", "x", "y", "w")
    assert len(out) - 1 <= 4


@pytest.mark.parametrize("d", transitive_class_digraphs(40, seed=33, max_n=6, max_m=3), ids=str)
def test_concat_on_random_paths(d):
    g = nx.DiGraph(list(d.coloring))
    tried = 0
    for u, v, w in itertools.permutations(g.nodes, 3):
        p1 = next((p for p in nx.all_simple_paths(g, u, v) if is_properly_colored_path(d, p)), None)
        p2 = next((p for p in nx.all_simple_paths(g, v, w) if is_properly_colored_path(d, p)), None)
        if p1 is None or p2 is None:
            continue
        out = concat_pcp(d, p1, p2)
        assert is_properly_colored_path(d, out) and out[0] == u and out[-1] == w
        assert len(out) - 1 <= (len(p1) - 1) + (len(p2) - 1)
        tried += 1
        if tried > 10:
            break


# -- 3-transitive ---------------------------------------------------------------------

def test_three_transitive_degenerate_branch():
    vs, arcs = list("abcd"), [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")]
    k = three_transitive_kernel(vs, arcs, arcs)
    assert k == ("b", "d")


def test_three_transitive_rejects_triangle():
    vs, arcs = list("abc"), [("a", "b"), ("b", "c"), ("c", "a")]
    rep = check_three_transitive(vs, arcs)
    assert not rep and rep.kind == "directed-triangle"
    with pytest.raises(CorollaryPreconditionError):
        three_transitive_kernel(vs, arcs, arcs[:1])


def test_three_transitive_split():
    # a <-> b, b -> c, a -> c: 3-transitive, no triangle; split into two acyclic parts
    vs = list("abc")
    arcs = [("a", "b"), ("b", "a"), ("b", "c"), ("a", "c")]
    assert check_three_transitive(vs, arcs)
    k = three_transitive_kernel(vs, arcs, [("a", "b"), ("b", "c")])
    assert k == ("c",)
    with pytest.raises(CorollaryPreconditionError) as exc:
        three_transitive_kernel(vs, arcs, [("a", "b"), ("b", "a")])
    assert exc.value.code == "side-not-acyclic"


def _three_transitive_graphs(seed, count):
    import numpy as np
    rng = np.random.default_rng(seed)
    found = []
    while len(found) < count:
        n = int(rng.integers(3, 7))
        vs = list("abcdefg"[:n])
        arcs = [(a, b) for a, b in itertools.permutations(vs, 2) if rng.random() < 0.35]
        if not arcs or not check_three_transitive(vs, arcs):
            continue
        # split: arcs going "up" in a random order form H1, the rest H2; both acyclic
        order = {v: i for i, v in enumerate(rng.permutation(vs))}
        h1 = [(a, b) for a, b in arcs if order[a] < order[b]]
        found.append((vs, arcs, h1))
    return found


@pytest.mark.parametrize("case", _three_transitive_graphs(3, 20), ids=lambda c: f"n{len(c[0])}")
def test_three_transitive_random(case):
    vs, arcs, h1 = case
    k = three_transitive_kernel(vs, arcs, h1)
    assert _classical_kernel(vs, set(arcs), k)
