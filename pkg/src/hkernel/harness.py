"""Random instances, lemma campaigns and the search for tightness examples.

Every trial draws from its own generator seeded with ``(seed, trial)``, so a
trial's instance does not depend on which process runs it or in what order.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Iterator, Sequence

import numpy as np

from .corollaries import PatternShape
from .hypotheses import check_all, check_one
from .kernels import (
    PipelineError, _escape_chain, build_semikernel_digraph, find_h_kernel_bruteforce, find_singleton_semikernel,
    is_h_kernel, is_h_semikernel, is_h_semikernel_mod_d2,
)
from .model import (
    ALL, D1, D2, ArcFilter, ChromaticPartition, ColoredDigraph, Instance, InstanceError, PatternDigraph,
    deserialize, dumps_canonical, serialize, to_raw,
)
from .reachability import _find_path, reach_masks
from .structure import find_cycle

__all__ = [
    "GeneratorConfig", "GenerationBudgetExceeded", "TightnessResult", "CampaignReport", "LEMMAS",
    "TIGHTNESS_PRESETS", "CONTROL_PRESETS", "generate", "generate_with_stats", "generate_many",
    "run_lemma_campaign", "search_tightness", "recertify",
]


class GenerationBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of the random instance generator.

    Ranges are inclusive ``(low, high)`` pairs; each trial draws its own
    values from them.  ``side1`` fixes the class indices (1-based) of the first
    side; when ``None`` a random nonempty proper prefix of the classes is used.
    ``require``/``forbid`` list hypothesis ids that must pass/fail.
    """

    vertices: tuple[int, int] = (3, 6)
    arc_density: tuple[float, float] = (0.25, 0.6)
    colors: tuple[int, int] = (2, 4)
    k: tuple[int, int] = (2, 3)
    side1: tuple[int, ...] | None = None
    pattern_density: tuple[float, float] = (0.0, 0.7)
    shape: str | None = None
    require: tuple[str, ...] = ()
    forbid: tuple[str, ...] = ()
    allow_isolated: bool = False
    max_attempts: int = 2000
    seed: int = 0

    def with_seed(self, seed: int) -> "GeneratorConfig":
        return replace(self, seed=seed)


_SHAPES = {s.value: s for s in PatternShape}


def _uniform(rng: np.random.Generator, lo_hi) -> float:
    lo, hi = lo_hi
    return lo if lo == hi else float(rng.uniform(lo, hi))


def _integer(rng: np.random.Generator, lo_hi) -> int:
    lo, hi = lo_hi
    return int(lo) if lo == hi else int(rng.integers(lo, hi + 1))


def _pattern_arcs(rng: np.random.Generator, colors: list[str], shape: str | None, density: float) -> list[tuple[str, str]]:
    m = len(colors)
    if shape == "empty":
        return []
    if shape == "loops-only":
        return [(c, c) for c in colors]
    if shape == "complete-loopless":
        return [(a, b) for a in colors for b in colors if a != b]
    if shape == "acyclic":
        perm = rng.permutation(m)
        return [(colors[perm[i]], colors[perm[j]]) for i in range(m) for j in range(i + 1, m) if rng.random() < density]
    mask = rng.random((m, m)) < density
    return [(colors[i], colors[j]) for i in range(m) for j in range(m) if mask[i, j]]


def _vertex_names(n: int) -> list[str]:
    if n <= 26:
        return [chr(ord("a") + i) for i in range(n)]
    return [f"v{i:03d}" for i in range(n)]


def _sample(cfg: GeneratorConfig, rng: np.random.Generator) -> Instance | None:
    """One raw draw; ``None`` when the draw is structurally unusable."""
    n = _integer(rng, cfg.vertices)
    m = _integer(rng, cfg.colors)
    k = min(_integer(rng, cfg.k), m)
    if cfg.side1 is not None:
        k = max(k, max(cfg.side1) + 1)
    if k < 2 or k > m:
        return None
    density = _uniform(rng, cfg.arc_density)
    names = _vertex_names(n)
    colors = [str(i) for i in range(1, m + 1)]
    # classes: a random surjection colors -> classes
    perm = rng.permutation(m)
    owner = np.empty(m, dtype=int)
    owner[perm[:k]] = np.arange(k)
    if m > k:
        owner[perm[k:]] = rng.integers(0, k, m - k)
    classes = [[colors[c] for c in range(m) if owner[c] == i] for i in range(k)]
    # arcs
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    keep = rng.random(len(pairs)) < density
    if not cfg.allow_isolated:
        # give every untouched vertex one random arc, in or out
        touched = np.zeros(n, dtype=bool)
        for (i, j), kp in zip(pairs, keep):
            if kp:
                touched[i] = touched[j] = True
        for v in range(n):
            if not touched[v]:
                other = int(rng.integers(0, n - 1))
                other += other >= v
                idx = pairs.index((v, other) if rng.random() < 0.5 else (other, v))
                keep[idx] = True
                touched[v] = touched[other] = True
    chosen = [p for p, kp in zip(pairs, keep) if kp]
    if len(chosen) < k:
        return None
    arc_colors = rng.integers(0, m, len(chosen))
    # make every class appear: the first k arcs in a random order get one class each
    order = rng.permutation(len(chosen))
    for cls_i, a in enumerate(order[:k]):
        members = classes[cls_i]
        arc_colors[a] = int(members[int(rng.integers(0, len(members)))]) - 1
    if cfg.side1 is not None:
        side1 = set(cfg.side1)
    else:
        side1 = set(range(1, _integer(rng, (1, k - 1)) + 1))
    side2 = set(range(1, k + 1)) - side1
    h_arcs = _pattern_arcs(rng, colors, cfg.shape, _uniform(rng, cfg.pattern_density))
    arcs = [(names[i], names[j], colors[c]) for (i, j), c in zip(chosen, arc_colors)]
    try:
        return Instance(
            PatternDigraph.build(colors, h_arcs),
            ColoredDigraph.build(names, arcs),
            ChromaticPartition.build(classes, side1, side2),
        )
    except InstanceError:
        return None


def _accepts(cfg: GeneratorConfig, inst: Instance) -> bool:
    for hid in cfg.require:
        if not check_one(inst, hid):
            return False
    for hid in cfg.forbid:
        if check_one(inst, hid):
            return False
    return True


def generate_with_stats(config: GeneratorConfig, trial: int = 0) -> tuple[Instance, dict]:
    """Rejection-sample one instance; returns it with the acceptance statistics."""
    rng = np.random.default_rng([config.seed, trial])
    for attempt in range(1, config.max_attempts + 1):
        inst = _sample(config, rng)
        if inst is not None and _accepts(config, inst):
            return inst, {"attempts": attempt, "acceptance_rate": 1.0 / attempt}
    raise GenerationBudgetExceeded(
        f"no instance satisfied the constraints within {config.max_attempts} attempts (trial {trial})"
    )


def generate(config: GeneratorConfig, trial: int = 0) -> Instance:
    return generate_with_stats(config, trial)[0]


def generate_many(config: GeneratorConfig, count: int, start: int = 0) -> Iterator[Instance]:
    for t in range(start, start + count):
        yield generate(config, t)


# --------------------------------------------------------------------------
# lemma campaigns


@dataclass
class CampaignReport:
    lemma: str
    trials: int = 0
    qualifying: int = 0
    violations: int = 0
    reproducers: list[str] = field(default_factory=list)
    examples: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _bits(m: int) -> Iterator[int]:
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def _all_pass(inst: Instance, ids: Sequence[str]) -> bool:
    return all(check_one(inst, h) for h in ids)


def _classes_uniform_globally(inst: Instance) -> bool:
    """Every cycle and every H-walk of ``D`` inside one class (and ``T``)."""
    from .kernels import HypothesisFailure, _require_global_uniformity

    try:
        _require_global_uniformity(inst)
    except HypothesisFailure:
        return False
    return True


# Each lemma: (hypothesis predicate, conclusion -> None or a violation description)


def _lemma_chain_closure(inst: Instance, rng: np.random.Generator):
    p = inst.require_partition()
    for r in range(1, p.k + 1):
        flt = ArcFilter.cls(r)
        reach = reach_masks(inst, flt)
        verts = inst.filter_vertices(flt)
        for _ in range(4):
            x = verts[int(rng.integers(len(verts)))]
            chain, used = [x], 1 << x
            while True:
                options = [y for y in _bits(reach[chain[-1]]) if not used >> y & 1]
                if not options:
                    break
                y = options[int(rng.integers(len(options)))]
                chain.append(y)
                used |= 1 << y
            for m in chain[1:]:
                if not reach[x] >> m & 1:
                    return {"class": r, "chain": list(inst.names(chain)), "unreached": inst.vertices[m]}
    return None


def _lemma_class_semikernel(inst: Instance, rng):
    p = inst.require_partition()
    n = len(inst.vertices)
    for r in range(1, p.k + 1):
        flt = ArcFilter.cls(r)
        reach = reach_masks(inst, flt)
        verts = inst.filter_vertices(flt)
        for start in verts:
            try:
                _escape_chain(reach, reach, [start], n)
            except PipelineError:
                return {"class": r, "endless_chain_from": inst.vertices[start]}
        if not any(is_h_semikernel(inst, [inst.vertices[x]], flt) for x in verts):
            return {"class": r, "no_singleton_semikernel": True}
    return None


def _lemma_cyclic_chain(inst: Instance, rng):
    reach = reach_masks(inst, ALL)
    out, hn, cc = inst.out_arcs(ALL), inst.hnext, inst.color_class
    n = len(inst.vertices)
    arc_id, arcs = inst.arc_id, inst.arc_list
    for length in (2, 3):
        for seq in itertools.permutations(range(n), length):
            if seq[0] != min(seq):
                continue
            if not all(reach[seq[i]] >> seq[(i + 1) % length] & 1 for i in range(length)):
                continue
            classes = set()
            for i in range(length):
                path = _find_path(out, hn, seq[i], seq[(i + 1) % length])
                classes |= {cc[arcs[arc_id[(a, b)]][2]] for a, b in zip(path, path[1:])}
            if len(classes) > 1:
                return {"sequence": list(inst.names(seq)), "classes": sorted(classes)}
    return None


def _escape_relation_cycle(inst: Instance, flt_fwd: ArcFilter, flt_back: ArcFilter):
    fwd, back = reach_masks(inst, flt_fwd), reach_masks(inst, flt_back)
    n = len(inst.vertices)
    rel = [(x, y) for x in range(n) for y in _bits(fwd[x]) if not back[y] >> x & 1]
    return find_cycle(range(n), rel, min_length=2)


def _lemma_no_escape_sequence(inst: Instance, rng):
    cyc = _escape_relation_cycle(inst, ALL, ALL)
    if cyc is not None:
        return {"escape_cycle": list(inst.names(cyc))}
    if not any(is_h_semikernel(inst, [v]) for v in inst.vertices):
        return {"no_singleton_semikernel_of_D": True}
    return None


def _lemma_mod_d2_semikernel(inst: Instance, rng):
    if not any(is_h_semikernel_mod_d2(inst, [v]) for v in inst.vertices):
        return {"no_singleton_semikernel_mod_d2": True}
    x = find_singleton_semikernel(inst, "mod-d2")
    if not is_h_semikernel_mod_d2(inst, [x]):
        return {"bad_singleton": x}
    return None


def _lemma_semikernel_digraph_acyclic(inst: Instance, rng):
    dsk = build_semikernel_digraph(inst)
    if len(dsk) == 0:
        return {"empty_family": True}
    cyc = dsk.find_cycle()
    if cyc is not None:
        return {"cycle": [list(dsk.nodes[i]) for i in cyc]}
    return None


def enumerate_h_walks(inst: Instance, max_len: int, cap: int = 2_000_000) -> Iterator[tuple[int, ...]]:
    """Arc-index sequences of every H-walk with 1..max_len arcs."""
    arcs, hn = inst.arc_list, inst.hnext
    by_tail: list[list[int]] = [[] for _ in inst.vertices]
    for a, (t, _, _) in enumerate(arcs):
        by_tail[t].append(a)
    count = 0
    stack = [(a,) for a in range(len(arcs))]
    while stack:
        walk = stack.pop()
        count += 1
        if count > cap:
            from .model import CapExceeded

            raise CapExceeded("enumerated H-walks", cap, count - 1)
        yield walk
        if len(walk) < max_len:
            _, h, c = arcs[walk[-1]]
            for b in by_tail[h]:
                if hn[c] >> arcs[b][2] & 1:
                    stack.append(walk + (b,))


def _lemma_side_walks(inst: Instance, rng):
    arcs, cs, cc = inst.arc_list, inst.color_side, inst.color_class
    for walk in enumerate_h_walks(inst, len(inst.vertices)):
        sides = {cs[arcs[a][2]] for a in walk}
        classes = {cc[arcs[a][2]] for a in walk}
        if len(sides) > 1 or len(classes) > 1:
            seq = [arcs[walk[0]][0]] + [arcs[a][1] for a in walk]
            return {"walk": list(inst.names(seq)), "sides": sorted(sides), "classes": sorted(classes)}
    return None


def _color_profiles(inst: Instance, flt: ArcFilter) -> dict[tuple[int, int], set[tuple[int, int]]]:
    """``(s, t) -> {(first color, last color)}`` over all st-H-paths inside ``flt``."""
    out, hn = inst.out_arcs(flt), inst.hnext
    prof: dict[tuple[int, int], set[tuple[int, int]]] = {}
    for s in range(len(inst.vertices)):
        seen = set()
        stack = []
        for h, c in out[s]:
            st = (h, c, c, (1 << s) | (1 << h))
            seen.add(st)
            stack.append(st)
        while stack:
            v, first, last, m = stack.pop()
            prof.setdefault((s, v), set()).add((first, last))
            for h, c2 in out[v]:
                if not m >> h & 1 and hn[last] >> c2 & 1:
                    st = (h, first, c2, m | (1 << h))
                    if st not in seen:
                        seen.add(st)
                        stack.append(st)
    return prof


def _lemma_subdivision_dichotomy(inst: Instance, rng):
    from .hypotheses import enumerate_p3_subdivisions, find_c3_subdivision

    n = len(inst.vertices)
    hn = inst.hnext
    p1, p2, p3 = _color_profiles(inst, D1), _color_profiles(inst, ALL), _color_profiles(inst, D2)
    reach = reach_masks(inst, ALL)
    has_c3 = None
    p3_ends = None
    for u, z, w, x in itertools.product(range(n), repeat=4):
        if len({u, z, w}) < 3 or len({x, z, w}) < 3:
            continue
        if reach[u] >> w & 1 or reach[z] >> x & 1 or reach[z] >> u & 1:
            continue
        a1, a2, a3 = p1.get((u, z)), p2.get((z, w)), p3.get((w, x))
        if not (a1 and a2 and a3):
            continue
        lasts1 = {l for _, l in a1}
        firsts3 = {f for f, _ in a3}
        if not any(
            not hn[l1] >> f2 & 1 and not hn[l2] >> f3 & 1
            for l1 in lasts1 for f2, l2 in a2 for f3 in firsts3
        ):
            continue
        if has_c3 is None:
            has_c3 = find_c3_subdivision(inst) is not None
            p3_ends = {w_.endpoints for w_ in enumerate_p3_subdivisions(inst)}
        if has_c3 or (inst.vertices[u], inst.vertices[x]) in p3_ends:
            continue
        return {"u": inst.vertices[u], "z": inst.vertices[z], "w": inst.vertices[w], "x": inst.vertices[x]}
    return None


@dataclass(frozen=True)
class _Lemma:
    name: str
    description: str
    hypotheses: Callable[[Instance], bool]
    conclusion: Callable[[Instance, np.random.Generator], dict | None]


LEMMAS: dict[str, _Lemma] = {
    lem.name: lem
    for lem in (
        _Lemma(
            "chain-closure",
            "in a class subdigraph transitive by H-paths, a chain of H-paths from x0 gives x0 an H-path to every later vertex",
            lambda i: bool(check_one(i, "T")), _lemma_chain_closure,
        ),
        _Lemma(
            "class-semikernel",
            "a transitive class subdigraph has no endless escape chain and has a singleton H-semikernel",
            lambda i: bool(check_one(i, "T")), _lemma_class_semikernel,
        ),
        _Lemma(
            "cyclic-chain",
            "with all cycles and H-walks of D class-uniform, H-paths around a cyclic sequence share one class",
            _classes_uniform_globally, _lemma_cyclic_chain,
        ),
        _Lemma(
            "no-escape-sequence",
            "with all cycles and H-walks of D class-uniform, escape chains end and D has a singleton H-semikernel",
            _classes_uniform_globally, _lemma_no_escape_sequence,
        ),
        _Lemma(
            "mod-d2-semikernel",
            "hypotheses T, 1, 2 give a singleton H-semikernel modulo D2",
            lambda i: _all_pass(i, ("T", "1", "2")), _lemma_mod_d2_semikernel,
        ),
        _Lemma(
            "semikernel-digraph-acyclic",
            "hypotheses T, 1, 2 make the semikernel digraph nonempty and acyclic",
            lambda i: _all_pass(i, ("T", "1", "2")), _lemma_semikernel_digraph_acyclic,
        ),
        _Lemma(
            "side-walks",
            "hypotheses 2, 3 put every H-walk inside one side and one class",
            lambda i: _all_pass(i, ("2", "3")), _lemma_side_walks,
        ),
        _Lemma(
            "subdivision-dichotomy",
            "hypotheses 1, 2, 3 and an obstructed D1/D/D2 chain without shortcuts force a P3- or C3-subdivision",
            lambda i: _all_pass(i, ("T", "1", "2", "3")), _lemma_subdivision_dichotomy,
        ),
    )
}

LEMMA_CONFIGS: dict[str, GeneratorConfig] = {
    name: GeneratorConfig(vertices=(3, 7), colors=(2, 5), k=(2, 4), pattern_density=(0.0, 0.8))
    for name in LEMMAS
}


def _violates(lemma: _Lemma, inst: Instance, seed: int, trial: int, sabotage: bool) -> dict | None:
    if not sabotage and not lemma.hypotheses(inst):
        return None
    return lemma.conclusion(inst, np.random.default_rng([seed, trial, 1]))


def minimize_reproducer(inst: Instance, still_bad: Callable[[Instance], bool]) -> Instance:
    """Greedy arc deletion (then vertex deletion) preserving ``still_bad``."""
    current = inst
    changed = True
    while changed:
        changed = False
        for arc in sorted(current.digraph.coloring):
            coloring = {a: c for a, c in current.digraph.coloring.items() if a != arc}
            touched = {v for a in coloring for v in a}
            verts = tuple(v for v in current.vertices if v in touched)
            try:
                cand = Instance(current.pattern, ColoredDigraph(verts, coloring), current.partition)
            except InstanceError:
                continue
            try:
                ok = still_bad(cand)
            except Exception:
                ok = False
            if ok:
                current, changed = cand, True
                break
    return current


def run_lemma_campaign(
    lemma: str,
    trials: int,
    config: GeneratorConfig | None = None,
    sabotage: bool = False,
    reproducer_dir: str | os.PathLike | None = None,
    target_qualifying: int | None = None,
) -> CampaignReport:
    """Check a lemma's conclusion on every generated instance meeting its hypotheses.

    ``sabotage=True`` skips the hypothesis filter, which should produce
    violations and so demonstrates that the campaign can detect them.
    With ``target_qualifying`` set, generation continues (up to ``trials``
    draws) only until that many qualifying instances were seen.
    """
    if lemma not in LEMMAS:
        raise ValueError(f"unknown lemma {lemma!r}; choose from {', '.join(LEMMAS)}")
    lem = LEMMAS[lemma]
    cfg = config or LEMMA_CONFIGS[lemma]
    report = CampaignReport(lemma)
    for t in range(trials):
        rng = np.random.default_rng([cfg.seed, t])
        inst = None
        for _ in range(cfg.max_attempts):
            inst = _sample(cfg, rng)
            if inst is not None:
                break
        if inst is None:
            continue
        report.trials += 1
        if not sabotage and not lem.hypotheses(inst):
            continue
        report.qualifying += 1
        bad = lem.conclusion(inst, np.random.default_rng([cfg.seed, t, 1]))
        if bad is not None:
            report.violations += 1
            if len(report.examples) < 5:
                small = minimize_reproducer(
                    inst, lambda c: _violates(lem, c, cfg.seed, t, sabotage) is not None
                )
                report.examples.append({"trial": t, "violation": bad, "instance": to_raw(small)})
                if reproducer_dir is not None:
                    os.makedirs(reproducer_dir, exist_ok=True)
                    path = os.path.join(os.fspath(reproducer_dir), f"{lemma}-seed{cfg.seed}-trial{t}.json")
                    with open(path, "w", encoding="utf-8") as fh:
                        fh.write(serialize(small))
                    report.reproducers.append(path)
        if target_qualifying is not None and report.qualifying >= target_qualifying:
            break
    return report


# --------------------------------------------------------------------------
# tightness search


_FIG_SIZES = dict(arc_density=(0.15, 0.45), pattern_density=(0.0, 0.5))

TIGHTNESS_PRESETS: dict[str, GeneratorConfig] = {
    # six singleton classes, three per side
    "1": GeneratorConfig(vertices=(4, 7), colors=(6, 6), k=(6, 6), side1=(1, 2, 3), **_FIG_SIZES),
    # three classes, the first two on side 1
    "2": GeneratorConfig(vertices=(3, 7), colors=(3, 5), k=(3, 3), side1=(1, 2), **_FIG_SIZES),
    # seven singleton classes, four on side 1
    "3": GeneratorConfig(vertices=(4, 7), colors=(7, 7), k=(7, 7), side1=(1, 2, 3, 4), **_FIG_SIZES),
    # three classes, the first two on side 1
    "4": GeneratorConfig(vertices=(3, 7), colors=(3, 5), k=(3, 3), side1=(1, 2), **_FIG_SIZES),
    # three classes, the first and third on side 1
    "5": GeneratorConfig(vertices=(3, 7), colors=(3, 5), k=(3, 3), side1=(1, 3), **_FIG_SIZES),
}
CONTROL_PRESETS: tuple[GeneratorConfig, ...] = tuple(TIGHTNESS_PRESETS[h] for h in "12345")

#: evaluation order of the search's conditions, cheapest first ("K": no H-kernel)
_CHEAP_ORDER = ("3", "2", "K", "T", "1", "4", "5")
#: length of one local-search chain; trial t is step t % CHAIN of chain t // CHAIN
CHAIN = 200


@dataclass(frozen=True)
class TightnessResult:
    dropped: str | None
    trial: int
    seed: int
    instance: Instance
    verdicts: tuple[dict, ...]
    subsets_checked: int

    def to_dict(self) -> dict:
        return {
            "dropped": self.dropped,
            "trial": self.trial,
            "seed": self.seed,
            "instance": to_raw(self.instance),
            "verdicts": list(self.verdicts),
            "subsets_checked": self.subsets_checked,
            "kernel_exists": False,
        }


def _has_kernel(inst: Instance) -> bool:
    return find_h_kernel_bruteforce(inst) is not None


def _unmet(inst: Instance, drop: str | None, bound: int) -> int:
    """Number of unmet search conditions, counting stops once it exceeds ``bound``."""
    bad = 0
    for step in _CHEAP_ORDER:
        if step == "K":
            ok = not _has_kernel(inst)
        elif step == drop:
            ok = not check_one(inst, step)
        else:
            ok = bool(check_one(inst, step))
        if not ok:
            bad += 1
            if bad > bound:
                return bad
    return bad


def _mutate(inst: Instance, rng: np.random.Generator) -> Instance | None:
    """A random neighbour: toggle an arc of D, recolor an arc, or toggle an arc of H."""
    names = inst.vertices
    colors = inst.pattern.vertices
    coloring = dict(inst.digraph.coloring)
    h_arcs = set(inst.pattern.arcs)
    move = rng.random()
    if move < 0.4:
        n = len(names)
        i = int(rng.integers(n))
        j = int(rng.integers(n - 1))
        j += j >= i
        arc = (names[i], names[j])
        if arc in coloring:
            del coloring[arc]
        else:
            coloring[arc] = colors[int(rng.integers(len(colors)))]
    elif move < 0.75:
        arcs = sorted(coloring)
        arc = arcs[int(rng.integers(len(arcs)))]
        coloring[arc] = colors[int(rng.integers(len(colors)))]
    else:
        a = colors[int(rng.integers(len(colors)))]
        b = colors[int(rng.integers(len(colors)))]
        h_arcs ^= {(a, b)}
    touched = {v for arc in coloring for v in arc}
    if len(touched) < len(names):
        return None
    try:
        return Instance(PatternDigraph(colors, frozenset(h_arcs)), ColoredDigraph(names, dict(sorted(coloring.items()))), inst.partition)
    except InstanceError:
        return None


def _trial_config(drop: str | None, base: GeneratorConfig | None, chain: int) -> GeneratorConfig:
    if base is not None:
        return base
    if drop is None:
        return CONTROL_PRESETS[chain % len(CONTROL_PRESETS)]
    return TIGHTNESS_PRESETS[drop]


def _run_chain(drop: str | None, base: GeneratorConfig | None, seed: int, chain: int, steps: int):
    """Local search from a random instance, minimising the unmet conditions.

    Step 0 evaluates the starting instance; every later step evaluates one
    mutation and keeps it when it is not worse.  Returns ``(step, instance)``
    for the first instance meeting every condition, else ``None``.
    """
    cfg = _trial_config(drop, base, chain)
    rng = np.random.default_rng([seed, chain])
    current = None
    for _ in range(50):
        current = _sample(cfg, rng)
        if current is not None:
            break
    if current is None:
        return None
    score = _unmet(current, drop, len(_CHEAP_ORDER))
    if score == 0:
        return 0, current
    for step in range(1, steps):
        cand = _mutate(current, rng)
        if cand is None:
            continue
        got = _unmet(cand, drop, score)
        if got == 0:
            return step, cand
        if got <= score:
            current, score = cand, got
    return None


def _scan(args) -> tuple[int, Instance] | None:
    drop, base, seed, lo, hi, chain_len = args
    for c in range(lo // chain_len, -(-hi // chain_len)):
        steps = min(chain_len, hi - c * chain_len)
        got = _run_chain(drop, base, seed, c, steps)
        if got is not None:
            return c * chain_len + got[0], got[1]
    return None


def search_tightness(
    drop: str | None,
    budget: int,
    config: GeneratorConfig | None = None,
    seed: int = 0,
    jobs: int = 1,
    chunk: int = 50 * CHAIN,
) -> TightnessResult | None:
    """Randomized local search for a tightness example.

    Looks for an instance passing every hypothesis except ``drop``, failing
    ``drop``, and without an H-kernel; ``budget`` counts evaluated instances.
    ``drop=None`` is the control run: it looks for an instance passing all
    hypotheses without an H-kernel, which cannot exist.  Returns the lowest
    trial index found, or ``None`` when the budget is exhausted; the answer
    does not depend on ``jobs``.
    """
    if drop is not None and drop not in ("1", "2", "3", "4", "5"):
        raise ValueError("drop must be one of 1..5 or None")
    chunk = max(CHAIN, chunk - chunk % CHAIN)
    ranges = [(drop, config, seed, lo, min(lo + chunk, budget), CHAIN) for lo in range(0, budget, chunk)]
    hit = None
    if jobs <= 1:
        for r in ranges:
            hit = _scan(r)
            if hit is not None:
                break
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for got in pool.map(_scan, ranges):
                if got is not None:
                    hit = got
                    break
            pool.shutdown(cancel_futures=True)
    if hit is None:
        return None
    t, inst = hit
    verdicts = tuple(v.to_dict() for v in check_all(inst))
    return TightnessResult(drop, t, seed, inst, verdicts, 2 ** len(inst.vertices))


def recertify(result: TightnessResult | dict) -> dict:
    """Re-check a tightness certificate from its serialized instance alone.

    Kernel absence is re-established by testing every subset of ``V(D)``
    with the definitional kernel predicate.
    """
    raw = result.to_dict() if isinstance(result, TightnessResult) else result
    inst = deserialize(dumps_canonical(raw["instance"]), require_partition=True)
    verdicts = {v.hypothesis: bool(v) for v in check_all(inst)}
    drop = raw["dropped"]
    others_ok = all(ok for h, ok in verdicts.items() if h != drop)
    dropped_fails = drop is not None and not verdicts[drop]
    vs = inst.vertices
    kernels = [
        s for r in range(len(vs) + 1) for s in itertools.combinations(vs, r) if is_h_kernel(inst, s)
    ]
    return {
        "verdicts": verdicts,
        "others_pass": others_ok,
        "dropped_fails": dropped_fails,
        "kernel_free": not kernels,
        "valid": others_ok and dropped_fails and not kernels,
    }
