"""Instance data model: pattern digraph, colored digraph, chromatic partition.

An :class:`Instance` bundles the pattern ``H`` (colors, loops allowed), the
loopless arc-colored digraph ``D`` and, optionally, a chromatic partition of
the colors together with its split into two sides.  Instances are immutable;
derived views (integer indexing, class and side membership of arcs) are
computed lazily and cached on first use.
"""
from __future__ import annotations

import contextlib
import contextvars
import json
import os
import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Iterable, Iterator, Mapping, Sequence


class InstanceError(ValueError):
    """Raised for structurally invalid instance data.

    ``code`` is a short stable identifier (``"loop"``, ``"duplicate-arc"``...)
    so callers can branch on the failure without parsing the message.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class InstanceFormatError(InstanceError):
    """Raised when instance text cannot be parsed."""


class CapExceeded(RuntimeError):
    """An exhaustive enumeration would exceed a configured cap."""

    def __init__(self, what: str, limit: int, seen: int | None = None):
        msg = f"{what} exceeds cap {limit}"
        if seen is not None:
            msg += f" (stopped after {seen})"
        super().__init__(msg)
        self.what = what
        self.limit = limit
        self.seen = seen


class IsolatedVertexWarning(UserWarning):
    pass


# --------------------------------------------------------------------------
# caps

ENV_PREFIX = "HKERNEL_"


@dataclass(frozen=True)
class Caps:
    """Hard limits for exhaustive work.  Exceeding one raises :class:`CapExceeded`."""

    max_vertices: int = 14          # path / cycle enumeration
    max_subset_vertices: int = 20   # subset enumeration
    max_cycles: int = 10**6
    max_paths: int = 10**6

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None) -> "Caps":
        environ = os.environ if environ is None else environ
        kwargs = {}
        for name in cls.__dataclass_fields__:
            raw = environ.get(ENV_PREFIX + name.upper())
            if raw is not None:
                kwargs[name] = int(raw)
        return cls(**kwargs)


_caps_var: contextvars.ContextVar[Caps | None] = contextvars.ContextVar("hkernel_caps", default=None)


def get_caps() -> Caps:
    caps = _caps_var.get()
    return caps if caps is not None else Caps.from_env()


@contextlib.contextmanager
def use_caps(caps: Caps | None = None, **overrides: int) -> Iterator[Caps]:
    """Temporarily install caps for the current context."""
    base = caps if caps is not None else get_caps()
    new = replace(base, **overrides) if overrides else base
    token = _caps_var.set(new)
    try:
        yield new
    finally:
        _caps_var.reset(token)


# --------------------------------------------------------------------------
# core types


@dataclass(frozen=True)
class PatternDigraph:
    """The pattern ``H``: its vertices are the colors; loops are allowed."""

    vertices: tuple[str, ...]
    arcs: frozenset[tuple[str, str]]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise InstanceError("duplicate-vertex", f"duplicate color in pattern: {_first_dup(self.vertices)!r}")
        vs = set(self.vertices)
        for a, b in self.arcs:
            if a not in vs or b not in vs:
                raise InstanceError("unknown-color", f"pattern arc ({a}, {b}) uses an undeclared color")

    @classmethod
    def build(cls, vertices: Iterable[str], arcs: Iterable[Sequence[str]]) -> "PatternDigraph":
        arcs = [tuple(a) for a in arcs]
        if len(set(arcs)) != len(arcs):
            raise InstanceError("duplicate-arc", f"duplicate pattern arc {_first_dup(arcs)}")
        return cls(tuple(sorted(vertices)), frozenset(arcs))

    def sorted_arcs(self) -> list[tuple[str, str]]:
        return sorted(self.arcs)

    def has_arc(self, a: str, b: str) -> bool:
        return (a, b) in self.arcs


ColorClassDigraph = PatternDigraph


@dataclass(frozen=True)
class ColoredDigraph:
    """A loopless digraph ``D`` with a total arc coloring."""

    vertices: tuple[str, ...]
    coloring: Mapping[tuple[str, str], str]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise InstanceError("duplicate-vertex", f"duplicate vertex: {_first_dup(self.vertices)!r}")
        vs = set(self.vertices)
        for (t, h) in self.coloring:
            if t == h:
                raise InstanceError("loop", f"loop in D: ({t}, {h})")
            if t not in vs or h not in vs:
                raise InstanceError("unknown-vertex", f"arc ({t}, {h}) uses an undeclared vertex")

    @classmethod
    def build(cls, vertices: Iterable[str], arcs: Iterable[tuple[str, str, str]]) -> "ColoredDigraph":
        coloring: dict[tuple[str, str], str] = {}
        for t, h, c in arcs:
            if t == h:
                raise InstanceError("loop", f"loop in D: ({t}, {h})")
            if (t, h) in coloring:
                raise InstanceError("duplicate-arc", f"duplicate arc ({t}, {h})")
            coloring[(t, h)] = c
        return cls(tuple(sorted(vertices)), dict(sorted(coloring.items())))

    @property
    def arcs(self) -> list[tuple[str, str]]:
        return list(self.coloring)

    def color(self, tail: str, head: str) -> str:
        return self.coloring[(tail, head)]

    def colors_used(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.coloring.values())))

    def __hash__(self):
        return hash((self.vertices, tuple(self.coloring.items())))

    def __eq__(self, other):
        if not isinstance(other, ColoredDigraph):
            return NotImplemented
        return self.vertices == other.vertices and dict(self.coloring) == dict(other.coloring)


@dataclass(frozen=True)
class ChromaticPartition:
    """Partition of the colors into classes ``C_1..C_k`` and of the class
    indices (1-based) into two nonempty sides."""

    classes: tuple[tuple[str, ...], ...]
    side1: frozenset[int]
    side2: frozenset[int]

    def __post_init__(self):
        k = len(self.classes)
        if k < 2:
            raise InstanceError("too-few-classes", f"partition needs k >= 2 classes, got {k}")
        seen: set[str] = set()
        for i, cls_ in enumerate(self.classes, 1):
            if not cls_:
                raise InstanceError("malformed-partition", f"class {i} is empty")
            for c in cls_:
                if c in seen:
                    raise InstanceError("malformed-partition", f"color {c!r} appears in more than one class")
                seen.add(c)
        if not self.side1 or not self.side2:
            raise InstanceError("empty-side", "both sides of the partition must be nonempty")
        if self.side1 & self.side2:
            raise InstanceError("malformed-partition", "sides overlap")
        if self.side1 | self.side2 != set(range(1, k + 1)):
            raise InstanceError("malformed-partition", f"sides must cover exactly the class indices 1..{k}")

    @classmethod
    def build(cls, classes: Iterable[Iterable[str]], side1: Iterable[int], side2: Iterable[int]) -> "ChromaticPartition":
        return cls(tuple(tuple(sorted(c)) for c in classes), frozenset(side1), frozenset(side2))

    @property
    def k(self) -> int:
        return len(self.classes)

    def side_of_class(self, i: int) -> int:
        return 1 if i in self.side1 else 2


@dataclass(frozen=True)
class WitnessReport:
    """A verdict plus the evidence behind it.

    Truthiness follows the verdict, so ``if is_h_kernel(inst, s):`` reads
    naturally while the payload stays available for reporting.
    """

    passed: bool
    kind: str
    payload: Mapping[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {"verdict": "pass" if self.passed else "fail", "kind": self.kind, "payload": _jsonable(self.payload)}


# --------------------------------------------------------------------------
# filters


@dataclass(frozen=True, order=True)
class ArcFilter:
    """Restricts paths and walks to a subset of the arcs of ``D``.

    ``kind`` is ``"all"``, ``"side"`` (``index`` 1 or 2) or ``"class"``
    (``index`` 1..k).
    """

    kind: str = "all"
    index: int = 0

    @classmethod
    def side(cls, i: int) -> "ArcFilter":
        if i not in (1, 2):
            raise ValueError(f"side must be 1 or 2, got {i}")
        return cls("side", i)

    @classmethod
    def cls(cls, i: int) -> "ArcFilter":
        return cls("class", i)

    @classmethod
    def parse(cls, text: str) -> "ArcFilter":
        t = text.strip().lower()
        if t in ("all", "d"):
            return ALL
        if t in ("d1", "side1"):
            return D1
        if t in ("d2", "side2"):
            return D2
        if t.startswith("g") and t[1:].isdigit():
            return cls.cls(int(t[1:]))
        raise ValueError(f"unknown arc filter {text!r} (use all, d1, d2 or g<i>)")

    def __str__(self) -> str:
        if self.kind == "all":
            return "all"
        return f"d{self.index}" if self.kind == "side" else f"g{self.index}"


ALL = ArcFilter()
D1 = ArcFilter("side", 1)
D2 = ArcFilter("side", 2)


# --------------------------------------------------------------------------
# instance


@dataclass(frozen=True, eq=False)
class Instance:
    pattern: PatternDigraph
    digraph: ColoredDigraph
    partition: ChromaticPartition | None = None

    def __post_init__(self):
        colors = set(self.pattern.vertices)
        for (t, h), c in self.digraph.coloring.items():
            if c not in colors:
                raise InstanceError("unknown-color", f"arc ({t}, {h}) has color {c!r} outside V(H)")
        if self.partition is not None:
            covered = [c for cls_ in self.partition.classes for c in cls_]
            if set(covered) != colors:
                extra = sorted(set(covered) - colors)
                missing = sorted(colors - set(covered))
                raise InstanceError(
                    "malformed-partition",
                    f"classes must partition V(H) (unknown: {extra}, missing: {missing})",
                )
            used = set(self.digraph.coloring.values())
            for i, cls_ in enumerate(self.partition.classes, 1):
                if not used.intersection(cls_):
                    raise InstanceError("empty-class", f"empty chromatic class: no arc of D has a color in C{i}")

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.pattern, self.digraph, self.partition) == (other.pattern, other.digraph, other.partition)

    def __hash__(self):
        return hash((self.pattern, self.digraph, self.partition))

    # -- basic accessors -------------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.digraph.vertices

    def color(self, tail: str, head: str) -> str:
        return self.digraph.coloring[(tail, head)]

    def require_partition(self) -> ChromaticPartition:
        if self.partition is None:
            raise InstanceError("missing-partition", "this operation needs a chromatic partition")
        return self.partition

    @cached_property
    def isolated_vertices(self) -> tuple[str, ...]:
        touched = {v for arc in self.digraph.coloring for v in arc}
        return tuple(v for v in self.vertices if v not in touched)

    # -- integer-indexed views (used by the algorithms) -------------------

    @cached_property
    def vindex(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def cindex(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.pattern.vertices)}

    @cached_property
    def arc_list(self) -> tuple[tuple[int, int, int], ...]:
        """Arcs as ``(tail, head, color)`` index triples in canonical order."""
        vi, ci = self.vindex, self.cindex
        return tuple(sorted((vi[t], vi[h], ci[c]) for (t, h), c in self.digraph.coloring.items()))

    @cached_property
    def arc_id(self) -> dict[tuple[int, int], int]:
        return {(t, h): a for a, (t, h, _) in enumerate(self.arc_list)}

    @cached_property
    def hnext(self) -> tuple[int, ...]:
        """``hnext[a]`` is the bitmask of colors ``b`` with ``(a, b)`` in A(H)."""
        ci = self.cindex
        masks = [0] * len(ci)
        for a, b in self.pattern.arcs:
            masks[ci[a]] |= 1 << ci[b]
        return tuple(masks)

    @cached_property
    def color_class(self) -> tuple[int, ...]:
        """1-based class index per color index (0 when no partition)."""
        out = [0] * len(self.cindex)
        if self.partition is not None:
            for i, cls_ in enumerate(self.partition.classes, 1):
                for c in cls_:
                    out[self.cindex[c]] = i
        return tuple(out)

    @cached_property
    def color_side(self) -> tuple[int, ...]:
        p = self.partition
        if p is None:
            return tuple(0 for _ in self.cindex)
        return tuple(p.side_of_class(i) for i in self.color_class)

    def arc_mask(self, flt: ArcFilter) -> tuple[bool, ...]:
        """Per-arc membership in the filter, cached per filter."""
        cache = self.__dict__.setdefault("_arc_masks", {})
        got = cache.get(flt)
        if got is None:
            if flt.kind == "all":
                got = tuple(True for _ in self.arc_list)
            elif flt.kind == "side":
                self.require_partition()
                side = self.color_side
                got = tuple(side[c] == flt.index for _, _, c in self.arc_list)
            elif flt.kind == "class":
                p = self.require_partition()
                if not 1 <= flt.index <= p.k:
                    raise IndexError(f"class index {flt.index} out of range 1..{p.k}")
                cc = self.color_class
                got = tuple(cc[c] == flt.index for _, _, c in self.arc_list)
            else:
                raise ValueError(f"unknown filter kind {flt.kind!r}")
            cache[flt] = got
        return got

    def out_arcs(self, flt: ArcFilter = ALL) -> tuple[tuple[tuple[int, int], ...], ...]:
        """``out[v]`` = ``((head, color), ...)`` for filtered arcs, heads ascending."""
        cache = self.__dict__.setdefault("_out_arcs", {})
        got = cache.get(flt)
        if got is None:
            mask = self.arc_mask(flt)
            out: list[list[tuple[int, int]]] = [[] for _ in self.vertices]
            for a, (t, h, c) in enumerate(self.arc_list):
                if mask[a]:
                    out[t].append((h, c))
            got = tuple(tuple(x) for x in out)
            cache[flt] = got
        return got

    def filter_vertices(self, flt: ArcFilter) -> tuple[int, ...]:
        """Vertex indices of the filtered view: all of V(D) for spanning
        filters, arc endpoints for a class subdigraph."""
        if flt.kind != "class":
            return tuple(range(len(self.vertices)))
        mask = self.arc_mask(flt)
        vs = {x for a, (t, h, _) in enumerate(self.arc_list) if mask[a] for x in (t, h)}
        return tuple(sorted(vs))

    def names(self, idxs: Iterable[int]) -> tuple[str, ...]:
        vs = self.vertices
        return tuple(vs[i] for i in idxs)

    def mask_of(self, vertex_set: Iterable[str]) -> int:
        m = 0
        for v in vertex_set:
            try:
                m |= 1 << self.vindex[v]
            except KeyError:
                raise InstanceError("unknown-vertex", f"unknown vertex {v!r}") from None
        return m

    def names_of_mask(self, mask: int) -> tuple[str, ...]:
        return tuple(v for i, v in enumerate(self.vertices) if mask >> i & 1)

    def with_partition(self, partition: ChromaticPartition | None) -> "Instance":
        return Instance(self.pattern, self.digraph, partition)


# --------------------------------------------------------------------------
# derived subdigraph views


@dataclass(frozen=True)
class SubdigraphView:
    vertices: tuple[str, ...]
    arcs: tuple[tuple[str, str, str], ...]

    def arc_pairs(self) -> set[tuple[str, str]]:
        return {(t, h) for t, h, _ in self.arcs}


def class_subdigraph(instance: Instance, i: int) -> SubdigraphView:
    """The subdigraph induced by the arcs whose color lies in class ``i``."""
    p = instance.require_partition()
    if not 1 <= i <= p.k:
        raise IndexError(f"class index {i} out of range 1..{p.k}")
    flt = ArcFilter.cls(i)
    return _view(instance, flt, instance.names(instance.filter_vertices(flt)))


def side_subdigraph(instance: Instance, side: int) -> SubdigraphView:
    """Spanning subdigraph carrying the arcs of one side."""
    return _view(instance, ArcFilter.side(side), instance.vertices)


def _view(instance: Instance, flt: ArcFilter, vertices: tuple[str, ...]) -> SubdigraphView:
    mask = instance.arc_mask(flt)
    vs, cs = instance.vertices, instance.pattern.vertices
    arcs = tuple((vs[t], vs[h], cs[c]) for a, (t, h, c) in enumerate(instance.arc_list) if mask[a])
    return SubdigraphView(vertices, arcs)


# --------------------------------------------------------------------------
# validation and (de)serialization

_TOP_KEYS = {"pattern", "digraph", "partition"}
_PATTERN_KEYS = {"vertices", "arcs"}
_DIGRAPH_KEYS = {"vertices", "arcs"}
_ARC_KEYS = {"tail", "head", "color"}
_PARTITION_KEYS = {"classes", "side1", "side2"}


def _check_keys(obj: Any, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise InstanceError("bad-type", f"{where} must be an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise InstanceError("unknown-field", f"unknown field(s) in {where}: {', '.join(unknown)}")
    missing = sorted(required - set(obj))
    if missing:
        raise InstanceError("missing-field", f"missing field(s) in {where}: {', '.join(missing)}")


def _str_list(x: Any, where: str) -> list[str]:
    if not isinstance(x, list) or not all(isinstance(s, str) for s in x):
        raise InstanceError("bad-type", f"{where} must be a list of strings")
    return x


def validate(raw: Mapping[str, Any], *, require_partition: bool = False) -> Instance:
    """Build a validated :class:`Instance` from parsed (JSON-like) data.

    Isolated vertices are accepted with an :class:`IsolatedVertexWarning`.
    """
    _check_keys(raw, _TOP_KEYS, {"pattern", "digraph"} | ({"partition"} if require_partition else set()), "instance")

    pat = raw["pattern"]
    _check_keys(pat, _PATTERN_KEYS, _PATTERN_KEYS, "pattern")
    pverts = _str_list(pat["vertices"], "pattern.vertices")
    parcs = pat["arcs"]
    if not isinstance(parcs, list) or not all(
        isinstance(a, list) and len(a) == 2 and all(isinstance(s, str) for s in a) for a in parcs
    ):
        raise InstanceError("bad-type", "pattern.arcs must be a list of [color, color] pairs")
    pattern = PatternDigraph.build(pverts, parcs)

    dg = raw["digraph"]
    _check_keys(dg, _DIGRAPH_KEYS, _DIGRAPH_KEYS, "digraph")
    dverts = _str_list(dg["vertices"], "digraph.vertices")
    if not isinstance(dg["arcs"], list):
        raise InstanceError("bad-type", "digraph.arcs must be a list")
    arcs = []
    for n, a in enumerate(dg["arcs"]):
        _check_keys(a, _ARC_KEYS, _ARC_KEYS, f"digraph.arcs[{n}]")
        if not all(isinstance(a[k], str) for k in _ARC_KEYS):
            raise InstanceError("bad-type", f"digraph.arcs[{n}] fields must be strings")
        arcs.append((a["tail"], a["head"], a["color"]))
    digraph = ColoredDigraph.build(dverts, arcs)

    partition = None
    if raw.get("partition") is not None:
        part = raw["partition"]
        _check_keys(part, _PARTITION_KEYS, _PARTITION_KEYS, "partition")
        classes = part["classes"]
        if not isinstance(classes, list) or not all(isinstance(c, list) for c in classes):
            raise InstanceError("bad-type", "partition.classes must be a list of color lists")
        for c in classes:
            _str_list(c, "partition.classes[*]")
        for key in ("side1", "side2"):
            if not isinstance(part[key], list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in part[key]):
                raise InstanceError("bad-type", f"partition.{key} must be a list of integers")
            if len(set(part[key])) != len(part[key]):
                raise InstanceError("malformed-partition", f"partition.{key} repeats an index")
        partition = ChromaticPartition.build(classes, part["side1"], part["side2"])

    inst = Instance(pattern, digraph, partition)
    if inst.isolated_vertices:
        warnings.warn(
            f"isolated vertices: {', '.join(inst.isolated_vertices)}", IsolatedVertexWarning, stacklevel=2
        )
    return inst


def to_raw(instance: Instance) -> dict:
    out: dict[str, Any] = {
        "pattern": {
            "vertices": list(instance.pattern.vertices),
            "arcs": [list(a) for a in instance.pattern.sorted_arcs()],
        },
        "digraph": {
            "vertices": list(instance.digraph.vertices),
            "arcs": [
                {"tail": t, "head": h, "color": c}
                for (t, h), c in sorted(instance.digraph.coloring.items())
            ],
        },
    }
    if instance.partition is not None:
        p = instance.partition
        out["partition"] = {
            "classes": [list(c) for c in p.classes],
            "side1": sorted(p.side1),
            "side2": sorted(p.side2),
        }
    return out


def dumps_canonical(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def serialize(instance: Instance) -> str:
    """Canonical, byte-stable text for an instance."""
    return dumps_canonical(to_raw(instance))


def deserialize(text: str, *, require_partition: bool = False) -> Instance:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            "syntax", f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return validate(raw, require_partition=require_partition)


def load(path: str | os.PathLike, **kw) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return deserialize(fh.read(), **kw)


def save(instance: Instance, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(instance))


def make_instance(
    pattern_vertices: Iterable[str],
    pattern_arcs: Iterable[Sequence[str]],
    digraph_vertices: Iterable[str],
    arcs: Iterable[tuple[str, str, str]],
    classes: Iterable[Iterable[str]] | None = None,
    side1: Iterable[int] = (),
    side2: Iterable[int] = (),
) -> Instance:
    """Convenience constructor from Python values (no warning machinery)."""
    pattern = PatternDigraph.build(pattern_vertices, pattern_arcs)
    digraph = ColoredDigraph.build(digraph_vertices, arcs)
    partition = None if classes is None else ChromaticPartition.build(classes, side1, side2)
    return Instance(pattern, digraph, partition)


# --------------------------------------------------------------------------


def _first_dup(seq):
    seen = set()
    for x in seq:
        if x in seen:
            return x
        seen.add(x)
    return None


def _jsonable(x: Any) -> Any:
    if isinstance(x, Mapping):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (frozenset, set)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, WitnessReport):
        return x.to_dict()
    if hasattr(x, "to_dict"):
        return x.to_dict()
    return x
