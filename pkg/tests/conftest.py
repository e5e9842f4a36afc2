from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hkernel import make_instance

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

NAMES = "abcdefghij"

# criterion lines collected by the acceptance suite, echoed in the summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@st.composite
def instances(draw, min_n=2, max_n=6, max_colors=4, partition=True, max_k=4):
    """A small H-colored digraph, optionally with a valid chromatic partition.

    Built directly from draws (not via the package's own generator), so the
    tests do not inherit its sampling biases.
    """
    n = draw(st.integers(min_n, max_n))
    vs = list(NAMES[:n])
    m = draw(st.integers(2 if partition else 1, max_colors))
    colors = [str(i) for i in range(1, m + 1)]
    pairs = [(a, b) for a in vs for b in vs if a != b]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=min(len(pairs), 3 * n), unique=True))
    arcs = [(t, h, draw(st.sampled_from(colors))) for t, h in chosen]
    hpairs = [(a, b) for a in colors for b in colors]
    harcs = draw(st.lists(st.sampled_from(hpairs), max_size=len(hpairs), unique=True))
    if not partition:
        return make_instance(colors, harcs, vs, arcs)
    used = sorted({c for _, _, c in arcs})
    if len(used) < 2:
        # recolor one arc so that at least two colors appear
        t, h, c = arcs[0]
        other = colors[1] if c == colors[0] else colors[0]
        if len(arcs) == 1:
            rest = [p for p in pairs if p != (t, h)]
            t2, h2 = draw(st.sampled_from(rest))
            arcs.append((t2, h2, other))
        else:
            arcs[0] = (t, h, other)
        used = sorted({c for _, _, c in arcs})
    k = draw(st.integers(2, min(len(used), max_k)))
    order = draw(st.permutations(used))
    classes = [[c] for c in order[:k]]
    for c in colors:
        if c not in order[:k]:
            classes[draw(st.integers(0, k - 1))].append(c)
    n1 = draw(st.integers(1, k - 1))
    idx = draw(st.permutations(range(1, k + 1)))
    return make_instance(colors, harcs, vs, arcs, classes=classes, side1=idx[:n1], side2=idx[n1:])
