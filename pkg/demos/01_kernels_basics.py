"""H-paths, H-walks and H-kernels on hand-made digraphs.

Run with ``python3 demos/01_kernels_basics.py``.
"""
from hkernel import (
    find_h_kernel_bruteforce, h_path, h_walk, is_h_kernel, make_instance, obstructions,
)

# A directed triangle whose arcs all carry color 1.  With no arcs in H, only
# single arcs count as H-paths, so the triangle has no H-kernel at all.
triangle = make_instance(["1"], [], list("abc"), [("a", "b", "1"), ("b", "c", "1"), ("c", "a", "1")])
print("triangle, H empty:", find_h_kernel_bruteforce(triangle))

# Allow the transition 1 -> 1 and every path is an H-path; now any single
# vertex absorbs the rest.
looped = make_instance(["1"], [("1", "1")], list("abc"), [("a", "b", "1"), ("b", "c", "1"), ("c", "a", "1")])
print("triangle, H = {1->1}:", find_h_kernel_bruteforce(looped, all_kernels=True))

# Obstructions are the interior positions where consecutive colors are not
# an arc of H.  A walk can succeed where every path fails.
walky = make_instance(
    ["1", "2", "3", "4"], [("4", "2"), ("2", "1"), ("1", "3")], list("abcd"),
    [("a", "b", "4"), ("b", "c", "2"), ("c", "b", "1"), ("b", "d", "3")],
)
print("obstructions of a-b-d:", sorted(obstructions(walky, "abd")))
print("H-path a->d:", h_path(walky, "a", "d"))
print("H-walk a->d:", h_walk(walky, "a", "d"))

# Verdicts carry their evidence.
report = is_h_kernel(triangle, ["a"])
print("is {a} a kernel of the triangle?", bool(report), report.kind, dict(report.payload))
