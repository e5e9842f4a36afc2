"""Special patterns: monochromatic paths, properly colored paths, rainbow paths.

Each corollary reduces to the general machinery with a fixed pattern H:
loops only (monochromatic), the complete digraph without loops (properly
colored), plus an acyclicity condition for rainbow reachability.
"""
from hkernel import ColoredDigraph, color_class_digraph, find_h_kernel_bruteforce, is_bipartite
from hkernel.corollaries import (
    CorollaryPreconditionError, mp_instance, mp_kernel_via_bipartite_ccd, pcp_instance,
    pcp_kernel_via_transitive_classes, rainbow_kernel,
)

# Colors 1 and 2 alternate around a 4-cycle, so the color-class digraph is
# the 2-cycle 1 <-> 2 (bipartite).  A chord a->c of a third color would
# close the odd cycle 1 -> 2 -> 3 -> 1 and void the precondition.
square = ColoredDigraph.build(
    "abcd", [("a", "b", "1"), ("b", "c", "2"), ("c", "d", "1"), ("d", "a", "2")]
)
mp = mp_instance(square)
print("mp: color-class digraph bipartite:", is_bipartite(color_class_digraph(mp)))
print("mp: kernel by monochromatic paths:", mp_kernel_via_bipartite_ccd(square))
print("mp: brute force agrees:", find_h_kernel_bruteforce(mp, all_kernels=True))

# Transitive color classes: every two-arc path of one color is closed by an
# arc of the same color.
trans = ColoredDigraph.build(
    "abcde",
    [("a", "b", "1"), ("b", "c", "1"), ("a", "c", "1"), ("c", "d", "2"), ("d", "e", "3"), ("e", "a", "2")],
)
print("pcp: kernel by properly colored paths:", pcp_kernel_via_transitive_classes(trans))
print("pcp: brute force:", find_h_kernel_bruteforce(pcp_instance(trans), all_kernels=True))

# Rainbow paths need, in addition, a color-class digraph with no cycle of
# length two or more.  The digraph above has the cycle 2 -> 3 -> 2 ...
try:
    rainbow_kernel(trans)
except CorollaryPreconditionError as exc:
    print("rainbow on the previous digraph:", exc)

# ... while a chain of colors 1 -> 2 -> 3 qualifies.
chain = ColoredDigraph.build(
    "abcde", [("a", "b", "1"), ("b", "c", "1"), ("a", "c", "1"), ("c", "d", "2"), ("d", "e", "3")]
)
print("rainbow kernel:", rainbow_kernel(chain))
