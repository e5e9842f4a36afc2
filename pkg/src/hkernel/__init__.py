"""H-colored digraphs, H-kernels and sufficient conditions for their existence."""
from .model import (
    ALL, D1, D2, ArcFilter, Caps, CapExceeded, ChromaticPartition, ColorClassDigraph, ColoredDigraph,
    Instance, InstanceError, InstanceFormatError, IsolatedVertexWarning, PatternDigraph, WitnessReport,
    class_subdigraph, deserialize, get_caps, load, make_instance, save, serialize, side_subdigraph,
    use_caps, validate,
)
from .reachability import (
    WalkError, enumerate_h_paths, h_path, h_path_exists, h_walk, h_walk_exists, is_h_path, is_h_walk,
    obstructions,
)
from .structure import color_class_digraph, enumerate_cycles, extract_cycle, is_bipartite
from .hypotheses import HYPOTHESIS_IDS, check_all, check_one
from .kernels import (
    HypothesisFailure, PipelineError, build_semikernel_digraph, find_h_kernel_bruteforce,
    find_singleton_semikernel, is_h_absorbent, is_h_independent, is_h_kernel, is_h_semikernel,
    is_h_semikernel_mod_d2, theorem_pipeline,
)

__version__ = "0.1.0"

__all__ = [
    "ALL",
    "D1",
    "D2",
    "ArcFilter",
    "Caps",
    "CapExceeded",
    "ChromaticPartition",
    "ColorClassDigraph",
    "ColoredDigraph",
    "Instance",
    "InstanceError",
    "InstanceFormatError",
    "IsolatedVertexWarning",
    "PatternDigraph",
    "WitnessReport",
    "class_subdigraph",
    "deserialize",
    "get_caps",
    "load",
    "make_instance",
    "save",
    "serialize",
    "side_subdigraph",
    "use_caps",
    "validate",
    "WalkError",
    "enumerate_h_paths",
    "h_path",
    "h_path_exists",
    "h_walk",
    "h_walk_exists",
    "is_h_path",
    "is_h_walk",
    "obstructions",
    "color_class_digraph",
    "enumerate_cycles",
    "extract_cycle",
    "is_bipartite",
    "HYPOTHESIS_IDS",
    "check_all",
    "check_one",
    "HypothesisFailure",
    "PipelineError",
    "build_semikernel_digraph",
    "find_h_kernel_bruteforce",
    "find_singleton_semikernel",
    "is_h_absorbent",
    "is_h_independent",
    "is_h_kernel",
    "is_h_semikernel",
    "is_h_semikernel_mod_d2",
    "theorem_pipeline",
]
