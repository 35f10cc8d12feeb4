"""Incremental spectral sparsification of graphs under edge insertions."""

from .baseline import SparsifierConfig, baseline_sparsify, max_spanning_tree, random_include
from .errors import IngrassError
from .eval import (
    SimilarityReport,
    condition_number_exact,
    condition_number_iterative,
    density,
    exact_distortion,
    offtree_density,
)
from .graph import (
    WeightedGraph,
    connected_components,
    laplacian_apply,
    load_matrix_market,
    quadratic_form,
    write_matrix_market,
)
from .kernels import BACKEND
from .lrd import (
    ClusterPairIndex,
    LrdHierarchy,
    build_pair_index,
    embedding_vector,
    lrd_decompose,
    resistance_upper_bound,
)
from .resistance import ResistanceEmbedder, build_embedder, estimate_resistance, exact_resistance
from .setupfile import load_setup, save_setup
from .stream import read_stream, synth_stream, write_stream
from .update import (
    Decision,
    EdgeEvent,
    SparsifierState,
    choose_filter_level,
    estimate_distortion,
    ingrass_update,
    process_edge,
)

__version__ = "0.1.0"
