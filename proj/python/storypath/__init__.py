"""Mean narrative paths over paragraph embeddings, with MST and acyclic TSP orderings."""

from ._core import (
    ConfigError,
    DataError,
    EmbeddingSet,
    SolverError,
    action,
    atsp_exact,
    atsp_heuristic,
    canonical_orientation,
    distance_matrix,
    entropy_weights,
    export_dot,
    initial_ordered_run,
    load_corpus_dir,
    make_permutations,
    mean_path,
    mst,
    mst_initial_chain,
    path_cost,
    read_embeddings,
    render_table,
    run_experiment,
    segment_paragraphs,
    shuffled_mean_path,
    tokenize,
    truncated_svd,
    validate,
    weight_matrix,
    write_embeddings,
)

__version__ = "1.0.0"
