"""Literature co-occurrence networks as a filter for gene co-expression data."""

from .coexpress import (
    CorrelationNetwork,
    ExpressionMatrix,
    SweepRow,
    coexpression_network,
    hypothesis_set,
    ingest_expression,
    intersect_networks,
    pearson,
    threshold_sweep,
)
from .cooccur import (
    CooccurrenceRecord,
    CooccurrenceTable,
    PoissonModel,
    build_cooccurrence_table,
    cooccurrence_count,
    k_mention_network,
    poisson_lambda,
    poisson_network,
    poisson_pmf,
    poisson_threshold,
)
from .corpus import (
    AbstractRecord,
    EntityTerm,
    Lexicon,
    OccurrenceIndex,
    build_index,
    ingest_corpus,
    ingest_lexicon,
    occurrence_count,
)
from .interactions import (
    SvoTriple,
    TypedInteraction,
    annotate_network,
    extract_typed_interactions,
    ingest_svo,
)
from .netops import (
    EdgeSet,
    difference,
    edge_universe_size,
    intersect,
    overlap_stats,
    read_sif,
    write_sif,
)

__version__ = "0.1.0"
