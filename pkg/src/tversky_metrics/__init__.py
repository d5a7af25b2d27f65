"""Tversky-family set dissimilarities, metricity checks and sequence clustering."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    DuplicateLabel,
    GroundTooLarge,
    MalformedFasta,
    MalformedNewick,
    MatrixInvalid,
    NotInRegime,
    TverskyError,
    UndefinedValue,
    UniverseTooSmall,
)
from .measures import (
    Family,
    MeasureSpec,
    PairStats,
    TriplePartition,
    delta,
    dice_similarity,
    extend_with_empty,
    jaccard,
    jp_distance,
    nid_analogue,
    overlap_coefficient,
    pair_stats,
    steinhaus_general,
    strm,
    strm_dissimilarity,
    triple_partition,
    tversky,
    tversky_dissimilarity,
)
from .lz78 import lz78_dictionary, lzjd
from .seqdist import kgram_profile, levenshtein, z_distance
from .verify import (
    Counterexample,
    RegionCell,
    check_triangle,
    check_triangle_exhaustive,
    counterexample_large_n,
    counterexample_small,
    epsilon_transform,
    estimate_rho,
    gragera_rho,
    region_grid,
    region_predicate,
)
from .cluster import (
    DistanceMatrix,
    Dendrogram,
    alpha_sweep,
    canonical_form,
    distance_matrix,
    newick_serialize,
    parse_newick,
    ward_linkage,
)
from .fasta import SequenceRecord, parse_fasta
