"""Graph coarsening in the Gromov-Wasserstein geometry."""

from .coarsen import averaging_matrix, coarsen, coupling_from_assignment, lift, merge_pair
from .distort import (
    PairDistortionMatrix,
    coarsening_objective,
    distortion_sq,
    merge_pair_distortion_sq,
    pair_distortion_matrix,
    tensor_product,
)
from .gpc import CoarsenResult, gpc, minimal_representative
from .kgpc import KMeansConfig, kgpc, kmeans
from .netcore import (
    Coupling,
    MeasureNetwork,
    Partition,
    Representation,
    build_network,
    duplicate_rows,
    to_representation,
)

__version__ = "0.1.0"
