"""Finite linear spaces: planes, planarisation, amalgamation, homogeneity."""

__version__ = "0.1.0"

from .core import (
    GeometryError,
    LinearSpace,
    ShapeReport,
    ValidationError,
    all_lines,
    classify_shape,
    collinear,
    degrees,
    dual,
    induced,
    is_closed,
    is_independent,
    line_through,
    parallel_pairs,
    relabel,
    validate,
)
from .pg import FiniteField, fano_plane, gf, projective_plane
from .morphisms import (
    HomogeneityResult,
    PartialMap,
    automorphisms,
    extend_to_automorphism,
    find_embeddings,
    is_embedding,
    is_homogeneous,
    is_isomorphic,
    is_partial_isomorphism,
    nonhomogeneity_witness_deg5,
)
from .planarise import (
    CompletionResult,
    ElementaryStep,
    PlanarisationTrace,
    concurrent_planarisation,
    elementary_planarisation,
    is_aplanar,
    is_planarisation,
    planar_closure,
    projective_completion,
    trivial_planarisation,
)
from .amalgam import (
    Amalgam,
    ApReport,
    IncompatibilityCertificate,
    amalgamate_in_class,
    find_amalgam,
    free_amalgam,
    identity_embedding,
    incompatible_planarisations,
    is_amalgamation_base,
    is_amalgamation_base_exhaustive,
    verify_certificate,
    verify_class_ap,
)
from .enumeration import (
    ClassSpec,
    canonical_form,
    canonical_space,
    class_all,
    class_by_name,
    class_degree_at_most,
    class_p4_star,
    classify_homogeneous,
    enumerate_spaces,
    is_maximal_in_class,
)
from .game import (
    GameAnalysis,
    GameState,
    Strategy,
    builtin_strategies,
    play,
    strategy_by_name,
)
