"""Invariant hyperbolic plane curves, shift-patterned determinantal
representations, and rotation-invariant numerical ranges."""

from .errors import (
    AssumptionError,
    CommonComponentError,
    ConditioningError,
    ConstructionFailedError,
    CWShiftError,
    DefinitenessError,
    NumericalError,
    RankDeficiencyError,
    ValidationError,
)
from .polyring import (
    GroupElement,
    HomPoly,
    InvarianceReport,
    act_group,
    eigenspace_dimension,
    eigenspace_monomials,
    eigenspace_project,
    invariance_report,
    poly_from_dict,
    poly_to_dict,
    rel_inf_diff,
)
from .hyperbolicity import (
    HypVerdict,
    InterlaceVerdict,
    default_interlacer,
    hyperbolicity_verdict,
    interlacing_verdict,
    nuij_step,
    nuij_strictify,
    radial_product,
    retraction_point,
)
from .intersect import (
    AssumptionReport,
    OrbitSplit,
    ProjPoint,
    check_assumptions,
    intersect_curves,
    orbit_split,
)
from .detrep import (
    BlockCWS,
    ConstructDiagnostics,
    CWSValidation,
    GramMatrix,
    LinearPencil,
    assemble_gram,
    construct_cws,
    cws_from_dict,
    cws_to_dict,
    noether_solve,
    normalize_pencil,
    pencil_from_adjugate,
    random_block_cws,
    validate_cws,
    vanishing_subspace,
)
from .numrange import (
    KippenhahnSamples,
    RangeSample,
    SynthesisDiagnostics,
    WkRange,
    char_poly,
    curve_samples,
    detect_symmetry,
    higher_rank_range,
    kippenhahn_samples,
    support_sweep,
    synthesize_invariant_cws,
)

__version__ = "0.1.0"
