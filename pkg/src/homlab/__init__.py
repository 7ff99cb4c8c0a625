"""homlab: exact homological algebra over prime fields.

A library plus CLI for finite-dimensional algebras over F_p: modules as
action matrices, Hom and Ext by exact linear algebra, transpose duality and
evaluation maps, and verification suites that check structural theorems over
enumerated module families.
"""

from .algebra import (
    Algebra,
    AlgebraSpec,
    algebra_to_structure_spec,
    build_algebra,
    direct_product,
    opposite,
    parse_spec,
)
from .enumeration import enumerate_modules, sample_modules
from .errors import (
    BuildError,
    HomlabError,
    ModuleError,
    SpecError,
    UndeterminedError,
)
from .homology import (
    EvaluationReport,
    ExtProfile,
    OrthogonalityProfile,
    algebra_dual,
    dual_map,
    evaluation_report,
    ext_dims,
    ext_dims_via_complex,
    ext_profile,
    injective_envelope,
    is_torsionless,
    linear_dual,
    linear_dual_map,
    orthogonality_profile,
    stable_hom_dims,
    strip_projectives,
    syzygy_class_walk,
    tensor_dim,
    tensor_realization,
    tensor_to_hom_map,
    transpose,
)
from .lab import (
    PREDICATE_IDS,
    EnumerationConfig,
    ExtensionRealization,
    PredicateResult,
    SearchConfig,
    SuiteReport,
    check_right_approximation,
    evaluate_predicate,
    right_minimal_reduction,
    run_suite,
    search_counterexample,
    universal_extension,
)
from .linalg import Mat, Subspace, kernel_basis, rref, solve
from .modules import (
    IsoDecision,
    ModMap,
    Module,
    Resolution,
    decompose,
    direct_sum,
    hom_dim,
    hom_space,
    is_faithful,
    is_indecomposable,
    is_isomorphic,
    is_projective,
    make_module,
    minimal_resolution,
    projective_cover,
    regular_module,
    simples_and_projectives,
    submodule,
    quotient_module,
    syzygy,
    top_socle,
    zero_module,
)
from .serialize import (
    algebra_from_dict,
    algebra_to_dict,
    module_content_hash,
    module_from_dict,
    module_to_dict,
)

__version__ = "0.1.0"
