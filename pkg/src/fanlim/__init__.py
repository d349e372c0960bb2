"""Exact-arithmetic hyper-derived inverse limits of monomial module
diagrams on regular rational fans."""

from .chains import (
    ChainMap,
    FiniteChainComplex,
    homology_dims,
    is_quasi_iso,
    mapping_cone as chain_mapping_cone,
    path_factorisation,
)
from .colocal import (
    GeneratorSet,
    SheafVerdict,
    is_colocal_equivalence,
    is_colocally_acyclic,
    is_homotopy_sheaf,
    r_sigma,
    weak_generator_report,
)
from .diagrams import (
    DiagramComplex,
    Poset,
    derived_limit_oracle,
    fibrant_replacement,
    finite_limit,
    holim,
)
from .fan import (
    Fan,
    QuotientData,
    quotient_fan,
    separating_form,
    support_form,
    validate_fan,
)
from .monomial import (
    MonomialComplex,
    MonomialEntry,
    evaluate_degree,
    localize_along_face,
    restrict_to_divisor,
)
from .presheaves import (
    GradedCohomologyTable,
    MonomialPresheaf,
    PresheafMap,
    cofibre,
    evaluate_presheaf_degree,
    extension_by_zero,
    free_presheaf,
    holim_graded,
    line_bundle,
    mapping_cone,
    restriction,
    twist,
)
from .regions import Region, chamber_patterns

__version__ = "0.1.0"
