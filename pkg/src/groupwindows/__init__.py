"""Exact computation with subgroups of finite windows of products of finite
abelian groups: controllability certificates, socle and height structure, and
synthesis of finite-support generating sets with homomorphic encoders.
"""

from .errors import InputError, UndeterminedAtWindowError, WindowScaleError
from .intlinalg import IntMatrix, SnfResult, smith_normal_form, solve_mixed_modulus
from .window import (
    ComponentGroup,
    Element,
    ProductWindow,
    WindowSubgroup,
    element_order,
    intersect_with_sum,
    membership,
    project,
    section,
    span,
)
from .templates import (
    FixedGenerator,
    ShiftedGenerator,
    TemplateSpec,
    UnrollResult,
    closure_window,
    unroll_template,
)
from .torsion import (
    PrimaryDecomposition,
    PrimaryPart,
    SocleBasis,
    height,
    max_height_prefix_witness,
    primary_decompose,
    socle,
    socle_subgroup,
)
from .control import (
    Certificate,
    certify,
    controllability_certificate,
    controllability_index,
    is_rectangular,
    is_weakly_controllable,
    is_weakly_observable,
    order_controllability_certificate,
    order_controllability_index,
    revalidate_witness,
)
from .synthesis import (
    Block,
    CombinedEncoder,
    Encoder,
    GeneratingSet,
    SynthesisResult,
    check_implicit_direct_product,
    encode,
    represent,
    synthesize,
    synthesize_p,
    verify_block_properties,
    verify_isomorphic_encoder,
)

__version__ = "0.1.0"

__all__ = [
    "Block",
    "Certificate",
    "CombinedEncoder",
    "ComponentGroup",
    "Element",
    "Encoder",
    "FixedGenerator",
    "GeneratingSet",
    "InputError",
    "IntMatrix",
    "PrimaryDecomposition",
    "PrimaryPart",
    "ProductWindow",
    "ShiftedGenerator",
    "SnfResult",
    "SocleBasis",
    "SynthesisResult",
    "TemplateSpec",
    "UndeterminedAtWindowError",
    "UnrollResult",
    "WindowScaleError",
    "WindowSubgroup",
    "certify",
    "check_implicit_direct_product",
    "closure_window",
    "controllability_certificate",
    "controllability_index",
    "element_order",
    "encode",
    "height",
    "intersect_with_sum",
    "is_rectangular",
    "is_weakly_controllable",
    "is_weakly_observable",
    "max_height_prefix_witness",
    "membership",
    "order_controllability_certificate",
    "order_controllability_index",
    "primary_decompose",
    "project",
    "represent",
    "revalidate_witness",
    "section",
    "smith_normal_form",
    "socle",
    "socle_subgroup",
    "solve_mixed_modulus",
    "span",
    "synthesize",
    "synthesize_p",
    "verify_block_properties",
    "verify_isomorphic_encoder",
]
