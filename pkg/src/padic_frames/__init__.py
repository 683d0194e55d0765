"""Step refinable functions and tight wavelet frames on the p-adic numbers."""

from .errors import (
    FrameConstructionError,
    InfeasibleTreeError,
    InternalContradictionError,
    InvalidTreeError,
    PadicFramesError,
    TransformError,
    UnsolvedTreeError,
)
from .qp import (
    CharacterWord,
    DualCoset,
    GroupElement,
    GroupParams,
    TimeCoset,
    add,
    dilate_character,
    dilate_element,
    enumerate_H0,
    monna,
    monna_dual,
    multiply_characters,
    negate_trunc,
    pair,
    subtract,
)
from .steps import (
    StepFunctionFreq,
    StepFunctionTime,
    fourier,
    inner_product,
    inner_product_freq,
    inverse_fourier,
    pointwise_product,
    refine,
)
from .tree import (
    Feasibility,
    MaskTree,
    apply_transforms,
    classify,
    initial_tree,
    pad,
    phi_hat_tree,
    shift_tree,
    transform_i,
    transform_ii,
    tree_from_literal,
)
from .solver import MaskSpec, assemble_phi, assemble_phi_hat, q_node, refinement_residual, solve_mask
from .frames import (
    FrameSystem,
    WaveletSpec,
    build_custom,
    build_general,
    build_n1,
    check_theorem31,
    construct_frame,
    smallest_zero_level,
)
from .verify import (
    coefficient,
    coefficient_time,
    gram_check_phi,
    lemma31_check,
    parseval,
    parseval_residual,
    random_test_function,
    verify_frame,
)
from .document import document_to_frame, frame_to_document, load_document, save_document

__version__ = "0.1.0"
