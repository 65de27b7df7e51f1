"""Exact verification toolkit for super R-matrices, RTT superalgebras
and the quantum Berezinian.

Everything is computed over exact rational-function fields; every check
is an identity test with zero tolerance.  See the README for the layout
and the demos directory for worked examples.
"""

from .scalars import (
    DivisionByZero,
    FSeriesUnsolvable,
    Poly,
    Rat,
    ScalarError,
    TruncSeries,
    crossing_scalar,
    f_residual,
    poly_gcd,
    q_factorial,
    q_int,
    qrat_arith,
    rat_to_series,
    render,
    scale_spectral,
    solve_f_series,
)
from .tensor import (
    GradedDim,
    GradedOp,
    OpMatrix,
    SingularOperator,
    build_D,
    build_Q,
    d_entries,
    embed_factor,
    matrix_unit,
    parity_projector,
    perm_P,
    supertranspose,
    supertrace,
)
from .rmatrix import (
    SymmetrizerPair,
    build_R,
    build_R_at,
    build_symmetrizers,
    check_crossing,
    check_fusion,
    check_hecke,
    check_qybe,
    check_r_structure,
    check_symmetrizers,
    check_unitarity_and_qflip,
    r_const_pair,
    rbar_at,
)
from .reps import EvalRep, RepConstructionError, TensorRep, build_eval_rep, build_tensor_rep, draw_points
from .rtt import (
    AbstractLMatrix,
    Gen,
    NCPoly,
    NCSeries,
    check_relations,
    expand_rll,
    hc_project,
    instantiate,
    invert_L_series,
    omega_check,
    rho_check,
    rll_component_residual,
)
from .berezinian import (
    abstract_berezinian,
    admissible_subsets,
    berezinian_fusion,
    berezinian_of,
    berezinian_sum,
    centrality_check,
    decomposition_check,
    hc_image_check,
    jacobi_check,
    liouville_check,
    macmahon_check,
    quasidet,
    schur_check,
    sum_fusion_check,
    sylvester_check,
    traced_product,
    zeta_check,
    zeta_compute,
    zeta_extract,
)
from .report import CheckReport

__all__ = [n for n in dir() if not n.startswith("_")]
__version__ = "0.1.0"
