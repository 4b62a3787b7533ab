"""Numerical toolkit for weighted (reflection-symmetric) harmonic analysis:
generalized Hermite spectral bases, oscillator and free Schrodinger flows,
Schatten-norm functionals of orthonormal systems, and a small Hartree solver.
"""

from .hartree import (
    DunklTransform1D,
    HartreeConfig,
    interaction_potential,
    picard_step,
    solve_hartree,
)
from .dunklops import (
    dunkl_operator_matrix,
    hamiltonian_matrix,
    position_operator_matrix,
)
from .freeprop import (
    LensMap,
    free_evolve_by_kernel,
    free_evolve_via_lens,
    free_propagator_matrix,
    heat_kernel,
    kernel_Lit,
    lens_relation_residual,
    norm_transport_check,
)
from .hermite import (
    HermiteBasis,
    SingularTimeError,
    StateVector,
    build_basis,
    extension_operator,
    fdh_transform,
    hermite_functions_1d,
    kernel_Kit,
    mehler_closed_form,
    propagate_by_kernel,
    propagate_hermite,
)
from .operators import (
    OperatorMatrix,
    OrthonormalSystem,
    density,
    dual_functional,
    evolved_density,
    kss_check,
    mixed_xp_operator,
    multiplication_matrix,
    schatten_norm,
)
from .quadrature import (
    QuadratureRule1D,
    TensorGrid,
    build_rule,
    mixed_norm,
    plain_rule,
    tensor_grid,
    time_grid,
    weighted_lp_norm,
)
from .strichartz import (
    ExponentPair,
    StrichartzReport,
    admissible_p,
    generate_system,
    inhomogeneous_check,
    mhls_check,
    run_inequality,
    schatten_rhs,
    strichartz_lhs,
)
from .structure import (
    DunklStructure,
    dunkl_kernel,
    dunkl_kernel_1d,
    weight,
)

__version__ = "0.1.0"
