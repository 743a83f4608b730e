"""Discrete-time quantum walks on the line: interference terms of local
density matrices and their long-time limit laws."""

from qwalk.lattice_walk import (
    CoinSpec,
    WalkState,
    evolve,
    make_initial,
    step,
    step_adjoint,
)
from qwalk.density import (
    LocalDensity,
    MomentSeries,
    density_at,
    moment,
    moment_series,
    probability_distribution,
    rescaled_sum,
)
from qwalk.limit_laws import (
    GroverCoefficients,
    LimitLaw,
    grover_coefficients,
    make_f_2state,
    make_f_3state,
    make_g,
    moment_of_law,
)
from qwalk.spectral import (
    FourierSymbol,
    cross_term_magnitude,
    delta_integrals,
    k_space_propagate,
)

__version__ = "0.1.0"
