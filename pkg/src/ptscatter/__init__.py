"""Transfer-matrix workbench for one-dimensional scattering by complex potentials."""

__version__ = "0.1.0"

from .errors import (
    ContractViolation,
    EverywhereFixed,
    IntegrationFailure,
    NumericalFailure,
    SearchFailure,
    SpectralSingularityError,
)
from .scatter import (
    ScatterCoefficients,
    ScatteringMatrix,
    TransferMatrix,
    WaveAmplitudes,
    coefficients_from_transfer,
    compose,
    compose_chain,
    reciprocity_check,
    s_eigenvalues,
    scattering_from_transfer,
    transfer_from_coefficients,
)
from .potentials import (
    ExpGrating,
    PiecewiseConstant,
    PTDimer,
    Sampled,
    Segment,
    Slab,
    directional_transmissions,
    is_pt_symmetric_potential,
    load_sampled_profile,
    pt_reflect_potential,
    slab_transfer,
    transfer_of_potential,
)
