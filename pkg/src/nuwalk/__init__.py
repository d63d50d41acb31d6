"""Neutrino flavor oscillations as the reduced coin dynamics of a quantum walk."""

from .embedding import controlled_reading_check, embed_factor, embedded_product
from .entanglement import (
    average_entropy,
    entropy_report,
    linear_entropy,
    mode_state,
    partial_entropy,
    two_flavor_entropy,
)
from .kraus import (
    ExtendedKrausFamily,
    KrausFamily,
    apply_channel,
    block_kraus,
    extend_kraus,
    initial_kraus,
    kraus_at,
    kraus_step,
)
from .neutrino import (
    EnergyModel,
    FlavorScenario,
    MixingSpec,
    analytic_series,
    analytic_transition,
    flavor_density,
    mass_state_coin,
    physics_to_walk,
    pmns_matrix,
    two_flavor_mixing,
    walk_transition_series,
)
from .walk import (
    Boundary,
    CoinParams,
    LatticeSpec,
    MomentumSpec,
    WalkState,
    apply_walk_step,
    build_dirac_coin,
    build_general_coin,
    dispersion_energy,
    evolve,
    mass_eigenvector,
    momentum_state,
    reduce_to_coin,
)

__version__ = "0.1.0"
