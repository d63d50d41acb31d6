"""
Kraus operators of the coin channel
====================================

Tracing out the walker position leaves a channel on the coin. Its Kraus
operators obey a two-term recurrence, so they can be built step by step
without ever storing the full walker state.
"""

import numpy as np

from nuwalk.kraus import apply_channel, extend_kraus, initial_kraus, kraus_at, kraus_step, purity
from nuwalk.walk import (
    Boundary,
    LatticeSpec,
    MomentumSpec,
    WalkState,
    build_dirac_coin,
    evolve,
    momentum_state,
    reduce_to_coin,
)

theta = np.pi / 4
coin = build_dirac_coin(theta)

# two steps from the origin give three operators
for x, k in kraus_at(2, coin).as_dict().items():
    print(f"K_{x:+d}(2) =\n{np.round(k.real, 4)}")

# the recurrence agrees with brute-force evolution of the full state
lattice = LatticeSpec(12)
up = np.diag([1.0, 0.0])
state = evolve(WalkState.localized([1, 0], lattice), [coin], lattice, 12)
rho = apply_channel(kraus_at(12, coin), up)
print("\nchannel vs state vector at t=12:", np.abs(rho - reduce_to_coin(state)).max())

# a localized walker decoheres the coin, a plane wave does not
ring = LatticeSpec(40, boundary=Boundary.PERIODIC)
plane = extend_kraus(initial_kraus(), momentum_state(MomentumSpec(3, 40), ring), ring)
local = initial_kraus()
print("\n t  purity(localized)  purity(plane wave)")
for t in range(9):
    print(f"{t:2d}  {purity(apply_channel(local, up)):.6f}           {purity(apply_channel(plane, up)):.6f}")
    local, plane = kraus_step(local, coin), kraus_step(plane, coin)
