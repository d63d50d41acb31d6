"""
Three flavors and mode entanglement
====================================

Three coin sectors with PMNS mixing. The nu_e survival probability shows a
slow oscillation set by the small splitting and a fast ripple set by the
large one. The partial linear entropies trace out one flavor mode at a
time; their mean is the average entropy.
"""

import numpy as np

from nuwalk.entanglement import entropy_report, linear_entropy, mode_state, mode_state_vector, single_mode_density
from nuwalk.neutrino import FlavorScenario, MixingSpec, mass_energies, walk_transition_series
from nuwalk.walk import Boundary, LatticeSpec

mixing = MixingSpec(phi12=0.59437, phi13=0.16087, phi23=0.69835)
lattice = LatticeSpec(314, boundary=Boundary.PERIODIC)
scenario = FlavorScenario((0.001, 0.01963, 0.12797), 0.1, lattice, mixing, initial_flavor=0, steps=3000)

walk = walk_transition_series(scenario)
report = entropy_report(walk)
print("max |row sum - 1|:", np.abs(walk.row_sums() - 1).max())

# oscillation frequencies are energy differences on the exact dispersion
e = mass_energies(scenario)
print(f"slow period {2 * np.pi / (e[1] - e[0]):.0f} steps, fast period {2 * np.pi / (e[2] - e[0]):.0f} steps")
th = np.array(scenario.coin_angles)
print(f"frequency ratio {(e[2] - e[0]) / (e[1] - e[0]):.2f}, squared-angle ratio "
      f"{(th[2]**2 - th[0]**2) / (th[1]**2 - th[0]**2):.2f}")

print("\n   t   P_ee    P_emu   P_etau  S_e     S_mu    S_tau   <S>")
for t in range(0, 3001, 150):
    p, s = walk.probabilities[t], report.entropies[t]
    print(f"{t:4d}  " + "  ".join(f"{v:.4f}" for v in (*p, *s, report.average[t])))

# the same entropies from the explicit one-hot mode state
t = 1234
psi = mode_state_vector(mode_state("e", t, scenario))
direct = [linear_entropy(single_mode_density(psi, g, 3)) for g in range(3)]
print(f"\nt={t}: from probabilities {np.round(report.entropies[t], 10)}, from mode densities {np.round(direct, 10)}")
