"""
Three-qubit encoding of flavor mixing
======================================

Each flavor is a one-hot basis state of three qubits: e -> |100>,
mu -> |010>, tau -> |001>. The PMNS factors lift to 8x8 unitaries that act
only on those three states; their product restricted back to the one-hot
block is the PMNS matrix. The c12 factor is a two-qubit rotation
controlled on the last qubit being 0.
"""

import numpy as np

from nuwalk.embedding import Factor, controlled_reading_check, embed_factor, embedded_product, restrict
from nuwalk.neutrino import MixingSpec, pmns_matrix

m = MixingSpec(phi12=0.59437, phi13=0.16087, phi23=0.69835, delta_cp=1.2)
np.set_printoptions(precision=3, suppress=True, linewidth=120)

for f in Factor:
    print(f"{f.name} =\n{embed_factor(f, m).matrix}\n")

u = embedded_product(m)
print("restriction vs PMNS:", np.abs(restrict(u) - pmns_matrix(m)).max())
print("|000> and |111> fixed:", np.allclose(u[:, 0], np.eye(8)[0]) and np.allclose(u[:, 7], np.eye(8)[7]))
print("c12 factor is controlled on the last qubit:", controlled_reading_check(m))
