"""
Three-qubit one-hot encoding of the flavor states.

Flavors map to ``|100>, |010>, |001>`` with the basis index read as the
binary number ``b2 b1 b0`` (so e -> 4, mu -> 2, tau -> 1). Each 3x3 PMNS
factor is lifted to an 8x8 unitary acting on those three basis states and as
the identity everywhere else.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from . import tolerances as tol
from .neutrino import MixingSpec, pmns_factors

__all__ = [
    "ONE_HOT",
    "Factor",
    "EmbeddedFactor",
    "embed_matrix",
    "embed_factor",
    "embedded_product",
    "restrict",
    "controlled_block",
    "controlled_reading_check",
]

# flavor order (e, mu, tau)
ONE_HOT = (0b100, 0b010, 0b001)


class Factor(enum.Enum):
    U0 = 0
    U1 = 1
    U2 = 2
    U3 = 3


@dataclass(frozen=True)
class EmbeddedFactor:
    which: Factor
    matrix: NDArray[np.complex128] = field(repr=False)


def embed_matrix(u3x3) -> NDArray[np.complex128]:
    """Lift a 3x3 flavor-space matrix to 8x8 on the one-hot basis states."""
    u3x3 = np.asarray(u3x3, dtype=np.complex128)
    if u3x3.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got {u3x3.shape}")
    m = np.eye(8, dtype=np.complex128)
    idx = np.array(ONE_HOT)
    m[np.ix_(idx, idx)] = u3x3
    return m


def embed_factor(which, m: MixingSpec) -> EmbeddedFactor:
    which = which if isinstance(which, Factor) else Factor[str(which).upper()]
    u3, u2, u1, u0 = pmns_factors(m)
    factor = {Factor.U0: u0, Factor.U1: u1, Factor.U2: u2, Factor.U3: u3}[which]
    return EmbeddedFactor(which, embed_matrix(factor))


def embedded_product(m: MixingSpec) -> NDArray[np.complex128]:
    """``U3 U2 U1 U0`` of the embedded 8x8 factors."""
    out = np.eye(8, dtype=np.complex128)
    for which in (Factor.U3, Factor.U2, Factor.U1, Factor.U0):
        out = out @ embed_factor(which, m).matrix
    return out


def restrict(m8) -> NDArray[np.complex128]:
    """3x3 block on the one-hot states in flavor order (e, mu, tau)."""
    idx = np.array(ONE_HOT)
    return np.asarray(m8)[np.ix_(idx, idx)]


def controlled_block(phi12: float) -> NDArray[np.complex128]:
    """
    4x4 block on the first two qubits, applied when the last qubit is 0.

    Basis order ``|00>, |01>, |10>, |11>``; the rotation mixes ``|01>`` (mu)
    and ``|10>`` (e).
    """
    c, s = np.cos(phi12), np.sin(phi12)
    return np.array(
        [[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1]], dtype=np.complex128
    )


def controlled_reading_check(m: MixingSpec, atol: float = tol.UNITARITY) -> bool:
    """
    True if the c12 factor equals "apply the 4x4 block to ``|ij>`` when the
    last qubit is 0, do nothing when it is 1".
    """
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    controlled = np.kron(controlled_block(m.phi12), p0) + np.kron(np.eye(4), p1)
    return bool(np.allclose(embed_factor(Factor.U1, m).matrix, controlled, rtol=0.0, atol=atol))
