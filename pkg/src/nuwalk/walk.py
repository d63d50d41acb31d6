"""
Discrete-time quantum walk on a one-dimensional lattice.

Coin space per flavor sector is spanned by (|up>, |down>). One step applies
the coin of every sector and then moves the up component by -a and the down
component by +a, i.e. ``W = C_up (x) T_- + C_down (x) T_+``. The full
state-vector evolution here is the brute-force reference for the Kraus
recurrence in :mod:`nuwalk.kraus`.

Angles are in radians and lattice units default to ``a = tau = 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import block_diag

from .errors import InvalidMomentum, OutOfSupport

__all__ = [
    "Boundary",
    "CoinParams",
    "LatticeSpec",
    "MomentumSpec",
    "WalkState",
    "build_general_coin",
    "build_dirac_coin",
    "block_coin",
    "apply_walk_step",
    "evolve",
    "momentum_state",
    "momentum_step_operator",
    "dispersion_energy",
    "mass_eigenvector",
    "reduce_to_coin",
]

ComplexArray = NDArray[np.complex128]


class Boundary(enum.Enum):
    PERIODIC = "periodic"
    OPEN = "open"


@dataclass(frozen=True)
class CoinParams:
    """Angles of the general SU(2) coin times a global phase ``xi``."""

    xi: float = 0.0
    theta: float = 0.0
    phi: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("xi", "theta", "phi", "delta"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"coin angle {name!r} must be finite")


@dataclass(frozen=True)
class LatticeSpec:
    """
    Finite lattice with sites ``-N..N`` in units of the spacing.

    Positions are stored as integer site labels; a walker step moves by
    ``spacing`` sites.
    """

    half_size: int
    spacing: int = 1
    boundary: Boundary = Boundary.OPEN

    def __post_init__(self):
        if int(self.half_size) != self.half_size or self.half_size < 1:
            raise ValueError(f"half_size must be an integer >= 1, got {self.half_size}")
        if int(self.spacing) != self.spacing or self.spacing < 1:
            raise ValueError(f"spacing must be an integer >= 1, got {self.spacing}")
        if self.spacing >= self.size:
            raise ValueError("spacing must be smaller than the lattice size")
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def size(self) -> int:
        return 2 * self.half_size + 1

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(-self.half_size, self.half_size + 1)

    def fold(self, x):
        """Map positions into ``-N..N`` modulo ``2N+1``."""
        return (np.asarray(x) + self.half_size) % self.size - self.half_size

    def index(self, x):
        """Array index of position ``x``."""
        x = np.asarray(x)
        if self.periodic:
            x = self.fold(x)
        elif np.any(np.abs(x) > self.half_size):
            raise OutOfSupport(f"position outside -{self.half_size}..{self.half_size}")
        return x + self.half_size


@dataclass(frozen=True)
class MomentumSpec:
    """Allowed lattice momentum ``k = 2*pi*n/(2N+1)`` (radians per site)."""

    index: int
    half_size: int
    spacing: int = 1

    @property
    def value(self) -> float:
        return 2.0 * np.pi * self.index / (2 * self.half_size + 1)

    @property
    def k_tilde(self) -> float:
        return self.value * self.spacing

    @classmethod
    def from_value(cls, k: float, lattice: LatticeSpec, atol: float = 1e-12) -> "MomentumSpec":
        """Exact lookup; raises :class:`InvalidMomentum` if ``k`` is not allowed."""
        n = k * lattice.size / (2.0 * np.pi)
        if abs(n - round(n)) * 2.0 * np.pi / lattice.size > atol:
            raise InvalidMomentum(
                f"k={k!r} is not of the form 2*pi*n/{lattice.size}"
            )
        return cls(int(round(n)), lattice.half_size, lattice.spacing)

    @classmethod
    def nearest(cls, k_tilde: float, lattice: LatticeSpec) -> "MomentumSpec":
        """Snap a requested dimensionless momentum to the nearest allowed one."""
        k = k_tilde / lattice.spacing
        n = int(round(k * lattice.size / (2.0 * np.pi)))
        return cls(n, lattice.half_size, lattice.spacing)


@dataclass(frozen=True)
class WalkState:
    """
    Walker amplitudes on every lattice site.

    ``amplitudes[i, c]`` is the amplitude at position ``lattice.positions[i]``
    and coin component ``c``; components are ordered ``(f, up), (f, down)``
    for f = 0..n-1.
    """

    amplitudes: ComplexArray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[1] % 2:
            raise ValueError("amplitudes must have shape (sites, 2n)")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def flavor_count(self) -> int:
        return self.amplitudes.shape[1] // 2

    @property
    def coin_dim(self) -> int:
        return self.amplitudes.shape[1]

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def at(self, x: int, lattice: LatticeSpec) -> ComplexArray:
        return self.amplitudes[lattice.index(x)]

    def support(self, lattice: LatticeSpec) -> NDArray[np.int64]:
        """Positions carrying nonzero amplitude."""
        mask = np.any(self.amplitudes != 0, axis=1)
        return lattice.positions[mask]

    @classmethod
    def product(cls, coin_vector, position_amplitudes, lattice: LatticeSpec) -> "WalkState":
        """``|chi> (x) |psi>`` with ``position_amplitudes`` aligned to ``lattice.positions``."""
        chi = np.asarray(coin_vector, dtype=np.complex128)
        c = np.asarray(position_amplitudes, dtype=np.complex128)
        if c.shape != (lattice.size,):
            raise ValueError(f"expected {lattice.size} position amplitudes, got {c.shape}")
        return cls(np.outer(c, chi))

    @classmethod
    def localized(cls, coin_vector, lattice: LatticeSpec, x: int = 0) -> "WalkState":
        c = np.zeros(lattice.size, dtype=np.complex128)
        c[lattice.index(x)] = 1.0
        return cls.product(coin_vector, c, lattice)


def build_general_coin(p: CoinParams) -> ComplexArray:
    """
    General coin ``e^{i xi} exp(-i theta sx) exp(-i phi sy) exp(-i delta sz)``.

    Returned in the closed form with ``F = e^{-i delta}(c_t c_p - i s_t s_p)``
    and ``G = -e^{i delta}(c_t s_p + i s_t c_p)``::

        e^{i xi} [[ F,   G ],
                  [-G*,  F*]]
    """
    ct, st = np.cos(p.theta), np.sin(p.theta)
    cp, sp = np.cos(p.phi), np.sin(p.phi)
    em, ep = np.exp(-1j * p.delta), np.exp(1j * p.delta)
    f = em * (ct * cp - 1j * st * sp)
    g = -ep * (ct * sp + 1j * st * cp)
    return np.exp(1j * p.xi) * np.array([[f, g], [-np.conj(g), np.conj(f)]], dtype=np.complex128)


def build_dirac_coin(theta: float) -> ComplexArray:
    """Real rotation coin ``[[cos t, sin t], [-sin t, cos t]]``."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=np.complex128)


def block_coin(coins: Sequence[ComplexArray]) -> ComplexArray:
    """Direct sum of per-sector 2x2 coins."""
    if len(coins) == 0:
        raise ValueError("need at least one coin")
    for c in coins:
        if np.shape(c) != (2, 2):
            raise ValueError(f"each sector coin must be 2x2, got {np.shape(c)}")
    return np.asarray(block_diag(*coins), dtype=np.complex128)


def _as_coins(coins) -> list:
    if isinstance(coins, np.ndarray) and coins.ndim == 2:
        return [coins]
    return list(coins)


def apply_walk_step(state: WalkState, coins, lattice: LatticeSpec) -> WalkState:
    """
    One walk step: coin on every site, then up moves by -a and down by +a.

    Raises
    ------
    OutOfSupport
        On an open lattice when amplitude would be pushed past ``-N`` or ``N``.
    """
    coins = _as_coins(coins)
    amps = state.amplitudes
    if amps.shape != (lattice.size, 2 * len(coins)):
        raise ValueError(
            f"state shape {amps.shape} does not match lattice size {lattice.size} "
            f"and {len(coins)} sector coin(s)"
        )
    a = lattice.spacing
    mixed = amps @ block_coin(coins).T
    up, down = mixed[:, 0::2], mixed[:, 1::2]
    out = np.empty_like(mixed)
    if lattice.periodic:
        out[:, 0::2] = np.roll(up, -a, axis=0)
        out[:, 1::2] = np.roll(down, a, axis=0)
    else:
        if np.any(up[:a] != 0) or np.any(down[-a:] != 0):
            raise OutOfSupport("walker reached the edge of an open lattice")
        out[:] = 0
        out[:-a, 0::2] = up[a:]
        out[a:, 1::2] = down[:-a]
    return WalkState(out)


def evolve(state: WalkState, coins, lattice: LatticeSpec, t: int) -> WalkState:
    """Apply ``t`` walk steps; ``t = 0`` returns the input."""
    if t < 0:
        raise ValueError("t must be non-negative")
    coins = _as_coins(coins)
    for _ in range(t):
        state = apply_walk_step(state, coins, lattice)
    return state


def momentum_state(m: MomentumSpec, lattice: LatticeSpec) -> ComplexArray:
    """
    Plane wave ``c_x = exp(-i k x) / sqrt(2N+1)`` on ``x = -N..N``.

    The returned array is aligned with ``lattice.positions``. Only periodic
    lattices make this an exact eigenstate of the translations.
    """
    if not lattice.periodic:
        raise ValueError("momentum eigenstates require a periodic lattice")
    if m.half_size != lattice.half_size:
        raise InvalidMomentum(
            f"momentum quantized for N={m.half_size}, lattice has N={lattice.half_size}"
        )
    x = lattice.positions
    return np.exp(-1j * m.value * x) / np.sqrt(lattice.size)


def momentum_step_operator(coins, k_tilde: float) -> ComplexArray:
    """
    Step operator restricted to momentum ``k``: ``diag(e^{-ik~}, e^{ik~}) B``
    in every sector.
    """
    coins = _as_coins(coins)
    phase = np.diag([np.exp(-1j * k_tilde), np.exp(1j * k_tilde)])
    return block_coin([phase @ c for c in coins])


def dispersion_energy(theta, k_tilde):
    """
    Walk energy ``arccos(cos(theta) cos(k~))`` on the principal branch.

    Evaluated as ``2 arcsin(sqrt(sin^2(theta/2) + cos(theta) sin^2(k~/2)))``,
    which is the same function without cancellation near ``E = 0``.
    """
    theta = np.asarray(theta, dtype=float)
    k_tilde = np.asarray(k_tilde, dtype=float)
    c = np.cos(theta)
    h = np.sin(theta / 2) ** 2 + c * np.sin(k_tilde / 2) ** 2
    root = np.sqrt(np.clip(h, 0.0, 1.0))
    # hypot keeps tiny angles from underflowing when both terms are positive
    root = np.where(
        c >= 0, np.minimum(np.hypot(np.sin(theta / 2), np.sqrt(np.abs(c)) * np.sin(k_tilde / 2)), 1.0), root
    )
    e = 2.0 * np.arcsin(root)
    return e if e.ndim else float(e)


def mass_eigenvector(theta: float, k: float) -> tuple[complex, complex]:
    """
    Positive-energy eigenvector ``(f, g)`` of the momentum-space step.

    Parameters
    ----------
    theta : float
        Coin angle (mass times tau).
    k : float
        Dimensionless momentum ``k~ = k a``.

    Returns
    -------
    (f, g) : tuple of complex
        Unit vector with ``W_k (f, g)^T = e^{-iE} (f, g)^T``. For the massless
        forward mode (``theta = 0``, ``sin k >= 0``) the closed form is 0/0
        and ``(1, 0)`` is returned.

    Notes
    -----
    The bracket ``cos(theta) sin(k) - sqrt(1 - cos^2(theta) cos^2(k))`` is
    rewritten as ``-sin^2(theta) / (cos(theta) sin(k) + sqrt(...))`` when the
    two terms would cancel.
    """
    c, s = np.cos(theta), np.sin(theta)
    r = np.sin(dispersion_energy(theta, k))  # sqrt(1 - cos^2 theta cos^2 k)
    cs = c * np.sin(k)
    if cs > 0:
        bracket = -s * (s / (cs + r))
    else:
        bracket = cs - r
    scale = max(abs(s), abs(bracket))
    if scale == 0.0:
        return 1.0 + 0j, 0j
    s, bracket = s / scale, bracket / scale
    norm = np.hypot(s, bracket)
    f = (s / norm) * np.exp(-1j * k)
    g = 1j * (bracket / norm)
    return complex(f), complex(g)


def reduce_to_coin(state: WalkState) -> ComplexArray:
    """Coin density matrix ``sum_x psi_x psi_x^dagger`` (position traced out)."""
    psi = state.amplitudes
    return psi.T @ psi.conj()
