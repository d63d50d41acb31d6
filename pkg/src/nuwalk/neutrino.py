"""
Neutrino flavor oscillations on the walk's coin space.

Each mass eigenstate is the positive-energy eigenvector ``(f, g)`` of its own
2x2 coin sector at momentum ``k~``; flavor states mix the sectors through
the PMNS matrix (or a 2x2 rotation for two flavors). Transition
probabilities follow from the reduced coin channel, with the plane-wave
formula as an independent check.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import InfeasibleAngles
from .kraus import (
    ExtendedKrausFamily,
    apply_channel,
    block_kraus,
    extend_kraus,
    initial_kraus,
    kraus_step,
    purity,
)
from .walk import (
    LatticeSpec,
    MomentumSpec,
    block_coin,
    build_dirac_coin,
    dispersion_energy,
    mass_eigenvector,
    momentum_state,
)

__all__ = [
    "MixingSpec",
    "EnergyModel",
    "FlavorScenario",
    "TransitionSeries",
    "WalkAngles",
    "FLAVORS_2",
    "FLAVORS_3",
    "pmns_factors",
    "pmns_matrix",
    "two_flavor_mixing",
    "mass_energies",
    "mass_state_coin",
    "flavor_state_coin",
    "flavor_density",
    "flavor_projector",
    "initial_family",
    "walk_transition_series",
    "mixing_amplitudes",
    "analytic_transition",
    "analytic_series",
    "physics_to_walk",
    "OSC_PHASE_CONSTANT",
]

FLAVORS_2 = ("mu", "tau")
FLAVORS_3 = ("e", "mu", "tau")

# Delta m^2 L / 4E = 1.26693 * dm2[eV^2] * L[km] / E[GeV]
OSC_PHASE_CONSTANT = 1.2669328


@dataclass(frozen=True)
class MixingSpec:
    """Three-flavor mixing angles, Dirac CP phase and Majorana phases (radians)."""

    phi12: float
    phi13: float
    phi23: float
    delta_cp: float = 0.0
    alpha1: float = 0.0
    alpha2: float = 0.0

    def __post_init__(self):
        for name in ("phi12", "phi13", "phi23", "delta_cp", "alpha1", "alpha2"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"mixing parameter {name!r} must be finite")


class EnergyModel(enum.Enum):
    WALK = "walk"
    ULTRA_RELATIVISTIC = "ultra-relativistic"


def pmns_factors(m: MixingSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The factors ``(U3, U2, U1, U0)`` with ``U = U3 U2 U1 U0``."""
    c12, s12 = np.cos(m.phi12), np.sin(m.phi12)
    c13, s13 = np.cos(m.phi13), np.sin(m.phi13)
    c23, s23 = np.cos(m.phi23), np.sin(m.phi23)
    ed = np.exp(1j * m.delta_cp)
    u3 = np.array([[1, 0, 0], [0, c23, s23], [0, -s23, c23]], dtype=np.complex128)
    u2 = np.array(
        [[c13, 0, s13 / ed], [0, 1, 0], [-s13 * ed, 0, c13]], dtype=np.complex128
    )
    u1 = np.array([[c12, s12, 0], [-s12, c12, 0], [0, 0, 1]], dtype=np.complex128)
    u0 = np.diag([np.exp(0.5j * m.alpha1), np.exp(0.5j * m.alpha2), 1.0]).astype(np.complex128)
    return u3, u2, u1, u0


def pmns_matrix(m: MixingSpec) -> np.ndarray:
    """3x3 PMNS matrix; rows are flavors (e, mu, tau), columns mass states."""
    u3, u2, u1, u0 = pmns_factors(m)
    return u3 @ u2 @ u1 @ u0


def two_flavor_mixing(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [-s, c]], dtype=np.complex128)


@dataclass(frozen=True)
class FlavorScenario:
    """
    Complete description of a walk-based oscillation run.

    ``mixing`` is a single angle for two flavors or a :class:`MixingSpec` for
    three. ``initial_position`` is ``"momentum"`` (plane wave at the snapped
    ``k_tilde``; needs a periodic lattice), ``"localized"`` (the origin) or a
    mapping ``{x: amplitude}``.
    """

    coin_angles: tuple[float, ...]
    k_tilde: float
    lattice: LatticeSpec
    mixing: MixingSpec | float
    initial_flavor: int = 0
    steps: int = 0
    initial_position: str | Mapping[int, complex] = "momentum"
    _momentum: MomentumSpec | None = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        angles = tuple(float(t) for t in self.coin_angles)
        object.__setattr__(self, "coin_angles", angles)
        n = len(angles)
        if n not in (2, 3):
            raise ValueError(f"need 2 or 3 coin angles, got {n}")
        if n == 2 and isinstance(self.mixing, MixingSpec):
            raise ValueError("two flavors take a single mixing angle")
        if n == 3 and not isinstance(self.mixing, MixingSpec):
            raise ValueError("three flavors need a MixingSpec")
        if not all(np.isfinite(angles)) or not np.isfinite(self.k_tilde):
            raise ValueError("angles and k_tilde must be finite")
        if not 0 <= self.initial_flavor < n:
            raise ValueError(f"initial_flavor must be in 0..{n - 1}")
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        pos = self.initial_position
        if isinstance(pos, str):
            if pos not in ("momentum", "localized"):
                raise ValueError(f"unknown initial_position {pos!r}")
            if pos == "momentum":
                if not self.lattice.periodic:
                    raise ValueError("momentum starts require a periodic lattice")
                object.__setattr__(
                    self, "_momentum", MomentumSpec.nearest(self.k_tilde, self.lattice)
                )
            elif (
                not self.lattice.periodic
                and self.lattice.half_size < self.steps * self.lattice.spacing
            ):
                raise ValueError("localized starts need N >= steps * a")

    @property
    def n_flavors(self) -> int:
        return len(self.coin_angles)

    @property
    def labels(self) -> tuple[str, ...]:
        return FLAVORS_2 if self.n_flavors == 2 else FLAVORS_3

    @property
    def momentum(self) -> MomentumSpec | None:
        return self._momentum

    @property
    def effective_k_tilde(self) -> float:
        """Snapped lattice momentum for plane-wave starts, else the request."""
        return self._momentum.k_tilde if self._momentum is not None else float(self.k_tilde)

    @property
    def snap_distance(self) -> float:
        return abs(self.effective_k_tilde - self.k_tilde)

    @property
    def mixing_matrix(self) -> np.ndarray:
        if self.n_flavors == 2:
            return two_flavor_mixing(self.mixing)
        return pmns_matrix(self.mixing)

    @property
    def coins(self) -> list[np.ndarray]:
        return [build_dirac_coin(t) for t in self.coin_angles]

    def flavor_index(self, flavor) -> int:
        if isinstance(flavor, str):
            return self.labels.index(flavor)
        return int(flavor)


@dataclass(frozen=True)
class TransitionSeries:
    """``probabilities[t, beta] = P(alpha -> beta; t)`` for t = 0..steps."""

    alpha: int
    labels: tuple[str, ...]
    probabilities: NDArray[np.float64] = field(repr=False)
    k_tilde: float = 0.0
    completeness: NDArray[np.float64] | None = field(default=None, repr=False)
    purity: NDArray[np.float64] | None = field(default=None, repr=False)

    @property
    def steps(self) -> NDArray[np.int64]:
        return np.arange(self.probabilities.shape[0])

    def column(self, beta) -> NDArray[np.float64]:
        if isinstance(beta, str):
            beta = self.labels.index(beta)
        return self.probabilities[:, beta]

    def row_sums(self) -> NDArray[np.float64]:
        return self.probabilities.sum(axis=1)


def mass_energies(scenario: FlavorScenario, model=EnergyModel.WALK) -> np.ndarray:
    """Per-sector energies in units of 1/tau."""
    model = EnergyModel(model)
    theta = np.asarray(scenario.coin_angles)
    k = scenario.effective_k_tilde
    if model is EnergyModel.WALK:
        return dispersion_energy(theta, k)
    return k + theta**2 / (2.0 * k)


def mass_state_coin(f: int, scenario: FlavorScenario) -> np.ndarray:
    """Coin vector of mass state ``f``: ``(f, g)`` in sector f, zero elsewhere."""
    n = scenario.n_flavors
    if not 0 <= f < n:
        raise IndexError(f"sector {f} out of range for {n} flavors")
    v = np.zeros(2 * n, dtype=np.complex128)
    v[2 * f:2 * f + 2] = mass_eigenvector(scenario.coin_angles[f], scenario.effective_k_tilde)
    return v


def _mass_basis(scenario):
    return np.stack([mass_state_coin(f, scenario) for f in range(scenario.n_flavors)], axis=1)


def flavor_state_coin(alpha, scenario: FlavorScenario) -> np.ndarray:
    """``|nu_alpha>_c = sum_i U_{alpha i} |nu_i>_c``."""
    a = scenario.flavor_index(alpha)
    return _mass_basis(scenario) @ scenario.mixing_matrix[a]


def flavor_density(alpha, scenario: FlavorScenario) -> np.ndarray:
    v = flavor_state_coin(alpha, scenario)
    return np.outer(v, v.conj())


def flavor_projector(beta, scenario: FlavorScenario) -> np.ndarray:
    return flavor_density(beta, scenario)


def initial_family(scenario: FlavorScenario) -> ExtendedKrausFamily:
    """Block Kraus family at t = 0 for the scenario's initial position state."""
    lattice = scenario.lattice
    pos = scenario.initial_position
    if isinstance(pos, str) and pos == "localized":
        sector = extend_kraus(initial_kraus(2, lattice.spacing), {0: 1.0})
    elif isinstance(pos, str):
        c = momentum_state(scenario.momentum, lattice)
        sector = extend_kraus(initial_kraus(2, lattice.spacing), c, lattice)
    else:
        sector = extend_kraus(
            initial_kraus(2, lattice.spacing), dict(pos), lattice if lattice.periodic else None
        )
    return block_kraus([sector] * scenario.n_flavors)


def walk_transition_series(
    scenario: FlavorScenario,
    steps: int | None = None,
    coins: Sequence[np.ndarray] | None = None,
) -> TransitionSeries:
    """
    Transition probabilities from the reduced coin channel.

    The block Kraus family is advanced with the recurrence one step at a time;
    at each step the channel maps the initial flavor density matrix and the
    probability is ``Tr[|nu_beta><nu_beta| rho_c(t)]``. ``coins`` overrides
    the scenario's Dirac coins (used by the validation negative control).
    """
    steps = scenario.steps if steps is None else steps
    n = scenario.n_flavors
    coin = block_coin(scenario.coins if coins is None else coins)
    rho0 = flavor_density(scenario.initial_flavor, scenario)
    flavor_vecs = np.stack([flavor_state_coin(b, scenario) for b in range(n)])

    probs = np.empty((steps + 1, n))
    resid = np.empty(steps + 1)
    pur = np.empty(steps + 1)
    family = initial_family(scenario)
    for t in range(steps + 1):
        if t:
            family = kraus_step(family, coin)
        rho = apply_channel(family, rho0)
        probs[t] = np.real(np.einsum("bi,ij,bj->b", flavor_vecs.conj(), rho, flavor_vecs))
        resid[t] = family.completeness_residual()
        pur[t] = purity(rho)
    return TransitionSeries(
        scenario.initial_flavor, scenario.labels, probs, scenario.effective_k_tilde, resid, pur
    )


def mixing_amplitudes(alpha, t, scenario: FlavorScenario, model=EnergyModel.WALK) -> np.ndarray:
    """
    ``U~_{alpha beta}(t) = sum_j U_{alpha j} U*_{beta j} exp(-i E_j t)``.

    ``t`` may be a scalar or an array (real values allowed); the flavor index
    beta runs along the last axis.
    """
    a = scenario.flavor_index(alpha)
    u = scenario.mixing_matrix
    energies = mass_energies(scenario, model)
    t = np.asarray(t, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(t, energies))
    return (phases * u[a]) @ u.conj().T


def analytic_transition(alpha, beta, t, scenario: FlavorScenario, energy_model=EnergyModel.WALK):
    """Plane-wave probability ``|U~_{alpha beta}(t)|^2``."""
    b = scenario.flavor_index(beta)
    amp = mixing_amplitudes(alpha, t, scenario, energy_model)[..., b]
    p = np.abs(amp) ** 2
    return p if p.ndim else float(p)


def analytic_series(scenario: FlavorScenario, energy_model=EnergyModel.WALK, steps: int | None = None) -> TransitionSeries:
    steps = scenario.steps if steps is None else steps
    amp = mixing_amplitudes(scenario.initial_flavor, np.arange(steps + 1), scenario, energy_model)
    return TransitionSeries(
        scenario.initial_flavor, scenario.labels, np.abs(amp) ** 2, scenario.effective_k_tilde
    )


@dataclass(frozen=True)
class WalkAngles:
    """Coin angles mapped from mass splittings, with the scale used."""

    thetas: tuple[float, ...]
    delta_theta2: tuple[float, ...]
    scale: float
    energy_model: EnergyModel


def physics_to_walk(
    delta_m2: Sequence[float],
    k_tilde: float,
    theta_ref: float = 0.001,
    *,
    scale: float | None = None,
    energy_gev: float | None = None,
    km_per_step: float | None = None,
    energy_model=EnergyModel.ULTRA_RELATIVISTIC,
) -> WalkAngles:
    """
    Coin angles reproducing given mass splittings.

    The walk phase per step ``dtheta^2 / (4 k~)`` is matched to the physical
    phase per baseline unit ``dm^2 L / (4E)``, so
    ``dtheta^2_{j1} = scale * dm^2_{j1}``.

    Parameters
    ----------
    delta_m2 : sequence of float
        Splittings ``m_j^2 - m_1^2`` in eV^2 for j = 2..n.
    k_tilde : float
        Walk momentum.
    theta_ref : float
        Angle of the lightest sector.
    scale : float, optional
        ``dtheta^2`` per eV^2. If omitted it is
        ``4 k~ * 1.26693 * km_per_step / energy_gev``.
    energy_model : EnergyModel
        ``ULTRA_RELATIVISTIC`` sets ``theta_j = sqrt(theta_1^2 + dtheta^2)``.
        ``WALK`` instead solves ``E(theta_j) - E(theta_1) = dtheta^2 / (2 k~)``
        on the exact dispersion, which stays accurate when theta is not small
        against k~.

    Raises
    ------
    InfeasibleAngles
        If a mapped angle is outside (0, pi/2) or the dispersion cannot reach
        the required energy. Angles above 0.3 only warn.
    """
    energy_model = EnergyModel(energy_model)
    if scale is None:
        if energy_gev is None or km_per_step is None:
            raise ValueError("give either scale or both energy_gev and km_per_step")
        scale = 4.0 * k_tilde * OSC_PHASE_CONSTANT * km_per_step / energy_gev
    dth2 = scale * np.asarray(delta_m2, dtype=float)

    if energy_model is EnergyModel.ULTRA_RELATIVISTIC:
        sq = theta_ref**2 + dth2
        if np.any(sq < 0):
            raise InfeasibleAngles("negative squared angle")
        thetas = np.sqrt(sq)
    else:
        target = dispersion_energy(theta_ref, k_tilde) + dth2 / (2.0 * k_tilde)
        ratio = np.cos(target) / np.cos(k_tilde)
        if np.any(target > np.pi) or np.any(np.abs(ratio) > 1):
            raise InfeasibleAngles("dispersion cannot reach the requested energy")
        thetas = np.arccos(ratio)

    thetas = np.concatenate([[theta_ref], thetas])
    if np.any(thetas <= 0) or np.any(thetas >= np.pi / 2):
        raise InfeasibleAngles(f"angles {thetas} outside (0, pi/2)")
    if np.any(thetas > 0.3):
        warnings.warn("coin angles above 0.3 rad leave the small-angle regime", stacklevel=2)
    return WalkAngles(tuple(thetas.tolist()), tuple(dth2.tolist()), float(scale), energy_model)
