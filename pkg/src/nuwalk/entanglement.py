"""
Linear entropies of flavor-mode entanglement.

At time t a neutrino born as flavor alpha is the single-excitation mode state
``sum_beta U~_{alpha beta}(t) |..1_beta..>``. Reduced density matrices of
that state give the entropies directly; the closed forms in terms of
transition probabilities (``4P(1-P)`` and the ``8/3`` average) are the
second route, and the two are checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray

from . import tolerances as tol
from .neutrino import (
    EnergyModel,
    FlavorScenario,
    TransitionSeries,
    mixing_amplitudes,
    walk_transition_series,
)

__all__ = [
    "ModeState",
    "EntropyReport",
    "linear_entropy",
    "mode_state",
    "mode_state_vector",
    "single_mode_density",
    "two_flavor_entropy",
    "partial_entropy",
    "average_entropy",
    "entropy_from_probability",
    "partial_entropies_from_probabilities",
    "average_entropy_from_probabilities",
    "entropy_report",
]


def linear_entropy(rho) -> float:
    """``d/(d-1) (1 - Tr rho^2)``; 0 for pure states, 1 for maximally mixed."""
    rho = np.asarray(rho)
    d = rho.shape[0]
    if d < 2:
        return 0.0
    return float(d / (d - 1) * (1.0 - np.real(np.trace(rho @ rho))))


@dataclass(frozen=True)
class ModeState:
    """Coefficients ``U~_{alpha beta}(t)`` of the single-excitation mode state."""

    alpha: int
    t: float
    amplitudes: NDArray[np.complex128] = field(repr=False)

    @property
    def probabilities(self) -> NDArray[np.float64]:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.probabilities)))


def mode_state(alpha, t, scenario: FlavorScenario, model=EnergyModel.WALK) -> ModeState:
    """Mode-state coefficients using the walk dispersion energies by default."""
    a = scenario.flavor_index(alpha)
    amps = mixing_amplitudes(a, float(t), scenario, model)
    return ModeState(a, float(t), amps)


def mode_state_vector(state: ModeState) -> NDArray[np.complex128]:
    """
    The mode state in the full ``2^n`` occupation space.

    Mode 0 is the most significant bit, so for three flavors e, mu, tau map
    to ``|100>, |010>, |001>`` (indices 4, 2, 1).
    """
    n = state.amplitudes.size
    psi = np.zeros(2**n, dtype=np.complex128)
    for beta, amp in enumerate(state.amplitudes):
        psi[1 << (n - 1 - beta)] = amp
    return psi


def single_mode_density(psi, mode: int, n_modes: int) -> NDArray[np.complex128]:
    """2x2 density matrix of one occupation mode, all other modes traced out."""
    t = np.asarray(psi).reshape((2,) * n_modes)
    t = np.moveaxis(t, mode, 0).reshape(2, -1)
    return t @ t.conj().T


def entropy_from_probability(p):
    """``4 P (1 - P)``."""
    p = np.asarray(p, dtype=float)
    s = 4.0 * p * (1.0 - p)
    return s if s.ndim else float(s)


def _probabilities(alpha, t, scenario, source):
    if source == "analytic":
        return mode_state(alpha, t, scenario).probabilities
    if source != "walk":
        raise ValueError(f"source must be 'walk' or 'analytic', got {source!r}")
    if int(t) != t or t < 0:
        raise ValueError("walk-derived entropies need an integer step t >= 0")
    series = walk_transition_series(
        _with_flavor(scenario, alpha), steps=int(t)
    )
    return series.probabilities[int(t)]


def _with_flavor(scenario, alpha):
    a = scenario.flavor_index(alpha)
    if a == scenario.initial_flavor:
        return scenario
    return replace(scenario, initial_flavor=a)


def two_flavor_entropy(alpha, t, scenario: FlavorScenario, source: str = "walk") -> float:
    """Entropy of either mode for two flavors, ``4 P_1 P_2``."""
    if scenario.n_flavors != 2:
        raise ValueError("two_flavor_entropy needs a two-flavor scenario")
    p = _probabilities(alpha, t, scenario, source)
    return float(4.0 * p[0] * p[1])


def partial_entropy(alpha, traced, t, scenario: FlavorScenario, source: str = "walk") -> float:
    """
    ``S_alpha^{(beta1, beta2; gamma)} = 4 P_gamma (1 - P_gamma)`` for three
    flavors, where ``traced`` names gamma.
    """
    if scenario.n_flavors != 3:
        raise ValueError("partial_entropy needs a three-flavor scenario")
    g = scenario.flavor_index(traced)
    p = _probabilities(alpha, t, scenario, source)
    return entropy_from_probability(p[g])


def average_entropy(alpha, t, scenario: FlavorScenario, source: str = "walk") -> float:
    """``(8/3)(P_e P_mu + P_e P_tau + P_mu P_tau)``."""
    if scenario.n_flavors != 3:
        raise ValueError("average_entropy needs a three-flavor scenario")
    p = _probabilities(alpha, t, scenario, source)
    return float(average_entropy_from_probabilities(p))


def partial_entropies_from_probabilities(p):
    """Partial entropies, one per traced flavor, along the last axis."""
    return entropy_from_probability(p)


def average_entropy_from_probabilities(p):
    p = np.asarray(p, dtype=float)
    pe, pm, pt = p[..., 0], p[..., 1], p[..., 2]
    return 8.0 / 3.0 * (pe * pm + pe * pt + pm * pt)


@dataclass(frozen=True)
class EntropyReport:
    """
    Entropies per step.

    ``entropies[t, gamma]`` is the single-mode entropy of flavor gamma (for
    two flavors both columns coincide); ``average`` is only set for three
    flavors.
    """

    labels: tuple[str, ...]
    entropies: NDArray[np.float64] = field(repr=False)
    average: NDArray[np.float64] | None = field(default=None, repr=False)


def entropy_report(series: TransitionSeries) -> EntropyReport:
    p = series.probabilities
    if p.shape[1] == 2:
        s = 4.0 * p[:, 0] * p[:, 1]
        ent = np.stack([s, s], axis=1)
        avg = None
    else:
        ent = partial_entropies_from_probabilities(p)
        avg = average_entropy_from_probabilities(p)
    lo, hi = -tol.NORMALIZATION, 1.0 + tol.NORMALIZATION
    if np.any(ent < lo) or np.any(ent > hi):
        raise ValueError("entropy outside [0, 1]; probabilities are not normalized")
    return EntropyReport(series.labels, ent, avg)
