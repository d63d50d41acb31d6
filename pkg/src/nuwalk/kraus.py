"""
Kraus operators of the reduced coin channel.

Tracing the position out of ``W^t (|chi> (x) |psi>)`` leaves the coin channel
``rho -> sum_x K~_x rho K~_x^dagger``. For a walker starting at the origin the
operators ``K_x(t) = <x|W^t|0>`` obey

    K_x(t+1) = C_up K_{x+a}(t) + C_down K_{x-a}(t),   K_x(0) = delta_{x,0} I

with ``C_up = |up><up| C`` and ``C_down = |down><down| C``. Any other initial
position state is a linear combination of shifted copies of these.

Families store only the positions that carry an operator, as a sorted integer
array plus a stacked ``(M, d, d)`` operator array.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from numpy.typing import NDArray

from . import tolerances as tol
from .errors import DimensionMismatch, StepMismatch, UnnormalizedInput
from .walk import LatticeSpec, block_coin

__all__ = [
    "KrausFamily",
    "ExtendedKrausFamily",
    "initial_kraus",
    "kraus_step",
    "kraus_at",
    "kraus_series",
    "extend_kraus",
    "block_kraus",
    "apply_channel",
    "completeness_residual",
    "coin_projectors",
    "is_density_matrix",
    "purity",
]


@dataclass(frozen=True)
class KrausFamily:
    """Kraus operators ``{x: K_x(t)}`` for a walker started at the origin."""

    step: int
    positions: NDArray[np.int64] = field(repr=False)
    ops: NDArray[np.complex128] = field(repr=False)
    spacing: int = 1

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.int64)
        ops = np.asarray(self.ops, dtype=np.complex128)
        if ops.ndim != 3 or ops.shape[0] != pos.shape[0] or ops.shape[1] != ops.shape[2]:
            raise ValueError("ops must have shape (len(positions), d, d)")
        if pos.size > 1 and np.any(np.diff(pos) <= 0):
            raise ValueError("positions must be strictly increasing")
        pos.setflags(write=False)
        ops.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "ops", ops)

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    def __len__(self) -> int:
        return self.positions.shape[0]

    def __getitem__(self, x: int) -> NDArray[np.complex128]:
        """Operator at position ``x``; zero if ``x`` is not stored."""
        i = np.searchsorted(self.positions, x)
        if i < len(self) and self.positions[i] == x:
            return self.ops[i]
        return np.zeros((self.dim, self.dim), dtype=np.complex128)

    def as_dict(self) -> dict[int, NDArray[np.complex128]]:
        return {int(x): op for x, op in zip(self.positions, self.ops)}

    def nonzero_count(self, atol: float = 0.0) -> int:
        return int(np.sum(np.max(np.abs(self.ops), axis=(1, 2)) > atol))

    def completeness_residual(self) -> float:
        return completeness_residual(self.ops)


@dataclass(frozen=True)
class ExtendedKrausFamily(KrausFamily):
    """
    Kraus operators ``K~_x(t)`` for an arbitrary initial position state.

    On a periodic ``lattice`` positions cover every site ``-N..N``; otherwise
    they are the support grown from the initial amplitudes. ``sectors`` is
    the number of 2x2 flavor blocks along the diagonal.
    """

    lattice: LatticeSpec | None = None
    sectors: int = 1


def completeness_residual(ops) -> float:
    """Max-entry deviation of ``sum_x K_x^dagger K_x`` from the identity."""
    ops = np.asarray(ops)
    d = ops.shape[-1]
    a = ops.reshape(-1, d)
    s = a.conj().T @ a
    return float(np.max(np.abs(s - np.eye(d))))


def coin_projectors(coin) -> tuple[np.ndarray, np.ndarray]:
    """``(|up><up| C, |down><down| C)`` summed over all sectors."""
    coin = np.asarray(coin, dtype=np.complex128)
    d = coin.shape[0]
    if coin.shape != (d, d) or d % 2:
        raise ValueError(f"coin must be square with even dimension, got {coin.shape}")
    up = np.zeros(d)
    up[0::2] = 1.0
    return up[:, None] * coin, (1.0 - up)[:, None] * coin


def _prune(positions, ops):
    keep = np.max(np.abs(ops), axis=(1, 2)) >= tol.PRUNE
    return positions[keep], ops[keep]


def initial_kraus(dim: int = 2, spacing: int = 1) -> KrausFamily:
    """Family at ``t = 0``: the identity at the origin."""
    return KrausFamily(0, np.array([0]), np.eye(dim, dtype=np.complex128)[None], spacing)


def _coerce_coin(coin, dim):
    if not isinstance(coin, np.ndarray) or coin.ndim != 2:
        coin = block_coin(list(coin))
    if coin.shape != (dim, dim):
        raise DimensionMismatch(f"coin is {coin.shape}, family operators are {dim}x{dim}")
    return coin


def kraus_step(family: KrausFamily, coin, a: int | None = None) -> KrausFamily:
    """
    Advance a family by one step of the recurrence.

    ``coin`` is a ``d x d`` matrix (a single 2x2 coin, or the block coin of
    several sectors) or a list of per-sector 2x2 coins. Extended families on
    periodic lattices wrap around; everything else grows its support by
    ``+-a``.
    """
    a = family.spacing if a is None else a
    coin = _coerce_coin(coin, family.dim)
    c_up, c_down = coin_projectors(coin)
    ops = family.ops

    lattice = getattr(family, "lattice", None)
    if lattice is not None and lattice.periodic:
        if lattice.spacing != a:
            raise ValueError("step spacing differs from lattice spacing")
        # K(x) = C_up K(x + a) + C_down K(x - a), indices aligned to -N..N
        new_ops = c_up @ np.roll(ops, -a, axis=0)
        new_ops += c_down @ np.roll(ops, a, axis=0)
        return _rebuild(family, family.step + 1, family.positions, new_ops)

    cand = np.concatenate([family.positions - a, family.positions + a])
    contrib = np.concatenate([c_up @ ops, c_down @ ops])
    positions, inverse = np.unique(cand, return_inverse=True)
    new_ops = np.zeros((positions.size,) + ops.shape[1:], dtype=np.complex128)
    np.add.at(new_ops, inverse.ravel(), contrib)
    positions, new_ops = _prune(positions, new_ops)
    return _rebuild(family, family.step + 1, positions, new_ops)


def _rebuild(family, step, positions, ops):
    if isinstance(family, ExtendedKrausFamily):
        return ExtendedKrausFamily(
            step, positions, ops, family.spacing, family.lattice, family.sectors
        )
    return KrausFamily(step, positions, ops, family.spacing)


def kraus_at(t: int, coin, a: int = 1) -> KrausFamily:
    """Family ``K_x(t)`` obtained by iterating the recurrence from ``t = 0``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    coin = np.asarray(coin if isinstance(coin, np.ndarray) else block_coin(list(coin)))
    family = initial_kraus(coin.shape[0], a)
    for _ in range(t):
        family = kraus_step(family, coin, a)
    return family


def kraus_series(family: KrausFamily, coin, steps: int):
    """Yield ``family`` and then each of the next ``steps`` families."""
    yield family
    for _ in range(steps):
        family = kraus_step(family, coin)
        yield family


def _amplitude_arrays(c, lattice):
    if isinstance(c, Mapping):
        pos = np.array(sorted(c), dtype=np.int64)
        amp = np.array([c[int(x)] for x in pos], dtype=np.complex128)
        return pos, amp
    if lattice is None:
        raise ValueError("array amplitudes need a lattice to define positions")
    amp = np.asarray(c, dtype=np.complex128)
    if amp.shape != (lattice.size,):
        raise ValueError(f"expected {lattice.size} amplitudes, got {amp.shape}")
    return lattice.positions, amp


def extend_kraus(
    family: KrausFamily,
    c,
    lattice: LatticeSpec | None = None,
) -> ExtendedKrausFamily:
    """
    ``K~_x(t) = sum_{x'} c_{x'} K_{x - x'}(t)`` for initial amplitudes ``c``.

    Parameters
    ----------
    family : KrausFamily
        Origin-started family at step t.
    c : mapping or array
        Position amplitudes, either ``{x': c_x'}`` or an array aligned with
        ``lattice.positions``.
    lattice : LatticeSpec, optional
        On a periodic lattice ``x`` is folded into ``-N..N`` (circular
        convolution) and every site is kept; otherwise positions range over
        the sum of supports.

    Raises
    ------
    UnnormalizedInput
        If ``sum |c|^2`` differs from 1 by more than the normalization tolerance.
    """
    pos_c, amp = _amplitude_arrays(c, lattice)
    norm2 = float(np.sum(np.abs(amp) ** 2))
    if abs(norm2 - 1.0) > tol.NORMALIZATION:
        raise UnnormalizedInput(f"sum |c|^2 = {norm2!r}, expected 1")
    nz = amp != 0
    pos_c, amp = pos_c[nz], amp[nz]

    target = (pos_c[:, None] + family.positions[None, :]).ravel()
    contrib = (amp[:, None, None, None] * family.ops[None]).reshape((-1,) + family.ops.shape[1:])
    d = family.dim
    if lattice is not None and lattice.periodic:
        idx = lattice.index(target)
        ops = np.zeros((lattice.size, d, d), dtype=np.complex128)
        np.add.at(ops, idx, contrib)
        positions = lattice.positions
    else:
        if lattice is not None:
            lattice.index(target)  # raises OutOfSupport on an open lattice
        positions, inverse = np.unique(target, return_inverse=True)
        ops = np.zeros((positions.size, d, d), dtype=np.complex128)
        np.add.at(ops, inverse.ravel(), contrib)
        positions, ops = _prune(positions, ops)
    return ExtendedKrausFamily(
        family.step, positions, ops, family.spacing, lattice, d // 2
    )


def block_kraus(families: Sequence[KrausFamily]) -> ExtendedKrausFamily:
    """
    Direct sum over flavor sectors, position by position.

    A position missing from one sector's family contributes a zero block.
    """
    if not families:
        raise ValueError("need at least one family")
    steps = {f.step for f in families}
    if len(steps) != 1:
        raise StepMismatch(f"families are at different steps: {sorted(steps)}")
    lattices = {getattr(f, "lattice", None) for f in families}
    if len(lattices) != 1:
        raise ValueError("families live on different lattices")
    spacings = {f.spacing for f in families}
    if len(spacings) != 1:
        raise ValueError("families use different spacings")

    positions = np.unique(np.concatenate([f.positions for f in families]))
    dims = [f.dim for f in families]
    total = sum(dims)
    ops = np.zeros((positions.size, total, total), dtype=np.complex128)
    offset = 0
    for f, d in zip(families, dims):
        idx = np.searchsorted(positions, f.positions)
        ops[idx, offset:offset + d, offset:offset + d] = f.ops
        offset += d
    return ExtendedKrausFamily(
        steps.pop(), positions, ops, spacings.pop(), lattices.pop(), total // 2
    )


def apply_channel(family: KrausFamily, rho0) -> np.ndarray:
    """
    ``sum_x K_x rho0 K_x^dagger``.

    Hermitian inputs are split as ``rho0 = R+ R+^dagger - R- R-^dagger`` so the
    sum over positions becomes one product per sign, ``Z^T conj(Z)`` with
    ``Z`` the stacked columns of ``K_x R``. Pure states cost a single
    matrix-vector product per position.
    """
    rho0 = np.asarray(rho0, dtype=np.complex128)
    d = family.dim
    if rho0.shape != (d, d):
        raise DimensionMismatch(f"density matrix is {rho0.shape}, operators are {d}x{d}")
    ops = family.ops
    if np.max(np.abs(rho0 - rho0.conj().T), initial=0.0) > tol.TRACE:
        terms = ops @ rho0 @ ops.conj().transpose(0, 2, 1)
        return np.sum(terms, axis=0)

    w, v = np.linalg.eigh(rho0)
    out = np.zeros((d, d), dtype=np.complex128)
    for sign in (1.0, -1.0):
        keep = sign * w > 0
        if not np.any(keep):
            continue
        r = v[:, keep] * np.sqrt(sign * w[keep])
        z = (ops @ r).transpose(0, 2, 1).reshape(-1, d)
        out += sign * (z.T @ z.conj())
    return out


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


def is_density_matrix(rho, atol: float = tol.TRACE, psd_tol: float = tol.PSD) -> bool:
    """Hermitian, unit trace and positive semidefinite within tolerance."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        return False
    if abs(np.trace(rho) - 1.0) > atol:
        return False
    return bool(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)) >= -psd_tol)
