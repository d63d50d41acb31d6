"""
Plain-text scenario files: one ``key = value`` per line, ``#`` starts a comment.

Recognised keys::

    flavors           2 or 3 (defaults to the number of theta values)
    theta             comma-separated coin angles, one per mass sector
    k_tilde           walk momentum (snapped to the lattice for plane waves)
    lattice_N         half lattice size N (sites -N..N)
    spacing           lattice spacing a (default 1)
    boundary          periodic | open (default: periodic for plane waves and
                      amplitude files, open for localized starts)
    phi               two-flavor mixing angle
    phi12 phi13 phi23 delta alpha1 alpha2   three-flavor mixing
    initial_flavor    e | mu | tau, or a 1-based index
    steps             number of walk steps
    initial_position  momentum | localized | path to an amplitudes file
    output            CSV path for ``simulate``
    energy_model      walk | ultra-relativistic (analytic comparison)
    entropy           on | off

An amplitudes file holds ``x re im`` per line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .neutrino import EnergyModel, FlavorScenario, MixingSpec
from .walk import Boundary, LatticeSpec

__all__ = ["ScenarioConfig", "parse_config", "parse_config_text", "read_amplitudes"]

_KNOWN = {
    "flavors", "theta", "k_tilde", "lattice_n", "spacing", "boundary", "phi",
    "phi12", "phi13", "phi23", "delta", "alpha1", "alpha2", "initial_flavor",
    "steps", "initial_position", "output", "energy_model", "entropy",
}
_MIXING3 = ("phi12", "phi13", "phi23", "delta", "alpha1", "alpha2")


@dataclass
class ScenarioConfig:
    thetas: tuple[float, ...]
    k_tilde: float
    lattice_n: int
    flavors: int
    spacing: int = 1
    boundary: Boundary | None = None
    phi: float | None = None
    mixing3: dict[str, float] = field(default_factory=dict)
    initial_flavor: str = "1"
    steps: int = 0
    initial_position: str = "momentum"
    output: Path | None = None
    energy_model: EnergyModel = EnergyModel.WALK
    entropy: bool = False
    base_dir: Path = Path(".")

    @property
    def mixing_spec(self) -> MixingSpec:
        """Three-flavor mixing; missing angles are zero (``phi`` fills phi12)."""
        vals = {k: self.mixing3.get(k, 0.0) for k in _MIXING3}
        if "phi12" not in self.mixing3 and self.phi is not None:
            vals["phi12"] = self.phi
        return MixingSpec(
            vals["phi12"], vals["phi13"], vals["phi23"],
            vals["delta"], vals["alpha1"], vals["alpha2"],
        )

    def lattice(self) -> LatticeSpec:
        boundary = self.boundary
        if boundary is None:
            boundary = Boundary.OPEN if self.initial_position == "localized" else Boundary.PERIODIC
        try:
            return LatticeSpec(self.lattice_n, self.spacing, boundary)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def position(self):
        if self.initial_position in ("momentum", "localized"):
            return self.initial_position
        return read_amplitudes(self.base_dir / self.initial_position)

    def scenario(self) -> FlavorScenario:
        if self.flavors not in (2, 3):
            raise ConfigError(f"flavors must be 2 or 3, got {self.flavors}")
        if len(self.thetas) != self.flavors:
            raise ConfigError(f"{self.flavors} flavors need {self.flavors} theta values")
        if self.flavors == 2:
            if self.phi is None:
                raise ConfigError("two flavors need 'phi'")
            mixing = self.phi
        else:
            if "phi12" not in self.mixing3 and self.phi is None:
                raise ConfigError("three flavors need phi12, phi13, phi23")
            mixing = self.mixing_spec
        labels = ("mu", "tau") if self.flavors == 2 else ("e", "mu", "tau")
        flavor = self.initial_flavor
        if flavor in labels:
            alpha = labels.index(flavor)
        else:
            try:
                alpha = int(flavor) - 1
            except ValueError:
                raise ConfigError(f"unknown initial_flavor {flavor!r}") from None
            if not 0 <= alpha < self.flavors:
                raise ConfigError(f"initial_flavor {flavor} out of range")
        try:
            return FlavorScenario(
                self.thetas, self.k_tilde, self.lattice(), mixing,
                alpha, self.steps, self.position(),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _float(key, value):
    try:
        x = float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: must be finite")
    return x


def _int(key, value):
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def parse_config_text(text: str, base_dir: Path | str = ".") -> ScenarioConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in _KNOWN:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    for required in ("theta", "k_tilde", "lattice_n"):
        if required not in raw:
            raise ConfigError(f"missing required key {required!r}")
    thetas = tuple(_float("theta", v) for v in raw["theta"].split(",") if v.strip())
    if not thetas:
        raise ConfigError("theta: need at least one angle")

    cfg = ScenarioConfig(
        thetas=thetas,
        k_tilde=_float("k_tilde", raw["k_tilde"]),
        lattice_n=_int("lattice_N", raw["lattice_n"]),
        flavors=_int("flavors", raw.get("flavors", str(len(thetas)))),
        spacing=_int("spacing", raw.get("spacing", "1")),
        initial_flavor=raw.get("initial_flavor", "1").lower(),
        steps=_int("steps", raw.get("steps", "0")),
        initial_position=raw.get("initial_position", "momentum"),
        base_dir=Path(base_dir),
    )
    if cfg.steps < 0:
        raise ConfigError("steps must be >= 0")
    if "boundary" in raw:
        try:
            cfg.boundary = Boundary(raw["boundary"].lower())
        except ValueError:
            raise ConfigError(f"boundary must be periodic or open, got {raw['boundary']!r}") from None
    if "phi" in raw:
        cfg.phi = _float("phi", raw["phi"])
    cfg.mixing3 = {k: _float(k, raw[k]) for k in _MIXING3 if k in raw}
    if "output" in raw:
        cfg.output = cfg.base_dir / raw["output"]
    if "energy_model" in raw:
        try:
            cfg.energy_model = EnergyModel(raw["energy_model"].lower())
        except ValueError:
            raise ConfigError(f"unknown energy_model {raw['energy_model']!r}") from None
    if "entropy" in raw:
        flag = raw["entropy"].lower()
        if flag not in ("on", "off"):
            raise ConfigError("entropy must be 'on' or 'off'")
        cfg.entropy = flag == "on"
    if cfg.initial_position == "localized" and cfg.boundary is not Boundary.PERIODIC:
        if cfg.lattice_n < cfg.steps * cfg.spacing:
            raise ConfigError("localized starts need lattice_N >= steps * spacing")
    return cfg


def parse_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config_text(text, path.parent)


def read_amplitudes(path) -> dict[int, complex]:
    """Parse ``x re im`` lines into ``{x: re + i im}``."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read amplitudes file {path}: {exc}") from exc
    amps: dict[int, complex] = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) not in (2, 3):
            raise ConfigError(f"{path}:{lineno}: expected 'x re [im]'")
        x = _int("x", parts[0])
        im = _float("im", parts[2]) if len(parts) == 3 else 0.0
        amps[x] = complex(_float("re", parts[1]), im)
    if not amps:
        raise ConfigError(f"{path}: no amplitudes")
    return amps
