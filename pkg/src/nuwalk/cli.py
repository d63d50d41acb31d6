"""
Command-line front end.

    nuwalk simulate <config>          CSV series + summary
    nuwalk validate <config>          oracle-equivalence checks, exit 0 iff all pass
    nuwalk kraus <config> --t N       Kraus operators at step N as a matrix dump
    nuwalk embed <config>             8x8 one-hot factors and their product

Exit codes: 0 ok, 1 failed validation, 2 configuration error, 3 numerical
self-check failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import tolerances as tol
from .config import ScenarioConfig, parse_config
from .embedding import Factor, controlled_reading_check, embed_factor, embedded_product, restrict
from .entanglement import entropy_report
from .errors import ConfigError, NumericalError
from .formats import format_matrix_dump, format_series_csv, write_atomic
from .kraus import block_kraus, completeness_residual, extend_kraus, initial_kraus, kraus_at, kraus_step
from .neutrino import analytic_series, pmns_matrix, walk_transition_series
from .walk import LatticeSpec, WalkState, block_coin, build_dirac_coin, evolve, momentum_state

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3
SERIES_RESIDUAL_LIMIT = 1e-8
ORACLE_STEPS = 10


def _coins(cfg: ScenarioConfig, corrupt: float = 0.0):
    return [(1.0 + corrupt) * build_dirac_coin(t) for t in cfg.thetas]


def first_crossings(series) -> dict[str, int | None]:
    """First step at which each P(alpha->beta), beta != alpha, reaches P(alpha->alpha)."""
    p = series.probabilities
    a = series.alpha
    out = {}
    for b, label in enumerate(series.labels):
        if b == a:
            continue
        hit = np.nonzero(p[:, b] >= p[:, a])[0]
        out[label] = int(hit[0]) if hit.size else None
    return out


def cmd_simulate(cfg: ScenarioConfig, out=None) -> int:
    out = out or sys.stdout
    scenario = cfg.scenario()
    series = walk_transition_series(scenario)
    report = entropy_report(series) if cfg.entropy else None
    residual = float(np.max(series.completeness))
    if residual > SERIES_RESIDUAL_LIMIT:
        raise NumericalError(f"completeness residual {residual:.3e} exceeds {SERIES_RESIDUAL_LIMIT:g}")

    text = format_series_csv(series, report)
    target = cfg.output
    if target is not None:
        write_atomic(target, text)

    a = series.labels[series.alpha]
    print(f"steps: {scenario.steps}", file=out)
    print(
        f"k_tilde: requested {scenario.k_tilde:.12g}, used {scenario.effective_k_tilde:.12g} "
        f"(snap {scenario.snap_distance:.3e})",
        file=out,
    )
    for b, label in enumerate(series.labels):
        col = series.probabilities[:, b]
        print(f"P_{a}{label}: max {col.max():.12g} (t={int(col.argmax())}), min {col.min():.12g}", file=out)
    for label, step in first_crossings(series).items():
        print(f"first crossing P_{a}{label} >= P_{a}{a}: {step if step is not None else 'none'}", file=out)
    print(f"max completeness residual: {residual:.3e}", file=out)
    if target is not None:
        print(f"wrote {target}", file=out)
    else:
        out.write(text)
    return EXIT_OK


def _oracle_deviation(coin, t_max: int) -> float:
    lattice = LatticeSpec(t_max)
    worst = 0.0
    states = [WalkState.localized(v, lattice) for v in np.eye(2)]
    family = initial_kraus()
    for t in range(1, t_max + 1):
        family = kraus_step(family, coin)
        states = [evolve(s, [coin], lattice, 1) for s in states]
        for x in lattice.positions:
            oracle = np.stack([s.at(x, lattice) for s in states], axis=1)
            worst = max(worst, float(np.max(np.abs(family[x] - oracle))))
    return worst


def cmd_validate(cfg: ScenarioConfig, out=None, corrupt: float = 0.0) -> int:
    out = out or sys.stdout
    scenario = cfg.scenario()
    coins = _coins(cfg, corrupt)
    cptp_tol = tol.cptp_tolerance()
    rows = []

    dev = max(_oracle_deviation(c, ORACLE_STEPS) for c in coins)
    rows.append(("kraus vs state vector (t<=10)", dev, tol.UNITARITY))

    family = initial_kraus(2 * len(coins))
    coin = block_coin(coins)
    worst = 0.0
    for _ in range(min(max(scenario.steps, ORACLE_STEPS), 200)):
        family = kraus_step(family, coin)
        worst = max(worst, family.completeness_residual())
    rows.append(("CPTP residual, localized block family", worst, cptp_tol))

    walk = walk_transition_series(scenario, coins=coins)
    rows.append(("CPTP residual, scenario series", float(np.max(walk.completeness)), SERIES_RESIDUAL_LIMIT))
    if scenario.initial_position == "momentum":
        # flavor projectors only span the positive-energy states at k~
        rows.append(("row sums of P", float(np.max(np.abs(walk.row_sums() - 1.0))), 1e-10))
        ana = analytic_series(scenario)
        rows.append(("walk vs analytic series", float(np.max(np.abs(walk.probabilities - ana.probabilities))), 1e-8))

    mixing = cfg.mixing_spec
    emb = float(np.max(np.abs(restrict(embedded_product(mixing)) - pmns_matrix(mixing))))
    rows.append(("embedding restriction vs PMNS", emb, tol.UNITARITY))
    rows.append(("controlled reading of c12 factor", 0.0 if controlled_reading_check(mixing) else 1.0, 0.5))

    ok = True
    width = max(len(r[0]) for r in rows)
    print(f"{'check':<{width}}  {'residual':>10}  {'tolerance':>9}  result", file=out)
    for name, value, limit in rows:
        passed = bool(value < limit)
        ok &= passed
        print(f"{name:<{width}}  {value:10.3e}  {limit:9.1e}  {'PASS' if passed else 'FAIL'}", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_kraus(cfg: ScenarioConfig, t: int, out=None) -> int:
    out = out or sys.stdout
    if t < 0:
        raise ConfigError("--t must be >= 0")
    coins = _coins(cfg)
    if cfg.initial_position == "localized":
        family = kraus_at(t, coins if len(coins) > 1 else coins[0], cfg.spacing)
    else:
        lattice = cfg.lattice()
        if cfg.initial_position == "momentum":
            scenario = cfg.scenario()
            c = momentum_state(scenario.momentum, lattice)
        else:
            c = cfg.position()
        sector = extend_kraus(initial_kraus(2, cfg.spacing), c, lattice if lattice.periodic else None)
        family = block_kraus([sector] * len(coins))
        coin = block_coin(coins)
        for _ in range(t):
            family = kraus_step(family, coin)
    blocks = [(f"x={int(x)}", op) for x, op in zip(family.positions, family.ops)]
    header = {"step": family.step, "dim": family.dim, "spacing": family.spacing, "operators": len(family)}
    footer = {"completeness_residual": f"{completeness_residual(family.ops):.3e}"}
    out.write(format_matrix_dump(blocks, header, footer))
    return EXIT_OK


def cmd_embed(cfg: ScenarioConfig, out=None) -> int:
    out = out or sys.stdout
    mixing = cfg.mixing_spec
    blocks = [(f.name, embed_factor(f, mixing).matrix) for f in Factor]
    blocks.append(("U3U2U1U0", embedded_product(mixing)))
    header = {"basis": "b2b1b0", "e": 4, "mu": 2, "tau": 1}
    out.write(format_matrix_dump(blocks, header))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nuwalk", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("simulate", help="write the transition-probability series")
    p.add_argument("config", type=Path)
    p = sub.add_parser("validate", help="run the oracle-equivalence checks")
    p.add_argument("config", type=Path)
    p.add_argument("--corrupt-coin", type=float, default=0.0, help=argparse.SUPPRESS)
    p = sub.add_parser("kraus", help="dump Kraus operators at a given step")
    p.add_argument("config", type=Path)
    p.add_argument("--t", type=int, required=True)
    p = sub.add_parser("embed", help="dump the three-qubit mixing factors")
    p.add_argument("config", type=Path)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "validate":
            return cmd_validate(cfg, corrupt=args.corrupt_coin)
        if args.command == "kraus":
            return cmd_kraus(cfg, args.t)
        return cmd_embed(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
