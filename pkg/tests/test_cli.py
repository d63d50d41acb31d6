import csv
import io
import os
from pathlib import Path

import numpy as np
import pytest

from nuwalk import cli
from nuwalk.config import parse_config, parse_config_text, read_amplitudes
from nuwalk.entanglement import entropy_report
from nuwalk.errors import ConfigError
from nuwalk.formats import format_matrix_dump, read_matrix_dump, series_header, write_atomic
from nuwalk.kraus import kraus_at
from nuwalk.neutrino import MixingSpec, pmns_matrix, walk_transition_series
from nuwalk.embedding import restrict
from nuwalk.walk import build_dirac_coin

TWO_FLAVOR_CFG = """\
flavors = 2
theta = 0.001, 0.0986
phi = 0.698
k_tilde = 0.05
lattice_N = 628
initial_flavor = mu
steps = {steps}
output = out.csv
"""

THREE_FLAVOR_CFG = """\
theta = 0.001, 0.01963, 0.12797   # one angle per mass sector
phi12 = 0.59437
phi13 = 0.16087
phi23 = 0.69835
k_tilde = 0.1
lattice_N = 100
initial_flavor = e
steps = 40
entropy = on
output = out.csv
"""

DIRAC = """\
theta = {theta}, {theta}
phi = 0
k_tilde = 0
lattice_N = 10
initial_position = localized
"""


def write_cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


# --- config ---------------------------------------------------------------------

def test_parse_two_flavor_config():
    cfg = parse_config_text(TWO_FLAVOR_CFG.format(steps=10))
    sc = cfg.scenario()
    assert sc.labels == ("mu", "tau") and sc.initial_flavor == 0
    assert sc.lattice.periodic and sc.steps == 10 and sc.mixing == 0.698


def test_parse_three_flavor_defaults():
    cfg = parse_config_text(THREE_FLAVOR_CFG)
    assert cfg.flavors == 3 and cfg.entropy
    assert cfg.mixing_spec == MixingSpec(0.59437, 0.16087, 0.69835)


@pytest.mark.parametrize(
    "text",
    [
        "theta = 0.1\nk_tilde = 0.1\n",
        "theta = 0.1, 0.2\nk_tilde = nan\nlattice_N = 5\nphi = 0\n",
        "theta = 0.1, 0.2\nk_tilde = 0.1\nlattice_N = 5\nphi = 0\nsteps = -1\n",
        "theta = 0.1, 0.2\nk_tilde = 0.1\nlattice_N = 5\nbogus = 1\n",
        "theta = 0.1, 0.2\ntheta = 0.3\nk_tilde = 0.1\nlattice_N = 5\n",
        "theta = 0.1, 0.2\nk_tilde = 0.1\nlattice_N = 5\nentropy = maybe\n",
        "theta = 0.1, 0.2\nk_tilde = 0.1\nlattice_N = 5\nboundary = twisted\n",
        "theta = 0.1, 0.2\nk_tilde = 0.1\nlattice_N = 5\nenergy_model = fast\n",
        "theta = 0.1, 0.2\nk_tilde = 0.1\nlattice_N = 5\ninitial_position = localized\nsteps = 6\n",
        "just some words\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


@pytest.mark.parametrize(
    "text",
    [
        "theta = 0.1, 0.2\nk_tilde = 0.1\nlattice_N = 5\n",  # no phi
        "theta = 0.1, 0.2\nk_tilde = 0.1\nlattice_N = 5\nphi = 0\ninitial_flavor = e\n",
        "theta = 0.1, 0.2\nk_tilde = 0.1\nlattice_N = 5\nphi = 0\ninitial_flavor = 3\n",
        "theta = 0.1, 0.2, 0.3\nk_tilde = 0.1\nlattice_N = 5\n",
        "flavors = 3\ntheta = 0.1, 0.2\nk_tilde = 0.1\nlattice_N = 5\nphi = 0\n",
        "theta = 0.1, 0.2\nk_tilde = 0.1\nlattice_N = 5\nphi = 0\ninitial_position = momentum\nboundary = open\n",
    ],
)
def test_scenario_errors(text):
    with pytest.raises(ConfigError):
        parse_config_text(text).scenario()


def test_amplitude_file(tmp_path):
    (tmp_path / "amps.txt").write_text("# x re im\n-1 0.6 0\n2 0 0.8\n")
    cfg = parse_config_text(
        "theta = 0.2, 0.5\nphi = 0.4\nk_tilde = 0\nlattice_N = 8\nsteps = 5\ninitial_position = amps.txt\n",
        tmp_path,
    )
    sc = cfg.scenario()
    assert dict(sc.initial_position) == {-1: 0.6, 2: 0.8j}
    assert read_amplitudes(tmp_path / "amps.txt") == {-1: 0.6, 2: 0.8j}
    (tmp_path / "bad.txt").write_text("1 2 3 4\n")
    with pytest.raises(ConfigError):
        read_amplitudes(tmp_path / "bad.txt")
    with pytest.raises(ConfigError):
        read_amplitudes(tmp_path / "missing.txt")


# --- formats ----------------------------------------------------------------------

def test_series_header():
    assert series_header(("mu", "tau"), 0, False) == ["step", "P_mumu", "P_mutau"]
    assert series_header(("mu", "tau"), 1, True) == ["step", "P_taumu", "P_tautau", "S"]
    assert series_header(("e", "mu", "tau"), 0, True)[-4:] == ["S_e", "S_mu", "S_tau", "S_avg"]


def test_matrix_dump_round_trip():
    m = np.array([[1 / 3, -2e-300 + 1j], [np.pi, 0]])
    text = format_matrix_dump({"a": m, "b": np.eye(2)}, {"step": 1})
    back = read_matrix_dump(text)
    assert np.array_equal(back["a"], m) and np.array_equal(back["b"], np.eye(2))
    with pytest.raises(ValueError):
        read_matrix_dump("1,0\n")


def test_write_atomic_leaves_nothing_on_failure(tmp_path, monkeypatch):
    target = tmp_path / "x.csv"
    target.write_text("old\n")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        write_atomic(target, "new\n")
    assert target.read_text() == "old\n"
    assert os.listdir(tmp_path) == ["x.csv"]


# --- simulate ------------------------------------------------------------------------

def test_simulate_two_flavor(tmp_path, capsys):
    assert cli.main(["simulate", str(write_cfg(tmp_path, TWO_FLAVOR_CFG.format(steps=120)))]) == 0
    header, data = read_csv(tmp_path / "out.csv")
    assert header == ["step", "P_mumu", "P_mutau"]
    assert data.shape == (121, 3)
    assert abs(data[:, 2].max() - 0.970) < 0.01
    assert np.max(np.abs(data[:, 1:].sum(axis=1) - 1)) < 1e-9
    out = capsys.readouterr().out
    assert "P_mutau: max" in out and "snap" in out and "completeness" in out
    assert "first crossing P_mutau >= P_mumu: 27" in out


def test_simulate_zero_steps(tmp_path):
    assert cli.main(["simulate", str(write_cfg(tmp_path, TWO_FLAVOR_CFG.format(steps=0)))]) == 0
    _, data = read_csv(tmp_path / "out.csv")
    assert data.shape == (1, 3)
    assert abs(data[0, 1] - 1) < 1e-12


def test_simulate_three_flavor_entropy_columns(tmp_path):
    cfg_path = write_cfg(tmp_path, THREE_FLAVOR_CFG)
    assert cli.main(["simulate", str(cfg_path)]) == 0
    header, data = read_csv(tmp_path / "out.csv")
    assert header == ["step", "P_ee", "P_emu", "P_etau", "S_e", "S_mu", "S_tau", "S_avg"]
    rep = entropy_report(walk_transition_series(parse_config(cfg_path).scenario()))
    assert np.max(np.abs(data[:, 4:7] - rep.entropies)) < 1e-11
    assert np.max(np.abs(data[:, 7] - rep.average)) < 1e-11


def test_simulate_to_stdout(tmp_path, capsys):
    text = TWO_FLAVOR_CFG.format(steps=3).replace("output = out.csv\n", "")
    assert cli.main(["simulate", str(write_cfg(tmp_path, text))]) == 0
    assert "step,P_mumu,P_mutau" in capsys.readouterr().out
    assert not (tmp_path / "out.csv").exists()


def test_simulate_is_deterministic(tmp_path):
    cfg_path = write_cfg(tmp_path, THREE_FLAVOR_CFG)
    cli.main(["simulate", str(cfg_path)])
    first = (tmp_path / "out.csv").read_bytes()
    cli.main(["simulate", str(cfg_path)])
    assert (tmp_path / "out.csv").read_bytes() == first


def test_config_error_exit_code(tmp_path, capsys):
    assert cli.main(["simulate", str(write_cfg(tmp_path, "theta = x\n"))]) == 2
    assert cli.main(["simulate", str(tmp_path / "missing.cfg")]) == 2
    assert "config error" in capsys.readouterr().err


def test_numerical_error_exit_code_and_no_output(tmp_path, monkeypatch):
    real = cli.walk_transition_series

    def leaky(scenario, *a, **kw):
        s = real(scenario, *a, **kw)
        return type(s)(s.alpha, s.labels, s.probabilities, s.k_tilde, s.completeness + 1e-6, s.purity)

    monkeypatch.setattr(cli, "walk_transition_series", leaky)
    assert cli.main(["simulate", str(write_cfg(tmp_path, TWO_FLAVOR_CFG.format(steps=5)))]) == 3
    assert not (tmp_path / "out.csv").exists()


# --- validate -----------------------------------------------------------------------

def test_validate_passes(tmp_path, capsys):
    assert cli.main(["validate", str(write_cfg(tmp_path, TWO_FLAVOR_CFG.format(steps=60)))]) == 0
    out = capsys.readouterr().out
    line = next(l for l in out.splitlines() if l.startswith("walk vs analytic"))
    assert line.endswith("PASS") and float(line.split()[-3]) < 1e-8


def test_validate_corrupted_coin_fails(tmp_path, capsys):
    cfg = str(write_cfg(tmp_path, TWO_FLAVOR_CFG.format(steps=20)))
    assert cli.main(["validate", cfg, "--corrupt-coin", "1e-3"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out and "CPTP residual" in out


def test_validate_respects_tolerance_override(tmp_path, monkeypatch):
    cfg = str(write_cfg(tmp_path, TWO_FLAVOR_CFG.format(steps=20)))
    monkeypatch.setenv("OSC_TOL_CPTP", "1e-30")
    assert cli.main(["validate", cfg]) == 1
    monkeypatch.setenv("OSC_TOL_CPTP", "1e-6")
    assert cli.main(["validate", cfg]) == 0


# --- kraus and embed ------------------------------------------------------------------

def run_dump(args, capsys):
    assert cli.main(args) == 0
    return read_matrix_dump(capsys.readouterr().out)


@pytest.mark.parametrize("t", [0, 1, 2])
def test_kraus_dump(tmp_path, capsys, t):
    theta = np.pi / 4
    blocks = run_dump(["kraus", str(write_cfg(tmp_path, DIRAC.format(theta=theta))), "--t", str(t)], capsys)
    fam = kraus_at(t, build_dirac_coin(theta))
    assert len(blocks) == t + 1
    for x, k in fam.as_dict().items():
        block = blocks[f"x={x}"]
        assert np.array_equal(block[:2, :2], k) and np.array_equal(block[2:, 2:], k)
    if t == 2:
        mags = np.abs(np.concatenate([b[:2, :2].ravel() for b in blocks.values()]))
        assert np.all((mags == 0) | (np.abs(mags - 0.5) < 1e-15))


def test_kraus_dump_plane_wave_is_complete(tmp_path, capsys):
    cfg = write_cfg(tmp_path, TWO_FLAVOR_CFG.format(steps=5).replace("628", "20"))
    assert cli.main(["kraus", str(cfg), "--t", "3"]) == 0
    text = capsys.readouterr().out
    assert "completeness_residual=" in text
    resid = float(text.split("completeness_residual=")[1].split()[0])
    assert resid < 1e-12
    assert len(read_matrix_dump(text)) == 41


def test_kraus_negative_t(tmp_path):
    assert cli.main(["kraus", str(write_cfg(tmp_path, DIRAC.format(theta=0.3))), "--t", "-1"]) == 2


def test_embed_dump(tmp_path, capsys):
    blocks = run_dump(["embed", str(write_cfg(tmp_path, THREE_FLAVOR_CFG))], capsys)
    assert set(blocks) == {"U0", "U1", "U2", "U3", "U3U2U1U0"}
    m = MixingSpec(0.59437, 0.16087, 0.69835)
    assert np.max(np.abs(restrict(blocks["U3U2U1U0"]) - pmns_matrix(m))) < 1e-15


def test_module_entry_point_help():
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "nuwalk", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("simulate", "validate", "kraus", "embed"):
        assert cmd in r.stdout
