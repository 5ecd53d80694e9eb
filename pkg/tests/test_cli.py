"""Config resolution, CSV contracts, exit codes, and output determinism."""

import json
import re

import numpy as np
import pytest

from icap.cli import (RunConfig, parse_config_file, resolve_config, field_csv,
                      main)
from icap.grid import ConfigError


# ---------------------------------------------------------------------------
# config parsing

def test_parse_config_file_flat_and_sections(tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("case = diag_disk\n"
                   "# comment\n"
                   "nx = 32\n"
                   "[numerics]\n"
                   "cfl = 0.25\n")
    vals = parse_config_file(str(cfg))
    assert vals == {"case": "diag_disk", "nx": "32", "cfl": "0.25"}


def test_parse_config_file_own_run_section(tmp_path):
    cfg = tmp_path / "b.cfg"
    cfg.write_text("[run]\ncase = zalesak\ncase = kothe_rider\n")
    # duplicate keys: the last one wins
    assert parse_config_file(str(cfg))["case"] == "kothe_rider"


def test_parse_config_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        parse_config_file(str(tmp_path / "missing.cfg"))
    bad = tmp_path / "bad.cfg"
    bad.write_text("just some words without a delimiter\n")
    with pytest.raises(ConfigError):
        parse_config_file(str(bad))


def test_resolve_config_merging_and_types():
    cfg = resolve_config({"case": "diag_disk", "nx": "16", "ny": "16",
                          "beta": "1.5", "snapshots": "0.5, 1.0"},
                         {"cfl": "0.2"})
    assert cfg == RunConfig(case="diag_disk", beta=1.5, cfl=0.2, nx=16, ny=16,
                            snapshots=(0.5, 1.0))
    # flags override file values
    cfg = resolve_config({"case": "diag_disk", "cfl": "0.3"}, {"cfl": "0.1"})
    assert cfg.cfl == 0.1


@pytest.mark.parametrize("file_vals,flag_vals", [
    ({"casse": "diag_disk"}, {}),            # unknown key
    ({}, {}),                                # no case at all
    ({"case": "not_a_case"}, {}),
    ({"case": "diag_disk", "scheme": "weno"}, {}),
    ({"case": "diag_disk", "integrator": "rk4"}, {}),
    ({"case": "diag_disk", "nx": "32"}, {}),            # nx without ny
    ({"case": "diag_disk", "nx": "32", "ny": "64"}, {}),
    ({"case": "diag_disk", "beta": "fast"}, {}),
    ({"case": "diag_disk", "snapshots": "1,two"}, {}),
    ({"case": "diag_disk", "formats": "hdf5"}, {}),
])
def test_resolve_config_rejects(file_vals, flag_vals):
    with pytest.raises(ConfigError):
        resolve_config(file_vals, flag_vals)


# ---------------------------------------------------------------------------
# field CSV

def test_field_csv_layout():
    class G:
        h = 0.5
        x0 = 1.0
        y0 = -1.0

    vals = np.array([[1.0, 2.0], [np.pi, 4.0], [5.0, 1e-17]])
    text = field_csv(G(), vals, t=0.75)
    lines = text.strip().split("\n")
    assert lines[0] == "# nx=3 ny=2 h=0.5 t=0.75"
    assert len(lines) == 1 + 6
    # row-major: j varies fastest
    first = lines[1].split(",")
    assert first[:2] == ["0", "0"]
    assert lines[2].split(",")[:2] == ["0", "1"]
    assert lines[3].split(",")[:2] == ["1", "0"]
    # centers offset half a cell from the origin
    assert float(first[2]) == 1.25 and float(first[3]) == -0.75
    # %.17g round-trips doubles exactly
    parsed = np.array([float(l.split(",")[4]) for l in lines[1:]])
    assert np.array_equal(parsed, vals.ravel())


# ---------------------------------------------------------------------------
# subcommands end to end

def _run(tmp_path, *extra):
    out = tmp_path / "out"
    rc = main(["run", "--case", "diag_disk", "--nx", "16", "--ny", "16",
               "--t-end", "0.5", "--scheme", "muscl:superbee",
               "--integrator", "euler", "--outdir", str(out), *extra])
    return rc, out


def test_run_writes_outputs_and_manifest(tmp_path):
    rc, out = _run(tmp_path)
    assert rc == 0
    assert (out / "field_final.csv").exists()
    assert (out / "diagnostics.csv").exists()
    man = json.loads((out / "manifest.json").read_text())
    assert man["command"] == "run"
    assert man["resolved"]["nx"] == 16
    assert man["resolved"]["scheme"] == "muscl:superbee"
    assert man["steps"] > 0
    assert set(man["norms"]) == {"l1", "l2", "linf", "econs"}
    header = (out / "field_final.csv").read_text().split("\n", 1)[0]
    assert re.fullmatch(r"# nx=16 ny=16 h=0\.125 t=0\.5", header)
    diag = (out / "diagnostics.csv").read_text().splitlines()
    assert diag[0] == "time,smearing,max_smearing,min_z,max_z,mass"
    assert len(diag) == 2 + man["steps"]


def test_run_outputs_are_deterministic(tmp_path):
    _, out1 = _run(tmp_path / "a")
    _, out2 = _run(tmp_path / "b")
    for name in ("field_final.csv", "diagnostics.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_run_snapshots_and_file_list(tmp_path):
    rc, out = _run(tmp_path, "--snapshots", "0.25")
    assert rc == 0
    assert (out / "field_t0.250000.csv").exists()
    man = json.loads((out / "manifest.json").read_text())
    assert man["files"] == ["field_t0.250000.csv", "diagnostics.csv",
                            "field_final.csv"]
    assert man["resolved"]["snapshots"] == [0.25]


def test_run_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("case = diag_disk\nscheme = muscl:superbee\n"
                   "integrator = euler\nnx = 8\nny = 8\nt_end = 0.25\n")
    out = tmp_path / "out"
    rc = main(["run", "--config", str(cfg), "--nx", "16", "--ny", "16",
               "--outdir", str(out)])
    assert rc == 0
    man = json.loads((out / "manifest.json").read_text())
    assert man["resolved"]["nx"] == 16
    assert man["resolved"]["t_end"] == 0.25


def test_run_1d_case(tmp_path):
    out = tmp_path / "hat"
    rc = main(["run", "--case", "tophat1d", "--nx", "50", "--ny", "50",
               "--t-end", "0.2", "--outdir", str(out)])
    assert rc == 0
    header = (out / "field_final.csv").read_text().split("\n", 1)[0]
    assert header.startswith("# nx=50 ny=1 ")
    man = json.loads((out / "manifest.json").read_text())
    assert man["resolved"]["ny"] == 1
    assert man["norms"]["l1"] >= 0.0


def test_run_1d_rejects_2d_schemes(tmp_path, capsys):
    rc = main(["run", "--case", "tophat1d", "--scheme", "mlp",
               "--outdir", str(tmp_path / "x")])
    assert rc == 2
    assert "config error" in capsys.readouterr().err
    rc = main(["run", "--case", "tophat1d", "--integrator", "rk2",
               "--outdir", str(tmp_path / "y")])
    assert rc == 2


def test_config_errors_exit_2(tmp_path, capsys):
    rc = main(["run", "--case", "nosuch", "--outdir", str(tmp_path / "z")])
    assert rc == 2
    assert "unknown case" in capsys.readouterr().err


def test_thread_cap_env(tmp_path, monkeypatch):
    monkeypatch.setenv("ICAP_THREADS", "4")
    rc, out = _run(tmp_path)
    assert rc == 0
    assert json.loads((out / "manifest.json").read_text())["threads"] == 4
    monkeypatch.setenv("ICAP_THREADS", "0")
    rc, _ = _run(tmp_path / "bad")
    assert rc == 2
    monkeypatch.setenv("ICAP_THREADS", "many")
    rc, _ = _run(tmp_path / "worse")
    assert rc == 2


@pytest.mark.filterwarnings("ignore:overflow", "ignore:invalid value")
def test_instability_aborts_with_exit_3(tmp_path, capsys):
    # superbee + Euler on the diagonal disk is unstable at this Courant
    # number; the run must flush the last finite state and exit 3
    out = tmp_path / "boom"
    rc = main(["run", "--case", "diag_disk", "--nx", "64", "--ny", "64",
               "--cfl", "0.9", "--t-end", "30", "--scheme", "muscl:superbee",
               "--integrator", "euler", "--outdir", str(out)])
    assert rc == 3
    assert "last finite state" in capsys.readouterr().err
    assert (out / "field_lastgood.csv").exists()
    assert (out / "diagnostics.csv").exists()
    man = json.loads((out / "manifest.json").read_text())
    assert "non-finite state" in man["aborted"]
    last = np.loadtxt(str(out / "field_lastgood.csv"), delimiter=",",
                      skiprows=1)
    assert np.isfinite(last).all()


def test_convergence_command(tmp_path, capsys):
    out = tmp_path / "conv"
    rc = main(["convergence", "--case", "oblique_steady", "--grids", "8,16",
               "--t-end", "0.5", "--outdir", str(out)])
    assert rc == 0
    text = (out / "convergence.csv").read_text()
    assert capsys.readouterr().out == text
    lines = text.strip().split("\n")
    assert lines[0] == "h,l1,l2,linf,econs"
    assert len([l for l in lines if not l.startswith("#")]) == 3
    slopes = [l for l in lines if l.startswith("# slope_")]
    assert len(slopes) == 4
    assert any(l.startswith("# slope_l1=") for l in slopes)


def test_convergence_needs_two_grids(tmp_path):
    rc = main(["convergence", "--case", "oblique_steady", "--grids", "16",
               "--outdir", str(tmp_path / "c")])
    assert rc == 2


def test_list_cases(capsys):
    assert main(["list-cases"]) == 0
    out = capsys.readouterr().out
    for name in ("tophat1d", "diag_disk", "rotation_disk", "oblique_steady",
                 "zalesak", "kothe_rider"):
        assert name in out
