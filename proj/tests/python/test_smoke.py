"""Smoke tests for the kahlerlab module and the kahler-cli reports."""

import glob
import json
import os
import pathlib
import subprocess

import jsonschema
import numpy as np
import pytest

import kahlerlab as kl

ROOT = pathlib.Path(__file__).resolve().parents[2]
SCHEMAS = pathlib.Path(os.environ.get("KAHLER_SCHEMAS", ROOT / "schemas"))
CLI = os.environ.get("KAHLER_CLI", str(ROOT / "build" / "kahler-cli"))


def schema_for(command):
    return json.loads((SCHEMAS / f"{command}.v1.json").read_text())


def validate(report):
    jsonschema.Draft202012Validator(schema_for(report["command"])).validate(report)


def test_grid_and_metric_shapes():
    g = kl.Grid.torus(1, 16)
    assert g.dim == 1 and g.shape == [16, 16] and g.size == 256
    phi = kl.random_potential(g, 42, 0.1, 2)
    assert phi.shape == (16, 16)
    assert np.max(np.abs(phi.imag)) == 0.0
    assert kl.Metric.flat(g).with_potential(phi).dim == 1


def test_chern_numbers_closed_forms():
    # degree of the anticanonical bundle of the sphere; Euler characteristic of CP2
    s = kl.Grid.cp1(32, 32)
    assert kl.chern_numbers(kl.Metric.fubini_study(s))[0] == pytest.approx(2.0, abs=1e-6)
    c = kl.chern_numbers(kl.Metric.fubini_study(kl.Grid.cp2_analytic(8, 3)))
    assert c == pytest.approx([3.0, 3.0], abs=1e-9)
    t = kl.Grid.torus(1, 16)
    g = kl.Metric.flat(t).with_potential(kl.random_potential(t, 3, 0.2, 2))
    assert abs(kl.chern_numbers(g)[0]) <= 1e-9


def test_perturbed_scalar_on_round_sphere():
    # the round metric is homogeneous, so S is constant and equals its mean
    g = kl.Metric.fubini_study(kl.Grid.cp1(32, 32))
    r = kl.perturbed_scalar(g, 0.2)
    S = r["S"]
    assert np.ptp(S.real) <= 1e-9
    assert r["mean_S"] == pytest.approx(2 * np.pi * r["sigma"], rel=1e-7)
    assert r["admissibility_margin"] > 0


def test_kernel_dimensions():
    s = kl.Grid.cp1(32, 32)
    assert kl.kernel(kl.Metric.fubini_study(s))["dim"] == 3
    t = kl.Grid.torus(1, 16)
    assert kl.kernel(kl.Metric.flat(t).with_potential(kl.random_potential(t, 5, 0.1, 2)))["dim"] == 0


def test_flow_converges_on_torus():
    t = kl.Grid.torus(1, 16)
    r = kl.run_flow(kl.Metric.flat(t), kl.random_potential(t, 42, 0.1, 2), 0.1)
    assert r["converged"] and r["nu_monotone"]
    assert r["csv"].splitlines()[0] == "step,h,calabi_energy,nu_t,sup_S_minus_sigma,extremal_residual"


def test_kempf_ness_pair():
    act = kl.LinearAction.torus(np.array([[1, -1]], dtype=np.int32))
    r = kl.kempf_ness_descend(act, np.array([2.0, 0.5], dtype=complex))
    assert r["verdict"] == "polystable"
    assert np.abs(r["x"]) == pytest.approx([1.0, 1.0], abs=1e-8)
    # log |x|^2 at the orbit minimum: |x1|^2 + |x2|^2 >= 2 |x1 x2| = 2
    assert r["h"][0] == pytest.approx(np.log(4.25), abs=1e-12)
    assert r["h"][-1] == pytest.approx(np.log(2.0), abs=1e-9)
    # mu = 1/2 (|x1|^2 - |x2|^2) vanishes at the minimum
    assert np.abs(kl.moment_map(act, r["x"])).max() <= 1e-9
    assert kl.kempf_ness_descend(act, np.array([1.0, 0.0], dtype=complex))["verdict"] == "unstable"
    with pytest.raises(ValueError):
        kl.kempf_ness_descend(act, np.zeros(2, dtype=complex))


def test_run_command_reports_validate():
    ini = "[experiment]\nt = 0.2\n[manifold]\nkind = torus\nm = 1\nn = 16\n"
    rep = kl.run("sigma", ini)
    validate(rep)
    assert rep["pass"] and rep["results"]["records"][0]["sigma"] == 0.0
    with pytest.raises(ValueError):
        kl.run("sigma", "[manifold]\nkind = torus\nbogus = 1\n")


def test_acceptance_subset():
    rep = kl.acceptance(only=[1])
    assert rep["schema"] == "kahlerlab.suite/1"
    assert [c["id"] for c in rep["criteria"]] == [1]


@pytest.mark.parametrize(
    "command,config",
    [
        ("chern", "cp1_fs"),
        ("chern", "cp2"),
        ("scalar", "cp1_perturbed"),
        ("sigma", "torus_random"),
        ("futaki", "cp1_perturbed"),
        ("futaki", "torus_random"),
        ("mabuchi", "torus_flat"),
        ("flow", "torus_random"),
        ("kernel", "cp1_fs"),
        ("kempf-ness", "kempf_ness_su2"),
    ],
)
def test_cli_reports_match_schema(tmp_path, command, config):
    proc = subprocess.run(
        [CLI, command, "--config", str(ROOT / "configs" / f"{config}.ini"), "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    reports = glob.glob(str(tmp_path / "*.json"))
    assert len(reports) == 1
    rep = json.loads(pathlib.Path(reports[0]).read_text())
    validate(rep)
    assert rep["command"] == command and rep["pass"]
    assert "workers" not in json.dumps(rep)


def test_schema_rejects_malformed_report():
    rep = kl.run("sigma", "[manifold]\nkind = torus\nm = 1\nn = 8\n")
    rep["invariants"][0]["pass"] = "yes"
    with pytest.raises(jsonschema.ValidationError):
        validate(rep)
