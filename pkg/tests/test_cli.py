import json
import math

import pytest

from spherical_schwarz.cli import EXIT_INVALID, EXIT_NONCONVERGENCE, EXIT_OK, main, to_csv, to_json
from spherical_schwarz.errors import ConvergenceError


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def run_json(capsys, *argv):
    rc, out, err = run(capsys, *argv)
    assert rc == EXIT_OK, err
    return json.loads(out)


def test_to_json_formatting():
    text = to_json({"a": 0.1, "b": 1.0, "c": 1 + 2j, "d": math.nan, "e": [math.inf], "f": True, "g": None})
    doc = json.loads(text)
    assert doc["c"] == {"re": 1.0, "im": 2.0}
    assert doc["d"] == "nan" and doc["e"] == ["inf"]
    assert '"a": 0.10000000000000001' in text
    assert '"b": 1.0' in text
    assert text.splitlines()[1].startswith('  "a"')


def test_to_csv_crlf_and_complex():
    text = to_csv(["z", "x"], [[1 - 2j, 0.5], [0j, True]])
    assert text == "z,x\r\n1-2j,0.5\r\n0+0j,true\r\n"


def test_bounds_origin(capsys):
    doc = run_json(capsys, "bounds", "--c", "0.3", "--s", "0")
    b = doc["results"]["bounds"]
    assert b["lower_thm2"] == pytest.approx(1 / 3)
    assert b["upper_thm2"] == pytest.approx(3)
    assert b["upper_thm3"] == pytest.approx(10 / 3)
    assert b["upper_envelope"] == pytest.approx(3)
    assert doc["verdicts"] == {"envelope_ordering": True}
    assert set(doc) == {"command", "config", "results", "residuals", "verdicts"}


def test_bounds_sweep_csv(capsys):
    rc, out, _ = run(capsys, "bounds", "--c", "0.3", "--sweep", "0:0.9:10", "--format", "csv")
    assert rc == EXIT_OK
    lines = out.split("\r\n")
    assert lines[0].startswith("c,s,lower_thm2")
    assert len([ln for ln in lines if ln]) == 11
    active = [ln.rsplit(",", 1)[1] for ln in lines[1:] if ln]
    assert active[0] == "thm2" and active[-1] == "thm3"


def test_bounds_infeasible(capsys):
    rc, out, err = run(capsys, "bounds", "--c", "0.6")
    assert rc == EXIT_INVALID and out == "" and "1/2" in err


def test_bad_sweep(capsys):
    rc, _, _ = run(capsys, "bounds", "--c", "0.3", "--sweep", "0:1")
    assert rc == EXIT_INVALID


def test_verify_extremal(capsys):
    doc = run_json(capsys, "verify", "--function", "rigid_scaled: eta=3", "--level", "0.3", "--radial-count", "60", "--angular-count", "128")
    res = doc["results"]
    assert res["classification"] == "F_c"
    assert res["equality_at_origin"] is True
    assert res["fsharp_at_origin"] == pytest.approx(3)
    assert doc["verdicts"]["origin_bound_compliance"] is True


def test_verify_g2(capsys):
    doc = run_json(capsys, "verify", "--function", "rational: [0,1]/[0.25,0,1]", "--level", "0.29", "--radial-count", "40", "--angular-count", "96")
    assert doc["results"]["classification"] == "G_c_only"
    assert doc["verdicts"] == {}


def test_verify_default_level(capsys):
    doc = run_json(capsys, "verify", "--function", "rational: [0,1]/[1]", "--radial-count", "40", "--angular-count", "96")
    assert doc["results"]["tested_level"] == pytest.approx(0.5, abs=1e-3)
    assert doc["results"]["classification"] == "F_c"


def test_verify_invalid_level(capsys):
    rc, _, _ = run(capsys, "verify", "--function", "rational: [0,1]/[1]", "--level", "0.7")
    assert rc == EXIT_INVALID


@pytest.mark.parametrize("c, label", [(0.25, "two"), (0.5, "one"), (0.7, "zero")])
def test_bvp_counts(capsys, c, label):
    doc = run_json(capsys, "bvp", "--c", str(c))
    assert doc["results"]["label"] == label
    assert doc["verdicts"]["count_cross_validated"] is True


def test_bvp_branch_filter(capsys):
    doc = run_json(capsys, "bvp", "--c", "0.25", "--branch", "plus", "--stride", "5000")
    (traj,) = doc["results"]["trajectories"]
    assert traj["branch"] == "plus"
    assert traj["eta_fit"] == pytest.approx(2 - math.sqrt(3), rel=1e-5)
    assert doc["residuals"]["max_first_integral"] <= 1e-8


def test_splemma(capsys):
    doc = run_json(capsys, "splemma", "--z0", "0.5", "--samples", "200")
    res = doc["results"]
    assert res["bound"] == pytest.approx(1.0410352085392202, rel=1e-14)
    assert res["extremal_parameters"][0]["re"] == pytest.approx(0.92116460960662271, abs=1e-12)
    assert res["max_sampled_wprime_abs"] <= res["bound"] + 1e-8
    assert doc["residuals"]["extremal_boundary_modulus_error"] <= 1e-8


def test_splemma_rejects_origin(capsys):
    rc, _, _ = run(capsys, "splemma", "--z0", "0")
    assert rc == EXIT_INVALID


def test_odecheck_tan(capsys):
    doc = run_json(capsys, "odecheck", "--schwarzian-coeffs", "[2]", "--points", "50")
    assert doc["residuals"]["max_reference_error"] <= 1e-8
    assert all(doc["verdicts"].values()) and "reference_solution" in doc["verdicts"]


def test_nonconvergence_exit_code(capsys, monkeypatch):
    import spherical_schwarz.cli as cli

    def fail(*args, **kwargs):
        raise ConvergenceError("Wronskian drift 1e-3")

    monkeypatch.setattr(cli, "integrate_pair", fail)
    rc, out, err = run(capsys, "odecheck", "--schwarzian-coeffs", "[1]", "--points", "5")
    assert rc == EXIT_NONCONVERGENCE and out == "" and "non-convergence" in err


def test_rational_single_numerator(capsys):
    doc = run_json(capsys, "rational", "--poles", "[2]", "--numerator", "[1]")
    (row,) = doc["results"]["rows"]
    assert doc["results"]["k_n"] == 3.0
    assert row["norm"] == pytest.approx(1.0)
    assert doc["verdicts"] == {"norm_bound": True, "bernstein_domination": True}


def test_rational_invalid(capsys):
    rc, _, _ = run(capsys, "rational", "--poles", "[0.5]", "--numerator", "[1]")
    assert rc == EXIT_INVALID
    rc, _, _ = run(capsys, "rational", "--poles", "[2,3]", "--numerator", "[0,0,1]")
    assert rc == EXIT_INVALID


def test_rational_small_campaign(capsys):
    doc = run_json(capsys, "rational", "--count", "5")
    assert len(doc["results"]["rows"]) == 5
    assert doc["residuals"]["min_margin"] >= 0


def test_counterexample(capsys):
    doc = run_json(capsys, "counterexample", "--n", "5")
    assert doc["results"]["fsharp_at_origin"] == pytest.approx(25, rel=1e-12)
    assert all(doc["verdicts"].values())
    rc, _, _ = run(capsys, "counterexample", "--n", "1")
    assert rc == EXIT_INVALID


def test_deterministic_output(capsys):
    argv = ("splemma", "--z0", "0.3+0.2i", "--samples", "50", "--seed", "9", "--format", "csv")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b and a.endswith("\r\n")


def test_out_file(capsys, tmp_path):
    path = tmp_path / "bounds.csv"
    rc, out, _ = run(capsys, "bounds", "--c", "0.3", "--format", "csv", "--out", str(path))
    assert rc == EXIT_OK and out == ""
    assert path.read_bytes().count(b"\r\n") == 2


def test_version_and_usage(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
