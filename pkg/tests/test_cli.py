import json

import numpy as np
import pytest

from qsubsys.channels import channel_to_dict, dephasing_n, dephasing_prime, identity_channel, unitary_channel
from qsubsys.cli import main
from qsubsys.jsonio import decomposition_to_dict, dumps_report, state_to_dict
from qsubsys.qec import rep5_decomposition, rep5_error_map
from qsubsys.subsystems import SubsystemDecomposition


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


@pytest.fixture
def files(tmp_path):
    comp = SubsystemDecomposition.computational(2, 2)
    return {
        "lp": write(tmp_path, "lp.json", channel_to_dict(dephasing_prime())),
        "lam": write(tmp_path, "lam.json", channel_to_dict(dephasing_n(2))),
        "id": write(tmp_path, "id.json", channel_to_dict(identity_channel(4))),
        "comp": write(tmp_path, "comp.json", decomposition_to_dict(comp)),
        "half": write(tmp_path, "half.json", state_to_dict(np.eye(2) / 2)),
    }


@pytest.mark.parametrize(
    "name", ["dephasing-private", "lambda-matrix", "complementary-depolarizing", "rep5-genoqec", "appendix-conditions"]
)
def test_examples_pass(name, capsys):
    assert main(["example", name]) == 0
    assert "VALID" in capsys.readouterr().out


def test_example_json(capsys):
    assert main(["example", "dephasing-private", "--format", "json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    rho0 = np.array(rep["results"]["dephasing"]["rho0"])
    assert np.allclose(rho0[..., 0], np.eye(4) / 4)
    assert rep["config"] == {"tolerance": 1e-9, "seed": 42, "conventions": "qsubsys-conventions/1"}


def test_lambda_example_payload(capsys):
    assert main(["example", "lambda-matrix", "--format", "json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    lam = np.array(rep["results"]["lambda"])
    assert lam.shape == (8, 8, 2)
    assert rep["results"]["unitarity_residual"] < 1e-9


def test_rep5_failure(capsys):
    assert main(["example", "rep5-genoqec", "--fail-weight2"]) == 1
    out = capsys.readouterr().out
    assert "branch_decoded_0: 0.7" in out and "branch_decoded_1: 0.3" in out


def test_theorem1_small_budget(capsys):
    assert main(["example", "theorem1-search", "--restarts", "200"]) == 0
    assert "search evidence only" in capsys.readouterr().out


def test_unknown_example():
    with pytest.raises(SystemExit) as exc:
        main(["example", "nope"])
    assert exc.value.code == 2


def test_check_private_subsystem(files, capsys):
    args = ["check", "private-subsystem", "--channel", files["lp"], "--decomp", files["comp"], "--sigma-a", files["half"]]
    assert main(args) == 0
    args[3] = files["id"]
    assert main(args) == 1
    assert "max_deviation" in capsys.readouterr().out


def test_check_theorem2(files, capsys):
    args = ["check", "theorem2", "--channel", files["lp"], "--decomp", files["comp"], "--sigma-a", files["half"], "--format", "json"]
    assert main(args) == 0
    rep = json.loads(capsys.readouterr().out)
    assert np.array(rep["results"]["lambda"]).shape == (8, 8, 2)


def test_check_operator_private(files):
    assert main(["check", "operator-private", "--channel", files["lp"], "--decomp", files["comp"]]) == 1


def test_check_private_subspace(tmp_path, files):
    dec = write(tmp_path, "sub.json", decomposition_to_dict(SubsystemDecomposition.subspace(np.eye(4)[:, :2])))
    assert main(["check", "private-subspace", "--channel", files["lam"], "--decomp", dec]) == 1
    assert main(["check", "private-subspace", "--channel", files["lam"], "--decomp", files["comp"]]) == 3


def test_check_kl_rep5(tmp_path):
    ch = write(tmp_path, "e.json", channel_to_dict(rep5_error_map([0.5, 0.1, 0.1, 0.1, 0.1, 0.1])))
    pa = np.zeros((16, 16))
    pa[0, 0] = 1
    proj = write(tmp_path, "p.json", state_to_dict(rep5_decomposition().projector(pa)))
    assert main(["check", "kl", "--channel", ch, "--projector", proj]) == 0


def test_check_genoqec(tmp_path):
    from qsubsys.qec import rep5_ancilla, rep5_recovery

    e = write(tmp_path, "e.json", channel_to_dict(rep5_error_map([0.5, 0.1, 0.1, 0.1, 0.1, 0.1])))
    r = write(tmp_path, "r.json", channel_to_dict(rep5_recovery()))
    d = write(tmp_path, "d.json", decomposition_to_dict(rep5_decomposition()))
    s = write(tmp_path, "s.json", state_to_dict(rep5_ancilla(0.1)))
    assert main(["check", "genoqec", "--channel", e, "--recovery", r, "--decomp", d, "--sigma-a", s]) == 0


def test_check_env(tmp_path, files):
    from qsubsys.subsystems import dephasing_privacy_encoding

    enc = write(tmp_path, "enc.json", decomposition_to_dict(SubsystemDecomposition.subspace(dephasing_privacy_encoding())))
    assert main(["check", "env-subsystem", "--channel", files["lam"], "--decomp", enc]) == 0
    sub = write(tmp_path, "sub.json", decomposition_to_dict(SubsystemDecomposition.subspace(np.eye(4)[:, [0, 3]])))
    assert main(["check", "env-subspace", "--channel", files["lam"], "--decomp", sub]) == 1


def test_parse_errors(tmp_path, files):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["check", "kl", "--channel", str(bad), "--projector", files["half"]]) == 2
    assert main(["check", "kl", "--channel", files["lp"]]) == 2
    missing = write(tmp_path, "m.json", {"dim_in": 2})
    assert main(["check", "kl", "--channel", missing, "--projector", files["half"]]) == 2
    notcp = write(tmp_path, "n.json", {"dim_in": 1, "dim_out": 1, "kraus": [[[[2.0, 0.0]]]]})
    assert main(["check", "kl", "--channel", notcp, "--projector", files["half"]]) == 2
    assert main(["example", "lambda-matrix", "--tol", "-1"]) == 2


def test_dimension_errors(tmp_path, files):
    wrong = channel_to_dict(identity_channel(2))
    wrong["dim_in"] = 3
    p = write(tmp_path, "w.json", wrong)
    assert main(["check", "kl", "--channel", p, "--projector", files["half"]]) == 3
    assert main(["check", "private-subsystem", "--channel", files["lp"], "--decomp", files["comp"], "--sigma-a",
                 write(tmp_path, "s3.json", state_to_dict(np.eye(3) / 3))]) == 3


def test_complement(tmp_path, files):
    out = tmp_path / "c.json"
    assert main(["complement", files["lam"], "--out", str(out)]) == 0
    obj = json.loads(out.read_text())
    first = np.array(obj["kraus"][0])[..., 0]
    assert np.allclose(first[:, 0], 0.5) and obj["dim_out"] == 4
    u = write(tmp_path, "u.json", channel_to_dict(unitary_channel(np.eye(2))))
    assert main(["complement", u, "--out", str(out)]) == 0
    assert json.loads(out.read_text())["dim_out"] == 1


def test_generalized_complement(tmp_path, files):
    from qsubsys.channels import channel_from_dict
    from qsubsys.cli import dephasing_decomposition
    from qsubsys.qec import kl_check

    dec = write(tmp_path, "dec.json", decomposition_to_dict(dephasing_decomposition()))
    out = tmp_path / "g.json"
    args = ["complement", files["lam"], "--generalized", "--sigma-a", files["half"], "--decomp", dec, "--out", str(out)]
    assert main(args) == 0
    gc = channel_from_dict(json.loads(out.read_text()))
    assert gc.dim_in == 2 and kl_check(gc, np.eye(2)).valid


def test_report_roundtrip(tmp_path, capsys):
    assert main(["example", "lambda-matrix", "--format", "json"]) == 0
    text = capsys.readouterr().out
    assert dumps_report(json.loads(text)) == text
    out = tmp_path / "r.json"
    assert main(["example", "rep5-genoqec", "--format", "json", "--out", str(out)]) == 0
    assert dumps_report(json.loads(out.read_text())) == out.read_text()


def test_module_entry():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "qsubsys", "example", "lambda-matrix"], capture_output=True, text=True)
    assert res.returncode == 0 and "VALID" in res.stdout
