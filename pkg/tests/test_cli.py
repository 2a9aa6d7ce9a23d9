import json

import numpy as np
import pytest

from shiftlab import cli, report
from shiftlab.errors import InputError, SchemaError
from shiftlab.opcore import Operator, write_operator


def _write(path, M, **meta):
    write_operator(Operator(np.atleast_2d(M)), path, **meta)
    return path.name


def _config(tmp_path, name="cfg.json", **data):
    path = tmp_path / name
    data.setdefault("out", str(tmp_path / "out"))
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture
def scalar_pair(tmp_path):
    return {
        "T0": _write(tmp_path / "t0.json", 0.3, role="contraction"),
        "T1": _write(tmp_path / "t1.json", 0.5, role="contraction"),
    }


def test_ssf_contraction_scalar(tmp_path, scalar_pair):
    cfg = _config(tmp_path, command="ssf-contraction", inputs=scalar_pair, pipeline={"N": 64, "svg": True})
    assert cli.main(["--config", cfg, "--quiet"]) == 0
    out = tmp_path / "out"
    ssf_rows = (out / "trial_000_ssf.csv").read_text().splitlines()
    assert ssf_rows[0] == "theta,value"
    assert len(ssf_rows) - 1 <= 128
    res = (out / "trial_000_residuals.csv").read_text().splitlines()
    assert len(res) == 17
    assert all(line.split(",")[7] == "true" for line in res[1:])
    svg = (out / "trial_000_ssf.svg").read_text()
    assert svg.startswith("<svg") and "<polyline" in svg and "<circle" in svg
    rep = json.loads((out / "report.json").read_text())
    assert set(rep["hashed"]["manifest"]) == {
        "trial_000_ssf.csv",
        "trial_000_ssf.json",
        "trial_000_residuals.csv",
        "trial_000_ssf.svg",
    }
    for name, digest in rep["hashed"]["manifest"].items():
        assert report.sha256_file(out / name) == digest
    assert rep["sha256"] == report.sha256_text(report.dumps(rep["hashed"]))


def test_verify_roundtrip_and_corruption(tmp_path, scalar_pair):
    cfg = _config(tmp_path, command="ssf-contraction", inputs=scalar_pair, pipeline={"N": 64})
    assert cli.main(["--config", cfg, "--quiet"]) == 0
    good = tmp_path / "out" / "trial_000_ssf.csv"
    inputs = dict(scalar_pair, ssf=str(good))
    ok = _config(tmp_path, "v.json", command="verify", inputs=inputs, out=str(tmp_path / "v"))
    assert cli.main(["--config", ok, "--quiet"]) == 0

    lines = good.read_text().splitlines()
    theta = [l.split(",")[0] for l in lines[1:]]
    vals = [l.split(",")[1] for l in lines[1:]]
    vals = vals[1:] + vals[:1]  # shift the value column by one row
    bad = tmp_path / "bad.csv"
    bad.write_text("theta,value\n" + "".join(f"{t},{v}\n" for t, v in zip(theta, vals)))
    inputs["ssf"] = str(bad)
    cfg_bad = _config(tmp_path, "vb.json", command="verify", inputs=inputs, out=str(tmp_path / "vb"))
    assert cli.main(["--config", cfg_bad, "--quiet"]) == 1
    rep = json.loads((tmp_path / "vb" / "report.json").read_text())
    assert rep["hashed"]["trials"][0]["failing_rows"]


def test_report_is_deterministic(tmp_path, monkeypatch):
    ens = {"dim": 2, "perturbation_rank": 1, "perturbation_size": 0.2}
    digests = []
    for i, threads in enumerate(("1", "3", "1")):
        monkeypatch.setenv("SHIFTLAB_THREADS", threads)
        cfg = _config(tmp_path, f"c{i}.json", command="ssf-contraction", ensemble=ens, trials=3, master_seed=5, out=str(tmp_path / f"o{i}"))
        assert cli.main(["--config", cfg, "--quiet"]) == 0
        rep = json.loads((tmp_path / f"o{i}" / "report.json").read_text())
        digests.append((rep["sha256"], report.dumps(rep["hashed"])))
    assert digests[0] == digests[1] == digests[2]


def test_seed_override_changes_report(tmp_path):
    cfg = _config(tmp_path, command="ssf-unitary", ensemble={"dim": 3}, trials=2)
    assert cli.main(["--config", cfg, "--quiet", "--seed", "1", "--out", str(tmp_path / "a")]) == 0
    assert cli.main(["--config", cfg, "--quiet", "--seed", "2", "--out", str(tmp_path / "b"), "--trials", "3"]) == 0
    a = json.loads((tmp_path / "a" / "report.json").read_text())
    b = json.loads((tmp_path / "b" / "report.json").read_text())
    assert a["sha256"] != b["sha256"]
    assert b["hashed"]["aggregate"]["trials"] == 3


def test_numbers_have_17_digits():
    assert report.dumps(0.1) == "0.10000000000000001"
    assert json.loads(report.dumps({"x": [1 / 3, 2, True, None]})) == {"x": [1 / 3, 2, True, None]}


@pytest.mark.parametrize(
    "data",
    [
        {"command": "nope", "ensemble": {}},
        {"command": "ssf-contraction"},
        {"command": "ssf-contraction", "ensemble": {"dim": 2}, "inputs": {"T0": "a", "T1": "b"}},
        {"command": "ssf-contraction", "ensemble": {"dim": 2}, "pipeline": {"tol": -1}},
        {"command": "ssf-contraction", "ensemble": {"dim": 2, "kind": "banana"}},
        {"command": "verify", "ensemble": {"dim": 2}},
    ],
)
def test_config_errors_exit_2(tmp_path, data):
    cfg = _config(tmp_path, **data)
    assert cli.main(["--config", cfg, "--quiet"]) == 2
    assert not (tmp_path / "out" / "report.json").exists()


def test_schema_error_exit_3(tmp_path):
    (tmp_path / "t0.json").write_text(json.dumps({"n": 2, "re": [[0, 0], [0]], "im": [[0, 0], [0, 0]]}))
    _write(tmp_path / "t1.json", np.zeros((2, 2)))
    cfg = _config(tmp_path, command="ssf-contraction", inputs={"T0": "t0.json", "T1": "t1.json"})
    assert cli.main(["--config", cfg, "--quiet"]) == 3


def test_pipeline_error_exit_4_leaves_no_files(tmp_path):
    # a unitary base violates the kernel condition
    names = {"T0": _write(tmp_path / "u.json", np.array([[1.0]])), "T1": _write(tmp_path / "h.json", np.array([[0.5]]))}
    cfg = _config(tmp_path, command="ssf-contraction", inputs=names)
    assert cli.main(["--config", cfg, "--quiet"]) == 4
    out = tmp_path / "out"
    assert not out.exists() or list(out.iterdir()) == []


def test_ingest_valid(tmp_path):
    _write(tmp_path / "m.json", np.array([[0.1, 0.2], [0.0, 0.3j]]))
    op, rep = cli.ingest(tmp_path / "m.json")
    assert isinstance(op, Operator) and op.dim == 2
    assert rep.contraction and not rep.dissipative


def test_ingest_ragged(tmp_path):
    (tmp_path / "r.json").write_text(json.dumps({"n": 2, "re": [[1, 0], [0, 1, 2]], "im": [[0, 0], [0, 0]]}))
    with pytest.raises(SchemaError, match="row 1"):
        cli.ingest(tmp_path / "r.json")


def test_ingest_near_unitary(tmp_path):
    c, s = np.cos(0.3), np.sin(0.3)
    U = np.array([[c, -s], [s, c]]) * (1 + 5e-4)
    _write(tmp_path / "u.json", U, role="unitary")
    measured = np.linalg.norm(U.T @ U - np.eye(2))
    with pytest.raises(InputError, match=f"{measured:.3e}"):
        cli.ingest(tmp_path / "u.json")
    assert 9e-4 < measured < 2e-3


def test_ingest_dissipative_parts(tmp_path):
    L = np.array([[1 + 2j, 0.5], [0.5j, -1 + 1j]])
    _write(tmp_path / "l.json", L, role="dissipative")
    op, _ = cli.ingest(tmp_path / "l.json")
    np.testing.assert_allclose(op.re_part + 1j * op.im_part, L, atol=1e-15)


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("SHIFTLAB_THREADS", "1")
    assert cli.thread_count(10) == 1
    monkeypatch.setenv("SHIFTLAB_THREADS", "many")
    with pytest.raises(Exception):
        cli.thread_count(10)
