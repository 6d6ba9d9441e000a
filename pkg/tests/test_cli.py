import io
import json

import numpy as np
import pytest

from qacd import cli
from qacd import io as qio
from qacd.exceptions import ParseError, ValidationError
from qacd.noise import ReadoutSpec, build_readout_povm, readout_effects
from qacd.qobjects import comp_basis_povm


def run(argv):
    buf = io.StringIO()
    args = cli.build_parser().parse_args(argv)
    code = args.func(args, out=buf)
    return code, buf.getvalue()


def write_config(tmp_path, **kw):
    cfg = {"scenario": "states-ideal", "n_min": 2, "n_max": 3, "ensembles": ["vqe"],
           "seed": 3, "samples": 40}
    cfg.update(kw)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


# -- verify-examples ---------------------------------------------------------

def test_verify_examples_passes():
    code, out = run(["verify-examples"])
    assert code == 0
    assert "FAIL" not in out
    assert "single Pauli insertion" in out and "d=64" in out


def test_verify_examples_reports_failure(monkeypatch):
    from qacd.checks import Check
    monkeypatch.setattr(cli.checks, "all_checks", lambda: [Check("broken identity", 1.0, 0.0, 1e-12)])
    code, out = run(["verify-examples"])
    assert code == 1 and "broken identity" in out.split("failing checks:")[1]


# -- scaling -----------------------------------------------------------------

def test_scaling_outputs(tmp_path):
    path = write_config(tmp_path)
    code, _ = run(["scaling", "--config", str(path), "--out", str(tmp_path / "o")])
    assert code == 0
    text = (tmp_path / "o" / "scaling_states-ideal.csv").read_text()
    doc = json.loads((tmp_path / "o" / "scaling_states-ideal.json").read_text())
    body = qio.csv_body(text)
    assert body.splitlines()[0] == ",".join(qio.CSV_COLUMNS)
    recs = qio.read_records_csv(text)
    assert [r["N"] for r in recs] == [2, 3]
    assert recs == doc["records"]
    for r in recs:
        assert r["mc_mean"] <= r["wc"]
    assert text.startswith("# generated")
    assert "pauli_probs" in text.splitlines()[2]


def test_scaling_deterministic_body(tmp_path):
    path = write_config(tmp_path, scenario="channels-ideal", ensembles=["qaoa", "haar"])
    bodies = []
    for jobs in (1, 2):
        run(["scaling", "--config", str(path), "--out", str(tmp_path / f"o{jobs}"), "--n-jobs", str(jobs)])
        bodies.append(qio.csv_body((tmp_path / f"o{jobs}" / "scaling_channels-ideal.csv").read_text()))
    assert bodies[0] == bodies[1]


def test_scaling_empty_noise(tmp_path):
    for sc in ("states-ideal", "povms-ideal", "channels-ideal"):
        path = write_config(tmp_path, scenario=sc, noise=None, n_max=2)
        run(["scaling", "--config", str(path), "--out", str(tmp_path / "o")])
        recs = qio.read_records_csv((tmp_path / "o" / f"scaling_{sc}.csv").read_text())
        for r in recs:
            assert r["acd"] == 0 and r["wc"] == 0 and r["mc_mean"] == 0


def test_states_uniform_matches_purity_oracle():
    # ||rho - 1/d||_HS^2 = tr rho^2 - 1/d, and purity factorizes over qubits
    from qacd.experiments import draw_noise, scenario_objects
    from qacd.distances import acd_states
    cfg = qio.config_from_dict({"scenario": "states-uniform", "n_min": 1, "n_max": 5,
                                "noise": {"error_range": [0.01, 0.05], "seed": 1}})
    draw = draw_noise(cfg)
    for n in range(1, 6):
        _, rho, tau = scenario_objects(cfg.scenario, n, draw)
        pur = np.prod([np.trace(r @ r).real for r in single_qubit_marginals(rho.matrix, n)])
        assert np.isclose(acd_states(rho, tau), 0.5 * np.sqrt(pur - 2.0 ** -n))


def single_qubit_marginals(rho, n):
    t = rho.reshape((2,) * (2 * n))
    out = []
    for k in range(n):
        keep = [i for i in range(n) if i != k]
        letters = list(range(2 * n))
        for i in keep:
            letters[n + i] = i
        out.append(np.einsum(t, letters, [k, n + k]))
    return out


def test_config_validation(tmp_path):
    with pytest.raises(ValidationError, match="dense cap"):
        qio.config_from_dict({"scenario": "channels-ideal", "n_max": 6})
    with pytest.raises(ValidationError):
        qio.config_from_dict({"scenario": "nope"})
    with pytest.raises(ParseError, match="unknown config keys"):
        qio.config_from_dict({"scenario": "states-ideal", "typo": 1})
    with pytest.raises(ValidationError):
        qio.config_from_dict({"scenario": "states-ideal", "ensembles": ["random"]})
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert cli.main(["scaling", "--config", str(bad), "--out", str(tmp_path)]) == 2


# -- histogram ---------------------------------------------------------------

def test_histogram_csv(tmp_path):
    path = write_config(tmp_path, ensembles=["qaoa", "vqe"], n_min=2, n_max=2)
    out = tmp_path / "h.csv"
    code, _ = run(["histogram", "--config", str(path), "--out", str(out)])
    assert code == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert lines[0].split(",") == list(cli.HIST_COLUMNS)
    rows = [l.split(",") for l in lines[1:]]
    assert len(rows) == 2 * 50
    for name in ("qaoa", "vqe"):
        counts = [int(r[4]) for r in rows if r[0] == name]
        assert sum(counts) == 40
    assert len({r[5] for r in rows}) == 1


def test_histogram_single_circuit_one_bin(tmp_path):
    from qacd.ensembles import discrete_ensemble
    from qacd.montecarlo import avg_tvd_states
    est = avg_tvd_states(np.diag([1.0, 0]), np.eye(2) / 2, discrete_ensemble([(1.0, np.eye(2))]), 25)
    assert np.count_nonzero(est.histogram) == 1


# -- frame potential, forecast -----------------------------------------------

def test_frame_potential_command():
    code, out = run(["frame-potential", "--ensemble", "haar", "--n", "1", "--k", "1", "--pairs", "50"])
    assert code == 0 and "F_1 =" in out and "Haar value 1" in out


def test_forecast_values():
    r = cli.forecast(0.97, 54)
    assert abs(r["lower_bound"] - 0.3918) < 1e-4
    assert not r["agrees"]
    code, out = run(["forecast", "--qav", "0.97", "--n", "54"])
    assert "0.391758" in out and "discrepancy" in out


def test_forecast_perfect_readout():
    r = cli.forecast(1.0, 54)
    assert r["lower_bound"] == 0 and r["exact"] == 0 and not r["precondition_holds"]


def test_forecast_range():
    assert cli.main(["forecast", "--qav", "0.3", "--n", "5"]) == 2


# -- calibration -------------------------------------------------------------

def write_json(tmp_path, obj, name="cal.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


def test_calibration_identity(tmp_path):
    p = write_json(tmp_path, {"n_qubits": 2, "qubits": [{"confusion": [[1, 0], [0, 1]]}] * 2})
    cal = qio.load_calibration(p)
    assert np.allclose(cal.povm().effects, comp_basis_povm(2).effects)
    code, out = run(["calibration", "--file", str(p), "--validate"])
    assert code == 0 and "calibration valid" in out


def test_calibration_symmetric_matches_builder(tmp_path):
    pair = readout_effects(0.9, 0.9)
    p = write_json(tmp_path, qio.calibration_to_dict([pair] * 3))
    cal = qio.load_calibration(p)
    ref = build_readout_povm(ReadoutSpec.homogeneous(0.9, 0.9, 3))
    assert np.allclose(cal.povm().effects, ref.effects)
    assert cal.is_classical


def test_calibration_effects_take_precedence(tmp_path):
    pair = readout_effects(0.8, 0.7)
    entry = qio.calibration_to_dict([pair])["qubits"][0]
    entry["confusion"] = [[1, 0], [0, 1]]
    cal = qio.calibration_from_dict({"qubits": [entry]})
    assert np.allclose(cal.effects[0][0], pair[0])


def test_calibration_coherent_effects(tmp_path):
    E0 = np.array([[0.9, 0.05 + 0.02j], [0.05 - 0.02j, 0.1]])
    d = qio.calibration_to_dict([(E0, np.eye(2) - E0)])
    cal = qio.calibration_from_dict(d)
    assert np.allclose(cal.effects[0][0], E0) and not cal.is_classical


def test_calibration_truncated_names_qubit(tmp_path):
    p = write_json(tmp_path, {"n_qubits": 3, "qubits": [{"confusion": [[1, 0], [0, 1]]}] * 2})
    with pytest.raises(ParseError, match="qubit 2 is missing"):
        qio.load_calibration(p)
    assert cli.main(["calibration", "--file", str(p), "--validate"]) == 2


def test_calibration_incomplete_names_qubit():
    raw = {"qubits": [{"confusion": [[1, 0], [0, 1]]}, {"confusion": [[0.9, 0.1], [0.2, 0.9]]}]}
    with pytest.raises(ValidationError, match="qubit 1"):
        qio.calibration_from_dict(raw)


def test_calibration_schema_errors():
    with pytest.raises(ParseError):
        qio.calibration_from_dict({"qubits": [{"neither": 1}]})
    with pytest.raises(ParseError):
        qio.calibration_from_dict({"qubits": [{"effects": [[[1, 0]]]}]})
    with pytest.raises(ParseError):
        qio.calibration_from_dict([])
