from __future__ import annotations

import json

import numpy as np
import pytest

from nopanet import MatrixFormatError, REFERENCE_PARAMS, build_state_space, cfb_network, decompose, lm_paper_network
from nopanet import matrix_io, optimize, sweep_spectrum, two_mode_squeezing
from nopanet.optimizer import OptimizerConfig
from nopanet.spectra import SqueezingReport

from conftest import haar_unitary


def test_matrix_round_trip(tmp_path, rng):
    u = haar_unitary(rng)
    path = tmp_path / "u.json"
    matrix_io.write_matrix(path, u, label="rand")
    back, label = matrix_io.read_matrix(path)
    assert label == "rand"
    assert np.abs(back - u).max() < 1e-14


def test_matrix_format_layout():
    d = matrix_io.matrix_to_dict(np.array([[1.0, 2.0]]))
    assert d == {"shape": [1, 2], "data": [[[1.0, 0.0], [2.0, 0.0]]]}


def test_fifteen_significant_digits():
    d = matrix_io.matrix_to_dict(np.array([[1 / 3]]))
    assert repr(d["data"][0][0][0]) == "0.333333333333333"


def test_negative_zero_normalized():
    d = matrix_io.matrix_to_dict(np.array([[-0.0 + 0j]]))
    assert "-0.0" not in json.dumps(d)


@pytest.mark.parametrize(
    "obj",
    [
        {"shape": [2, 2], "data": [[[1, 0], [0, 0]]]},
        {"shape": [1, 2], "data": [[[1, 0]]]},
        {"shape": [1, 1], "data": [[[1]]]},
        {"shape": [1, 2], "data": [[[1, 0], [0, 0]], [[1, 0]]]},
        {"data": [[[1, 0]]]},
        {"shape": "1x1", "data": [[[1, 0]]]},
    ],
)
def test_matrix_rejects_bad_input(obj):
    with pytest.raises(MatrixFormatError):
        matrix_io.matrix_from_dict(obj)


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    with pytest.raises(MatrixFormatError):
        matrix_io.read_matrix(p)


def test_factor_round_trip(tmp_path):
    rep = decompose(lm_paper_network())
    path = tmp_path / "f.json"
    matrix_io.write_factors(path, rep.factors, rep.product_order)
    obj = json.loads(path.read_text())
    assert obj["order"] == "left-to-right" and len(obj["factors"]) == 15
    assert {"i", "j", "block", "kind"} <= set(obj["factors"][0])
    assert "alpha" in obj["factors"][2]
    factors, order = matrix_io.read_factors(path)
    assert [f.kind for f in factors] == [f.kind for f in rep.factors]
    assert matrix_io.dumps(matrix_io.factors_to_dict(factors, order)) == path.read_text()


def test_factor_file_rejects_bad_order():
    with pytest.raises(MatrixFormatError):
        matrix_io.factors_from_dict({"order": "sideways", "factors": []})


def test_factor_file_rejects_bad_block():
    with pytest.raises(MatrixFormatError):
        matrix_io.factors_from_dict({"factors": [{"i": 1, "j": 2, "block": [[[1, 0]]]}]})


def test_report_json_round_trip():
    rep = two_mode_squeezing(build_state_space(cfb_network(), REFERENCE_PARAMS))
    text = matrix_io.dumps(matrix_io.report_to_dict(rep))
    back = SqueezingReport.from_dict(json.loads(text))
    assert back.db == -26.235
    assert matrix_io.dumps(matrix_io.report_to_dict(back)) == text


def test_sweep_csv():
    reps = sweep_spectrum(build_state_space(cfb_network(), REFERENCE_PARAMS), 7.2e7, 4)
    rows = matrix_io.read_csv(matrix_io.sweep_csv(reps))
    assert list(rows[0]) == list(matrix_io.SWEEP_COLUMNS)
    assert rows[0]["db"] == "-26.235" and rows[0]["entangled"] == "1"
    assert float(rows[-1]["omega_rad_s"]) == 7.2e7


def test_trace_csv():
    res = optimize(cfb_network(), REFERENCE_PARAMS, OptimizerConfig(max_iters=2))
    rows = matrix_io.read_csv(matrix_io.trace_csv(res.trace))
    assert list(rows[0]) == list(matrix_io.TRACE_COLUMNS)
    assert [int(r["iter"]) for r in rows] == [0, 1, 2]
    assert float(rows[0]["v0"]) == pytest.approx(res.trace[0].v0, rel=1e-14)
