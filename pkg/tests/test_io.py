import json

import cliffordtori
import numpy as np
import pytest


def test_matrix_json(tmp_path):
    F = cliffordtori.fourier_matrix(3)

    # 1. Object form: size and row-major [re, im] pairs
    payload = cliffordtori.matrix_to_dict(F)
    assert payload["n"] == 3
    assert payload["entries"][0][0] == [1 / np.sqrt(3), 0.0]
    np.testing.assert_allclose(cliffordtori.matrix_from_dict(payload), F, atol=1e-15)

    # 2. File form carries a schema tag
    path = cliffordtori.write_matrix_json(tmp_path / "fourier.json", F)
    assert json.loads(path.read_text())["schema"] == "cliffordtori/matrix/1"
    np.testing.assert_allclose(cliffordtori.read_matrix_json(path), F, atol=1e-15)


def test_matrix_json_errors(tmp_path):
    # 1. Missing or misshapen entries
    with pytest.raises(cliffordtori.InvalidMatrixError):
        cliffordtori.matrix_from_dict({"n": 3})
    with pytest.raises(cliffordtori.InvalidMatrixError):
        cliffordtori.matrix_from_dict({"n": 2, "entries": [[[1, 0], [0, 0]]]})

    # 2. Not unitary, unless the check is switched off
    payload = cliffordtori.matrix_to_dict(2 * np.eye(2))
    with pytest.raises(cliffordtori.InvalidMatrixError):
        cliffordtori.matrix_from_dict(payload)
    np.testing.assert_allclose(cliffordtori.matrix_from_dict(payload, check=False), 2 * np.eye(2))

    # 3. Not JSON at all
    path = tmp_path / "broken.json"
    path.write_text("{n: 3")
    with pytest.raises(cliffordtori.InvalidMatrixError):
        cliffordtori.read_matrix_json(path)


def test_write_json(tmp_path):
    # 1. Sorted keys, two-space indent, LF endings, numpy scalars converted
    path = cliffordtori.write_json(tmp_path / "out" / "report.json", {"b": 1, "a": np.float64(0.5)})
    assert path.read_bytes() == b'{\n  "a": 0.5,\n  "b": 1\n}\n'


def test_write_csv(tmp_path):
    # 1. Header row and shortest round-trip float text
    rows = [(1, 0.1, "x"), (np.int64(2), np.float64(1 / 3), "")]
    path = cliffordtori.write_csv(tmp_path / "table.csv", ("a", "b", "c"), rows)
    assert path.read_bytes() == b"a,b,c\n1,0.1,x\n2,0.3333333333333333,\n"


def test_jsonable_reports():
    # 1. Intersection set of the Fourier pair
    F = cliffordtori.fourier_matrix(3)
    result = cliffordtori.find_intersections(F)
    payload = json.loads(json.dumps(cliffordtori.intersection_set_to_dict(result)))
    assert payload["classification"] == "FiniteTransversal"
    assert payload["count"] == 6
    assert payload["index_sum"] == 0
    assert len(payload["points"]) == 6
    assert all(len(point["z"]) == 2 and len(point["z"][0]) == 2 for point in payload["points"])

    # 2. Index report
    report = cliffordtori.index_report(F, result)
    payload = json.loads(json.dumps(cliffordtori.index_report_to_dict(report)))
    assert payload["total"] == 0
    assert sorted(point["index"] for point in payload["points"]) == [-1, -1, -1, 1, 1, 1]

    # 3. Continuum: no points, the witnesses are listed
    payload = cliffordtori.intersection_set_to_dict(cliffordtori.find_intersections(np.eye(3)))
    payload = json.loads(json.dumps(payload))
    assert payload["count"] == cliffordtori.CONTINUUM
    assert payload["points"] == []
    assert len(payload["continuum_witnesses"]) > 0

    # 4. Both dicts hold plain Python types before any JSON encoding
    payload = cliffordtori.intersection_set_to_dict(result)
    assert type(payload["points"][0]["alpha"]) is list
    assert type(payload["points"][0]["z"][0]) is list
    assert type(payload["continuum_witnesses"]) is list
    payload = cliffordtori.index_report_to_dict(report)
    assert type(payload["points"][0]["alpha"][0]) is float


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as tmp:
        test_matrix_json(Path(tmp))
        test_matrix_json_errors(Path(tmp))
        test_write_json(Path(tmp))
        test_write_csv(Path(tmp))
    test_jsonable_reports()

    print("All io tests passed!!")
