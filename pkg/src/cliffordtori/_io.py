import csv
import json
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from ._errors import InvalidMatrixError
from ._matcore import check_unitary

PathLike = Union[str, Path]
SCHEMA_VERSION = 1


def schema_tag(kind: str) -> str:
    return f"cliffordtori/{kind}/{SCHEMA_VERSION}"


def matrix_to_dict(U) -> dict:
    """Matrix JSON object {"n": N, "entries": [[[re, im], ...], ...]}, row-major."""
    U = np.asarray(U, dtype=np.complex128)
    return {
        "n": int(U.shape[0]),
        "entries": [[[float(x.real), float(x.imag)] for x in row] for row in U],
    }


def matrix_from_dict(payload: dict, check: bool = True) -> NDArray[np.complexfloating]:
    """Inverse of `matrix_to_dict`.

    Raises:
        InvalidMatrixError: If the object is malformed, or, with `check`, not unitary
            within 1e-8.

    """
    try:
        n = int(payload["n"])
        entries = np.array(payload["entries"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMatrixError(f"malformed matrix object: {exc}") from exc
    if entries.shape != (n, n, 2):
        raise InvalidMatrixError(f"expected {n}x{n} entries of [re, im], got {entries.shape}")
    U = entries[..., 0] + 1j * entries[..., 1]
    return check_unitary(U) if check else U


def read_matrix_json(path: PathLike, check: bool = True) -> NDArray[np.complexfloating]:
    """Read a unitary from a matrix JSON file.

    Raises:
        InvalidMatrixError: If the file is not valid matrix JSON, or, with `check`, the matrix
            is not unitary within 1e-8.

    """
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidMatrixError(f"{path} is not valid JSON: {exc}") from exc
    return matrix_from_dict(payload, check)


def write_matrix_json(path: PathLike, U) -> Path:
    payload = {"schema": schema_tag("matrix"), **matrix_to_dict(U)}
    return write_json(path, payload)


def to_jsonable(value: Any) -> Any:
    """Convert numpy values, dataclasses, enums and tuples into plain JSON types."""
    if is_dataclass(value) and not isinstance(value, type):
        return to_jsonable(asdict(value))
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if hasattr(value, "value") and not isinstance(value, (int, float, str, bool)):
        return value.value
    return value


def write_json(path: PathLike, payload: dict) -> Path:
    """Write a JSON report: sorted keys, 2-space indent, LF line endings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8", newline="\n")
    return path


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a CSV file with a header row and LF line endings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_value(x) for x in row])
    return path


def _csv_value(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer, np.bool_)):
        return int(x)
    return x


def intersection_set_to_dict(result) -> dict:
    """JSON object for an IntersectionSet."""
    return to_jsonable(
        {
            "schema": schema_tag("intersection-set"),
            "classification": result.classification.value,
            "count": result.count,
            "index_sum": result.index_sum,
            "rounds": list(result.rounds),
            "starts": result.starts,
            "points": [
                {
                    "alpha": point.alpha,
                    "z": point.z,
                    "residual": point.residual,
                    "jac_det": point.jac_det,
                    "index": point.index,
                    "multiplicity": point.multiplicity,
                }
                for point in result.points
            ],
            "continuum_witnesses": result.continuum_witnesses,
        }
    )


def index_report_to_dict(report) -> dict:
    """JSON object for an IndexReport."""
    return to_jsonable(
        {
            "schema": schema_tag("index-report"),
            "total": report.total,
            "points": [
                {"alpha": row.point.alpha, "z": row.point.z, "det": row.det, "index": row.index}
                for row in report.per_point
            ],
        }
    )
