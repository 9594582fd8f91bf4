"""JSON formats for states, decompositions and reports.

Matrices are lists of rows of ``[re, im]`` pairs, as for channels.
Reports are written with sorted keys and two-space indentation so that
parsing and re-serialising one reproduces it byte for byte.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .channels import QuantumChannel, channel_from_dict, matrix_from_json, matrix_to_json
from .linops import DimensionError
from .subsystems import SubsystemDecomposition

CONVENTIONS_VERSION = "qsubsys-conventions/1"


class ParseError(ValueError):
    """Input file is not valid JSON or does not follow the expected layout."""


def state_to_dict(m) -> dict:
    m = np.asarray(m)
    return {"dim": int(m.shape[0]), "matrix": matrix_to_json(m)}


def state_from_dict(obj: dict) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        m = matrix_from_json(obj["matrix"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed state JSON: {exc}") from exc
    if m.shape != (dim, dim):
        raise DimensionError(f"state JSON declares dim {dim} but matrix has shape {m.shape}")
    return m


def decomposition_to_dict(d: SubsystemDecomposition) -> dict:
    return {"d_A": d.d_A, "d_B": d.d_B, "d_S": d.d_S, "embed": matrix_to_json(d.embed)}


def decomposition_from_dict(obj: dict) -> SubsystemDecomposition:
    try:
        d_a, d_b, d_s = int(obj["d_A"]), int(obj["d_B"]), int(obj["d_S"])
        w = matrix_from_json(obj["embed"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed decomposition JSON: {exc}") from exc
    if w.shape != (d_s, d_a * d_b):
        raise DimensionError(f"embed has shape {w.shape}, expected ({d_s}, {d_a * d_b})")
    return SubsystemDecomposition(d_a, d_b, w)


def _read(path) -> dict:
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return obj


def load_channel(path) -> QuantumChannel:
    obj = _read(path)
    try:
        return channel_from_dict(obj)
    except DimensionError:
        raise
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def load_state(path) -> np.ndarray:
    return state_from_dict(_read(path))


def load_decomposition(path) -> SubsystemDecomposition:
    obj = _read(path)
    try:
        return decomposition_from_dict(obj)
    except (DimensionError, ParseError):
        raise
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def to_jsonable(x):
    """Convert report payloads (arrays, numpy scalars, nested containers) to JSON values.

    Complex arrays become ``[re, im]`` nested lists; non-finite floats become ``None``.
    """
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            if x.ndim == 2:
                return matrix_to_json(x)
            return [to_jsonable(v) for v in x] if x.ndim > 0 else to_jsonable(x[()])
        return to_jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        f = float(x)
        return f if math.isfinite(f) else None
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    return x


def dumps_report(report: dict) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2) + "\n"
