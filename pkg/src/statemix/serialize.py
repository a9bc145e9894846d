"""JSON serialization for algebras, functionals, channels and reports.

Complex matrices are stored row-major as ``[re, im]`` pairs.  Block indices
are 0-based.  Reports carry a fixed envelope (see ``REPORT_SCHEMA``); with
a fixed seed a rerun reproduces a report byte for byte apart from the
``timestamp`` field.
"""

import json
from datetime import datetime, timezone

import numpy as np

from .algebra import AlgebraSpec, CenterElement, Element, Ideal, validate_algebra
from .channels import KrausMap, ModuleMapChoi
from .functionals import Functional

SCHEMA_VERSION = 1

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "statemix report",
    "type": "object",
    "required": ["schema_version", "kind", "verdict", "margin", "criterion",
                 "explanation", "timestamp", "inputs"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"type": "string"},
        "verdict": {"enum": ["yes", "no", "indeterminate", "success", "error"]},
        "margin": {"type": "number"},
        "criterion": {"type": "string"},
        "explanation": {"type": "string"},
        "certificate": {"type": ["object", "null"]},
        "timestamp": {"type": "string"},
        "seed": {"type": ["integer", "null"]},
        "tolerances": {"type": "object"},
        "inputs": {"type": "object"},
        "details": {"type": "object"},
        "oracle": {"type": ["object", "null"]},
    },
    "additionalProperties": False,
}


class FormatError(ValueError):
    """Malformed input file; the message cites the offending field path."""


def _require(data, key, path):
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected an object")
    if key not in data:
        raise FormatError(f"{path}: missing field '{key}'")
    return data[key]


def matrix_to_pairs(mat):
    mat = np.asarray(mat, dtype=np.complex128)
    return [[[float(x.real), float(x.imag)] for x in row] for row in mat]


def pairs_to_matrix(data, path):
    try:
        arr = np.asarray(data, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{path}: entries must be [re, im] pairs") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise FormatError(f"{path}: entries must be [re, im] pairs")
    return arr[:, :, 0] + 1j * arr[:, :, 1]


def algebra_to_dict(algebra):
    return {"blocks": list(algebra.block_dims)}


def algebra_from_dict(data, path="algebra"):
    blocks = _require(data, "blocks", path)
    try:
        return validate_algebra(blocks)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{path}.blocks: {exc}") from exc


def functional_to_dict(omega):
    return {
        "algebra": algebra_to_dict(omega.algebra),
        "densities": [matrix_to_pairs(d) for d in omega.densities],
    }


def functional_from_dict(data, path="functional", hermiticity_tol=1e-9):
    algebra = algebra_from_dict(_require(data, "algebra", path), f"{path}.algebra")
    raw = _require(data, "densities", path)
    if not isinstance(raw, list) or len(raw) != algebra.num_blocks:
        raise FormatError(f"{path}.densities: need one matrix per block")
    dens = []
    for i, block in enumerate(raw):
        mat = pairs_to_matrix(block, f"{path}.densities[{i}]")
        n = algebra.block_dims[i]
        if mat.shape != (n, n):
            raise FormatError(f"{path}.densities[{i}]: expected shape {n}x{n}")
        scale = max(1.0, float(np.abs(mat).max(initial=0.0)))
        if np.abs(mat - mat.conj().T).max(initial=0.0) > hermiticity_tol * scale:
            raise FormatError(f"{path}.densities[{i}]: matrix is not hermitian")
        dens.append(mat)
    return Functional(algebra, tuple(dens))


def element_to_pairs(element):
    return [matrix_to_pairs(b) for b in element.blocks]


def element_from_pairs(data, algebra, path):
    if not isinstance(data, list) or len(data) != algebra.num_blocks:
        raise FormatError(f"{path}: need one matrix per block")
    blocks = []
    for i, block in enumerate(data):
        mat = pairs_to_matrix(block, f"{path}[{i}]")
        n = algebra.block_dims[i]
        if mat.shape != (n, n):
            raise FormatError(f"{path}[{i}]: expected shape {n}x{n}")
        blocks.append(mat)
    return Element(algebra, tuple(blocks))


def kraus_to_dict(phi):
    return {
        "algebra": algebra_to_dict(phi.algebra),
        "kraus": [element_to_pairs(op) for op in phi.operators],
    }


def choi_to_dict(choi):
    return {
        "algebra": algebra_to_dict(choi.algebra),
        "choi_blocks": [matrix_to_pairs(c) for c in choi.choi_blocks],
    }


def channel_from_dict(data, path="channel"):
    """Load a channel file holding either a Kraus list or Choi blocks."""
    algebra = algebra_from_dict(_require(data, "algebra", path), f"{path}.algebra")
    if "kraus" in data:
        raw = data["kraus"]
        if not isinstance(raw, list) or not raw:
            raise FormatError(f"{path}.kraus: need a nonempty list")
        ops = [element_from_pairs(entry, algebra, f"{path}.kraus[{j}]")
               for j, entry in enumerate(raw)]
        return KrausMap(algebra, tuple(ops))
    if "choi_blocks" in data:
        raw = data["choi_blocks"]
        if not isinstance(raw, list) or len(raw) != algebra.num_blocks:
            raise FormatError(f"{path}.choi_blocks: need one block per algebra block")
        blocks = []
        for i, entry in enumerate(raw):
            mat = pairs_to_matrix(entry, f"{path}.choi_blocks[{i}]")
            m = algebra.block_dims[i] ** 2
            if mat.shape != (m, m):
                raise FormatError(f"{path}.choi_blocks[{i}]: expected shape {m}x{m}")
            blocks.append(mat)
        return ModuleMapChoi(algebra, tuple(blocks))
    raise FormatError(f"{path}: need field 'kraus' or 'choi_blocks'")


def _jsonable(value):
    if isinstance(value, Ideal):
        return {"blocks": sorted(value.support)}
    if isinstance(value, CenterElement):
        return {"values": [[v.real, v.imag] for v in value.values]}
    if isinstance(value, Functional):
        return functional_to_dict(value)
    if isinstance(value, Element):
        return {"blocks": element_to_pairs(value)}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, frozenset):
        return sorted(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def decision_report(kind, decision, inputs, seed=None, tolerances=None,
                    details=None, oracle=None):
    """Assemble the report envelope for a decision-type run."""
    report = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "verdict": decision.verdict,
        "margin": float(decision.margin),
        "criterion": decision.criterion,
        "explanation": decision.explanation,
        "certificate": _jsonable(decision.certificate),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "seed": seed,
        "tolerances": _jsonable(tolerances or {}),
        "inputs": _jsonable(inputs),
        "details": _jsonable(details or {}),
        "oracle": _jsonable(oracle),
    }
    return report


def utility_report(kind, inputs, details, seed=None, tolerances=None,
                   verdict="success", explanation=""):
    """Assemble the report envelope for a non-decision run."""
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "verdict": verdict,
        "margin": 0.0,
        "criterion": kind,
        "explanation": explanation,
        "certificate": None,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "seed": seed,
        "tolerances": _jsonable(tolerances or {}),
        "inputs": _jsonable(inputs),
        "details": _jsonable(details),
        "oracle": None,
    }


def dump_report(report, path=None):
    text = json.dumps(report, sort_keys=True, indent=2)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from exc
