"""JSON state files.

Every complex number is a ``[re, im]`` pair. A file looks like::

    {"schema": "density", "dim": 2, "label": "maximally mixed",
     "data": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}

``pure`` files hold one amplitude list, ``ensemble`` files a list of
``{"p": ..., "amplitudes": [...]}`` and ``kraus`` files a list of matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from cohdist.errors import CohDistError
from cohdist.schemas import STATE_FILE_SCHEMA
from cohdist.states import (
    DEFAULT_TOL,
    DensityMatrix,
    KrausSet,
    PureState,
    PureStateEnsemble,
    ToleranceConfig,
    validate_density,
)


class StateFileError(CohDistError):
    """The file could not be read or does not follow the state-file schema."""


@dataclass(frozen=True, eq=False)
class StateFile:
    schema: str
    dim: int
    data: Any  # numpy array, or list of (p, amplitudes) for ensembles
    label: str | None = None

    def to_object(self, tol: ToleranceConfig = DEFAULT_TOL):
        """Validate into the matching library type (may raise StateValidationError)."""
        if self.schema == "density":
            return validate_density(self.data, tol)
        if self.schema == "pure":
            return PureState(self.data, tol)
        if self.schema == "ensemble":
            return PureStateEnsemble([(p, PureState(a, tol)) for p, a in self.data], tol)
        return KrausSet(list(self.data), tol)


def encode_complex(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [encode_complex(x) for x in a]


def decode_complex(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1:] != (2,):
        raise StateFileError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def parse_state(doc: dict) -> StateFile:
    try:
        jsonschema.validate(doc, STATE_FILE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise StateFileError(f"state file does not match schema: {exc.message}") from None
    schema, dim = doc["schema"], int(doc["dim"])
    raw = doc["data"]
    if schema == "ensemble":
        data = [(float(m["p"]), decode_complex(m["amplitudes"])) for m in raw]
        shapes_ok = all(a.shape == (dim,) for _, a in data)
    else:
        data = decode_complex(raw) if raw else np.zeros((0,))
        expected = {"density": (dim, dim), "pure": (dim,)}.get(schema)
        if schema == "kraus":
            shapes_ok = data.ndim == 3 and data.shape[1:] == (dim, dim)
        else:
            shapes_ok = data.shape == expected
    if not shapes_ok:
        raise StateFileError(f"data shape does not match {schema} of dimension {dim}")
    return StateFile(schema, dim, data, doc.get("label"))


def read_state_file(path) -> StateFile:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise StateFileError(f"cannot read {path}: {exc}") from None
    return parse_state(doc)


def state_document(obj, label: str | None = None) -> dict:
    if isinstance(obj, DensityMatrix):
        doc = {"schema": "density", "dim": obj.dim, "data": encode_complex(obj.entries)}
    elif isinstance(obj, PureState):
        doc = {"schema": "pure", "dim": obj.dim, "data": encode_complex(obj.amplitudes)}
    elif isinstance(obj, PureStateEnsemble):
        d = obj.dim
        doc = {
            "schema": "ensemble",
            "dim": d,
            "data": [{"p": p, "amplitudes": encode_complex(s.padded(d).amplitudes)} for p, s in obj.members],
        }
    elif isinstance(obj, KrausSet):
        doc = {"schema": "kraus", "dim": obj.dim, "data": [encode_complex(k) for k in obj.operators]}
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    if label is not None:
        doc["label"] = label
    return doc


def write_state_file(path, obj, label: str | None = None) -> None:
    Path(path).write_text(json.dumps(state_document(obj, label), indent=1) + "\n", encoding="utf-8")


def fixture_path(name: str) -> Path:
    """Path of a state file shipped in ``cohdist/fixtures``."""
    return Path(str(resources.files("cohdist") / "fixtures" / name))
