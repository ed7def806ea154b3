"""
Model files.

A model file is a JSON document::

    {"schema_version": 1,
     "dim": 4,
     "hamiltonian": [[[re, im], ...], ...],
     "jumps": [[[[re, im], ...], ...], ...],
     "lattice": {...}}            # optional, LatticeSpec.to_dict()

Complex entries are ``[re, im]`` pairs of JSON numbers.  Floats are written
with the shortest repr that reads back to the same double, so a write/read
cycle is bit-exact.
"""

import json
import math

import numpy as np

from .errors import ModelFormatError
from .lattice import LatticeSpec, effective_generator

__all__ = ["MODEL_SCHEMA_VERSION", "Model", "dumps_model", "loads_model",
           "write_model", "read_model"]

MODEL_SCHEMA_VERSION = 1


class Model:
    """A generator set together with the lattice it came from, if any."""

    def __init__(self, generators, lattice=None):
        self.generators = generators
        self.lattice = lattice

    @property
    def dim(self):
        return self.generators.dim

    def descriptor(self):
        d = {"dim": self.dim, "jump_count": len(self.generators.jumps)}
        if self.lattice is not None:
            d["lattice"] = self.lattice.to_dict()
        return d


def _encode_matrix(m):
    m = np.asarray(m, dtype=np.complex128)
    if not np.all(np.isfinite(m)):
        raise ModelFormatError("matrix entries must be finite")
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def dumps_model(model):
    gs = model.generators
    doc = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "dim": gs.dim,
        "hamiltonian": _encode_matrix(gs.hamiltonian),
        "jumps": [_encode_matrix(l) for l in gs.jumps],
    }
    if model.lattice is not None:
        doc["lattice"] = model.lattice.to_dict()
    return json.dumps(doc, allow_nan=False) + "\n"


def _decode_matrix(obj, d, where):
    if not isinstance(obj, list) or len(obj) != d:
        raise ModelFormatError(f"{where}: expected {d} rows")
    out = np.empty((d, d), dtype=np.complex128)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != d:
            raise ModelFormatError(f"{where}[{i}]: expected {d} entries")
        for j, z in enumerate(row):
            ok = (isinstance(z, list) and len(z) == 2
                  and all(isinstance(x, (int, float))
                          and not isinstance(x, bool) for x in z))
            if not ok:
                raise ModelFormatError(
                    f"{where}[{i}][{j}]: expected an [re, im] number pair")
            if not all(math.isfinite(x) for x in z):
                raise ModelFormatError(f"{where}[{i}][{j}]: non-finite entry")
            out[i, j] = complex(float(z[0]), float(z[1]))
    return out


def loads_model(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc.msg}", exc.lineno,
                               exc.colno) from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("top level must be an object")
    version = doc.get("schema_version")
    if version != MODEL_SCHEMA_VERSION:
        raise ModelFormatError(
            f"unsupported schema_version {version!r}, expected "
            f"{MODEL_SCHEMA_VERSION}")
    for key in ("dim", "hamiltonian", "jumps"):
        if key not in doc:
            raise ModelFormatError(f"missing required field {key!r}")
    d = doc["dim"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ModelFormatError(f"dim must be a positive integer, got {d!r}")
    h = _decode_matrix(doc["hamiltonian"], d, "hamiltonian")
    if not isinstance(doc["jumps"], list):
        raise ModelFormatError("jumps must be a list of matrices")
    jumps = [_decode_matrix(l, d, f"jumps[{k}]")
             for k, l in enumerate(doc["jumps"])]
    lattice = None
    if doc.get("lattice") is not None:
        try:
            lattice = LatticeSpec.from_dict(doc["lattice"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"lattice: {exc}") from exc
    try:
        gs = effective_generator(h, jumps)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc
    return Model(gs, lattice)


def write_model(path, model):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))


def read_model(path):
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())
