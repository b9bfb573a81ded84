"""JSON and CSV wire formats.

Matrices:    {"dim": d, "re": [[..]], "im": [[..]]}        ("im" optional on input)
Vectors:     {"dim": d, "re": [..], "im": [..]}
Sequences:   {"dim": d, "lo": n, "values": [[[re..],[im..]], ...]}
             one [re-components, im-components] pair per index from lo
Circle data: {"rho": r, "n_samples": N, "samples": [...as vectors...]}
Stencils:    {"kernel": name, "params": {...}, "forcing": sequence-or-null}
             linear params carry a matrix object; polynomial coefficients
             are listed from power 1.
Sequence CSV rows: (n, component, re, im).
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .errors import InputError
from .manifold import ManifoldProblem
from .operators import BoundedOperator
from .sequences import WindowedSequence
from .solver import StencilMap
from .ztransform import CircleFunction


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _require(obj, key, context):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{context} needs a {key!r} field")
    return obj[key]


def matrix_from_json(obj, context="matrix") -> BoundedOperator:
    dim = int(_require(obj, "dim", context))
    re = np.asarray(_require(obj, "re", context), dtype=np.float64)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=np.float64)
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise InputError(f"{context} entries must be {dim}x{dim}")
    return BoundedOperator(re + 1j * im)


def matrix_to_json(mat: np.ndarray) -> dict:
    mat = np.asarray(mat, dtype=np.complex128)
    return {
        "dim": int(mat.shape[0]),
        "re": mat.real.tolist(),
        "im": mat.imag.tolist(),
    }


def vector_from_json(obj, context="vector") -> np.ndarray:
    dim = int(_require(obj, "dim", context))
    re = np.asarray(_require(obj, "re", context), dtype=np.float64).reshape(-1)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=np.float64).reshape(-1)
    if re.size != dim or im.size != dim:
        raise InputError(f"{context} components must have length {dim}")
    return re + 1j * im


def vector_to_json(vec: np.ndarray) -> dict:
    vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
    return {"dim": int(vec.size), "re": vec.real.tolist(), "im": vec.imag.tolist()}


def sequence_from_json(obj, context="sequence") -> WindowedSequence:
    dim = int(_require(obj, "dim", context))
    lo = int(_require(obj, "lo", context))
    raw = _require(obj, "values", context)
    vals = np.zeros((max(len(raw), 1), dim), dtype=np.complex128)
    for i, pair in enumerate(raw):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise InputError(f"{context} values must be [re, im] component pairs")
        re = np.asarray(pair[0], dtype=np.float64).reshape(-1)
        im = np.asarray(pair[1], dtype=np.float64).reshape(-1)
        if re.size != dim or im.size != dim:
            raise InputError(f"{context} entry {i} must have {dim} components")
        vals[i] = re + 1j * im
    return WindowedSequence(lo, vals)


def sequence_to_json(u: WindowedSequence) -> dict:
    return {
        "dim": u.dim,
        "lo": u.lo,
        "values": [
            [row.real.tolist(), row.imag.tolist()] for row in u.values
        ],
    }


def write_sequence_csv(u: WindowedSequence, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "component", "re", "im"])
        for offset, row in enumerate(u.values):
            for comp in range(u.dim):
                writer.writerow(
                    [u.lo + offset, comp, repr(float(row[comp].real)), repr(float(row[comp].imag))]
                )


def circle_function_to_json(f: CircleFunction) -> dict:
    return {
        "rho": f.rho,
        "n_samples": f.n_samples,
        "samples": [[row.real.tolist(), row.imag.tolist()] for row in f.samples],
    }


def write_circle_csv(f: CircleFunction, path):
    """Rows (theta, |f|) for external plotting."""
    mags = np.linalg.norm(f.samples, axis=1)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta", "abs"])
        for theta, mag in zip(f.angles(), mags):
            writer.writerow([repr(float(theta)), repr(float(mag))])


def stencil_from_json(obj, context="stencil") -> StencilMap:
    kernel = _require(obj, "kernel", context)
    params = dict(obj.get("params", {}))
    if kernel == "linear" and "matrix" in params:
        params["matrix"] = matrix_from_json(params["matrix"], f"{context}.matrix").entries
    forcing = obj.get("forcing")
    seq = sequence_from_json(forcing, f"{context}.forcing") if forcing else None
    return StencilMap(kernel, params, seq)


def manifold_problem_from_json(obj, context="problem") -> ManifoldProblem:
    kwargs = {}
    for key in ("rho", "fp_tol"):
        if key in obj:
            kwargs[key] = float(obj[key])
    for key in ("max_iter", "horizon", "tail_cut"):
        if key in obj:
            kwargs[key] = int(obj[key])
    return ManifoldProblem(
        A=matrix_from_json(_require(obj, "A", context), f"{context}.A"),
        F=stencil_from_json(_require(obj, "F", context), f"{context}.F"),
        **kwargs,
    )


def grid_from_json(obj, context="grid") -> list[np.ndarray]:
    vectors = _require(obj, "vectors", context)
    if not isinstance(vectors, list) or not vectors:
        raise InputError(f"{context} needs a nonempty 'vectors' list")
    return [vector_from_json(v, f"{context}[{i}]") for i, v in enumerate(vectors)]
