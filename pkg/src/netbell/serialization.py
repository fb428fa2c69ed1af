"""JSON realization files.

Layout::

    {
      "scenario": {"kind": "bilocal", "m": 3, "policy": "lex-first-zero"},
      "dims": [2, 2, 2, 2],
      "encoding_strings": ["000", "001", "010", "011"],
      "positions": {"A": [0], "B": [1, 2], "C": [3]},
      "sources": [[0, 1], [2, 3]],
      "observables": {"A": [M, ...], "B": [M, ...], "C": [M, ...]},
      "state": {"vector": [[re, im], ...]}   or   {"density": M},
      "convention": "transpose-central"
    }

where ``M = {"rows": r, "cols": c, "data": [[re, im], ...]}`` is row-major.
Star files name the edge parties ``A1 ... An``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from netbell.encoding import EncodingScheme, generate_transversal
from netbell.errors import DimensionMismatch, InvalidOperand, InvalidParameter
from netbell.realization import CONVENTION, Realization
from netbell.scenarios import STAR, build_scenario


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in a.reshape(-1)],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        data = np.array(obj["data"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParameter(f"malformed matrix: {exc}") from None
    if data.shape != (rows * cols, 2):
        raise InvalidParameter(f"matrix data has shape {data.shape}, expected ({rows * cols}, 2)")
    return _pairs_to_complex(data).reshape(rows, cols)


def vector_to_json(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def vector_from_json(obj) -> np.ndarray:
    data = np.array(obj, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise InvalidParameter("state vector must be a list of [re, im] pairs")
    return _pairs_to_complex(data)


def _pairs_to_complex(data: np.ndarray) -> np.ndarray:
    # assigning parts keeps signed zeros, so files re-serialize identically
    out = np.empty(data.shape[0], dtype=complex)
    out.real = data[:, 0]
    out.imag = data[:, 1]
    return out


def realization_to_dict(r: Realization) -> dict:
    names = r.edge_names()
    positions = {name: list(pos) for name, pos in zip(names, r.edge_positions)}
    positions["B"] = list(r.central_positions)
    observables = {name: [matrix_to_json(o) for o in obs] for name, obs in zip(names, r.edge)}
    observables["B"] = [matrix_to_json(o) for o in r.central]
    scheme = generate_transversal(2) if r.scenario.kind == STAR else r.scenario.scheme
    if r.is_pure:
        state = {"vector": vector_to_json(r.state)}
    else:
        state = {"density": matrix_to_json(r.state)}
    return {
        "scenario": r.scenario.describe(),
        "dims": list(r.dims),
        "encoding_strings": scheme.as_strings(),
        "positions": positions,
        "sources": None if r.sources is None else [list(s) for s in r.sources],
        "observables": observables,
        "state": state,
        "convention": CONVENTION,
    }


def realization_from_dict(doc: dict) -> Realization:
    try:
        sc_doc = doc["scenario"]
        kind = sc_doc["kind"]
        if kind == STAR:
            scenario = build_scenario(STAR, n=int(sc_doc["n"]))
            names = [f"A{k + 1}" for k in range(scenario.n)]
        else:
            policy = sc_doc.get("policy", "lex-first-zero")
            scheme = EncodingScheme.from_strings(doc["encoding_strings"], policy=policy)
            scenario = build_scenario(kind, m=int(sc_doc["m"]), scheme=scheme)
            names = ["A", "C"]
        if doc.get("convention", CONVENTION) != CONVENTION:
            raise InvalidParameter(f"unsupported convention {doc.get('convention')!r}")
        obs = doc["observables"]
        pos = doc["positions"]
        state_doc = doc["state"]
        if "vector" in state_doc:
            state = vector_from_json(state_doc["vector"])
        elif "density" in state_doc:
            state = matrix_from_json(state_doc["density"])
        else:
            raise InvalidParameter("state must hold 'vector' or 'density'")
        sources = doc.get("sources")
        r = Realization(
            scenario=scenario,
            dims=tuple(int(d) for d in doc["dims"]),
            edge=tuple(tuple(matrix_from_json(m) for m in obs[name]) for name in names),
            central=tuple(matrix_from_json(m) for m in obs["B"]),
            state=state,
            edge_positions=tuple(tuple(int(p) for p in pos[name]) for name in names),
            central_positions=tuple(int(p) for p in pos["B"]),
            sources=None if sources is None else tuple(tuple(int(p) for p in s) for s in sources),
        )
    except KeyError as exc:
        raise InvalidParameter(f"realization file is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidParameter):
            raise
        raise InvalidParameter(f"malformed realization file: {exc}") from None
    try:
        return r.validate(atol=1e-9)
    except (DimensionMismatch, InvalidOperand) as exc:
        raise InvalidParameter(f"inconsistent realization file: {exc}") from None


def dumps(r: Realization) -> str:
    return json.dumps(realization_to_dict(r), indent=1)


def loads(text: str) -> Realization:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidParameter(f"not valid JSON: {exc}") from None
    return realization_from_dict(doc)


def save(r: Realization, path) -> None:
    Path(path).write_text(dumps(r) + "\n")


def load(path) -> Realization:
    return loads(Path(path).read_text())
