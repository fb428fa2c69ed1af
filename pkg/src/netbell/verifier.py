"""Measure the relations certified by an optimal violation and report them.

Each check produces :class:`Entry` records; :func:`certify` aggregates them
in a fixed order: Bell value, norms, central commutation, edge
anticommutators, linear constraints, eigenvector conditions.

Mixed states are handled by purification: the verifier appends an ancilla
that no party touches, so every vector-norm check stays well defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from netbell import linalg
from netbell.encoding import (
    EncodingScheme,
    constraint_strings,
    format_bits,
    generate_transversal,
    parity_signs,
    predicted_anticommutator,
)
from netbell.errors import DegenerateRealization, NotApplicable
from netbell.realization import (
    Realization,
    correlator_table,
    omega_norms,
    term_factors,
)
from netbell.scenarios import STAR, delta_from_correlators

VALUE_TOL = 1e-9
ALGEBRA_TOL = 1e-12


@dataclass
class Entry:
    name: str
    measured: float
    expected: float
    tolerance: float
    passed: bool
    relation: str = "eq"
    operator_level: Optional[bool] = None

    def as_dict(self) -> dict:
        d = {
            "name": self.name,
            "measured": self.measured,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "relation": self.relation,
            "pass": self.passed,
        }
        if self.operator_level is not None:
            d["operator_level"] = self.operator_level
        return d


def check(name, measured, expected, tol, relation="eq", **kw) -> Entry:
    measured, expected = float(measured), float(expected)
    if relation == "eq":
        ok = abs(measured - expected) <= tol
    elif relation == "le":
        ok = measured <= expected + tol
    elif relation == "gt":
        ok = measured > expected + tol
    else:
        raise ValueError(f"unknown relation {relation!r}")
    return Entry(name, measured, expected, tol, bool(ok), relation, **kw)


@dataclass
class CertificationReport:
    entries: list[Entry]
    delta_value: float
    delta_target: float
    correlators: tuple[float, ...] = ()
    scenario: dict = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list[Entry]:
        return [e for e in self.entries if not e.passed]

    def entry(self, name: str) -> Entry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "overall": self.overall,
            "delta_value": self.delta_value,
            "delta_target": self.delta_target,
            "correlators": list(self.correlators),
            "entries": [e.as_dict() for e in self.entries],
        }


def purify(realization: Realization) -> Realization:
    """Pure-state realization with the same statistics.

    A density matrix ``sum_k w_k |v_k><v_k|`` becomes
    ``sum_k sqrt(w_k) |v_k>|k>`` on an extra ancilla subsystem.
    """
    if realization.is_pure:
        return realization
    w, v = linalg.hermitian_eigen(realization.state, method="lapack")
    keep = w > 1e-15
    w, v = w[keep], v[:, keep]
    r = len(w)
    psi = (v * np.sqrt(w)[None, :]).reshape(-1)
    return replace(realization, dims=realization.dims + (r,), state=psi)


def _scheme_for(realization: Realization) -> EncodingScheme:
    if realization.scenario.kind == STAR:
        return generate_transversal(2)
    return realization.scenario.scheme


def verify_central_commutation(realization: Realization, tol: float = ALGEBRA_TOL) -> list[Entry]:
    out = []
    b = realization.central
    for i in range(len(b)):
        for j in range(i + 1, len(b)):
            out.append(check(f"commutator B{i + 1},B{j + 1}", linalg.commutator_norm(b[i], b[j]), 0.0, tol))
    return out


def verify_edge_anticommutators(realization: Realization, scheme: EncodingScheme | None = None,
                                tol: float = ALGEBRA_TOL) -> list[Entry]:
    scheme = scheme or _scheme_for(realization)
    r = purify(realization)
    out = []
    for k, (obs, pos) in enumerate(zip(r.edge, r.edge_positions)):
        name = r.edge_names()[k]
        dim = obs[0].shape[0]
        for j in range(len(obs)):
            for jp in range(j + 1, len(obs)):
                ac = linalg.anticommutator(obs[j], obs[jp])
                expected = float(predicted_anticommutator(scheme, j, jp))
                measured = linalg.local_expectation(r.state, [(ac, pos)], r.dims).real
                op_ok = linalg.max_abs(ac - expected * np.eye(dim)) <= tol
                out.append(check(f"anticommutator {name}{j + 1},{name}{jp + 1}",
                                 measured, expected, tol, operator_level=bool(op_ok)))
    return out


def verify_linear_constraints(realization: Realization, scheme: EncodingScheme | None = None,
                              tol: float = VALUE_TOL) -> list[Entry]:
    """Residuals ``||(sum_x (-1)**(s.y^x) A_x x I)|psi>||`` and the aggregate ``delta_m``."""
    if realization.scenario.kind == STAR:
        raise NotApplicable("linear constraints are defined for bilocal scenarios only")
    scheme = scheme or _scheme_for(realization)
    m = scheme.m
    half = 2 ** (m - 1)
    cons = constraint_strings(m).elements
    r = purify(realization)
    out = []
    for k, (obs, pos) in enumerate(zip(r.edge, r.edge_positions)):
        name = r.edge_names()[k]
        delta = 0.0
        for s in cons:
            signs = parity_signs(scheme, s)
            op = sum(int(signs[x]) * obs[x] for x in range(len(obs)))
            res = float(np.linalg.norm(linalg.apply_operator(op, pos, r.dims, r.state)))
            delta += half - res * res
            out.append(check(f"constraint {name} s={format_bits(s)}", res, 0.0, tol))
        out.append(check(f"delta_m {name}", delta, (half - m) * half, tol))
    return out


def verify_eigenvector_conditions(realization: Realization, tol: float = VALUE_TOL) -> list[Entry]:
    r = purify(realization)
    omegas = omega_norms(r)
    if np.any(omegas < 1e-12):
        raise DegenerateRealization("an edge norm vanishes; M_i is undefined")
    out = []
    for i in range(r.scenario.n_terms):
        mpsi = r.state
        for op, pos in term_factors(r, i, normalize=omegas[i]):
            mpsi = linalg.apply_operator(op, pos, r.dims, mpsi)
        mean = float(np.vdot(r.state, mpsi).real)
        lam = 1.0 if mean >= 0 else -1.0
        res = float(np.linalg.norm(mpsi - lam * r.state))
        out.append(check(f"eigenvector M{i + 1} (lambda={lam:+.0f})", res, 0.0, tol))
    return out


def certify(realization: Realization, tol: float = VALUE_TOL,
            algebra_tol: float = ALGEBRA_TOL) -> CertificationReport:
    sc = realization.scenario
    table = correlator_table(realization)
    delta = delta_from_correlators(sc, table)
    target = sc.quantum_optimum
    entries = [
        check("delta", delta, target, tol),
        check("delta exceeds classical bound", delta, sc.classical_bound, tol, relation="gt"),
    ]
    r = purify(realization)
    omega_expected = math.sqrt(2.0) if sc.kind == STAR else 2 ** (sc.m - 1) / math.sqrt(sc.m)
    omegas = omega_norms(r)
    names = r.edge_names()
    for i in range(omegas.shape[0]):
        for k in range(omegas.shape[1]):
            entries.append(check(f"omega {names[k]} i={i + 1}", omegas[i, k], omega_expected, tol))
    entries += verify_central_commutation(r, algebra_tol)
    entries += verify_edge_anticommutators(r, tol=algebra_tol)
    if sc.kind != STAR:
        entries += verify_linear_constraints(r, tol=tol)
    entries += verify_eigenvector_conditions(r, tol)
    return CertificationReport(
        entries=entries,
        delta_value=delta,
        delta_target=target,
        correlators=table.values,
        scenario=sc.describe(),
    )
