"""Network scenarios and evaluation of their Bell functionals.

Two families are supported:

* ``star``: ``n`` edge parties with two inputs each and a central party with
  two inputs; ``Delta = |I_1|**(1/n) + |I_2|**(1/n) <= 2``.
* ``bilocal``: two edge parties with ``2**(m-1)`` inputs each and a central
  party with ``m`` inputs; ``Delta = sum_i sqrt(|J_i|) <= m * C(m-1, floor((m-1)/2))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from netbell.encoding import EncodingScheme, Policy, generate_transversal, sign_matrix
from netbell.errors import DimensionMismatch, InvalidParameter

STAR = "star"
BILOCAL = "bilocal"

STAR_SIGNS = np.array([[1, 1], [1, -1]])


def bilocal_classical_bound(m: int) -> int:
    return m * math.comb(m - 1, (m - 1) // 2)


def bilocal_quantum_optimum(m: int) -> float:
    return 2 ** (m - 1) * math.sqrt(m)


@dataclass(frozen=True)
class Scenario:
    kind: str
    n: int = 2
    m: int = 2
    scheme: Optional[EncodingScheme] = None

    @property
    def classical_bound(self) -> float:
        if self.kind == STAR:
            return 2.0
        return float(bilocal_classical_bound(self.m))

    @property
    def quantum_optimum(self) -> float:
        if self.kind == STAR:
            return 2.0 * math.sqrt(2.0)
        return bilocal_quantum_optimum(self.m)

    @property
    def n_edge_parties(self) -> int:
        return self.n if self.kind == STAR else 2

    @property
    def n_edge_inputs(self) -> int:
        return 2 if self.kind == STAR else 2 ** (self.m - 1)

    @property
    def n_central_inputs(self) -> int:
        return 2 if self.kind == STAR else self.m

    @property
    def n_terms(self) -> int:
        return self.n_central_inputs

    def describe(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == STAR:
            d["n"] = self.n
        else:
            d["m"] = self.m
            d["policy"] = self.scheme.policy.value
        return d


@dataclass(frozen=True)
class CorrelatorTable:
    values: tuple[float, ...]
    std_errors: Optional[tuple[float, ...]] = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)


def build_scenario(kind: str, n: int | None = None, m: int | None = None,
                   policy=Policy.LEX_FIRST_ZERO, scheme: EncodingScheme | None = None) -> Scenario:
    if kind == STAR:
        if n is None or not isinstance(n, int) or n < 2:
            raise InvalidParameter(f"star scenario needs integer n >= 2, got {n!r}")
        if m not in (None, 2):
            raise InvalidParameter("star networks are fixed to two inputs per party")
        return Scenario(kind=STAR, n=n, m=2)
    if kind == BILOCAL:
        if scheme is not None:
            if m is not None and m != scheme.m:
                raise InvalidParameter(f"scheme has m={scheme.m}, requested m={m}")
            return Scenario(kind=BILOCAL, n=2, m=scheme.m, scheme=scheme)
        if m is None or not isinstance(m, int) or m < 2:
            raise InvalidParameter(f"bilocal scenario needs integer m >= 2, got {m!r}")
        return Scenario(kind=BILOCAL, n=2, m=m, scheme=generate_transversal(m, policy))
    raise InvalidParameter(f"unknown scenario kind {kind!r}")


def correlator_sign_vectors(scenario: Scenario) -> np.ndarray:
    """Row ``i`` holds the signs of the edge inputs in term ``i``."""
    if scenario.kind == STAR:
        return STAR_SIGNS.copy()
    return sign_matrix(scenario.scheme)


def delta_from_values(kind: str, n: int, values: Sequence[float]) -> float:
    v = np.abs(np.asarray(values, dtype=float))
    if kind == STAR:
        return float(np.sum(v ** (1.0 / n)))
    return float(np.sum(np.sqrt(v)))


def delta_from_correlators(scenario: Scenario, table) -> float:
    values = table.values if isinstance(table, CorrelatorTable) else table
    if len(values) != scenario.n_terms:
        raise DimensionMismatch(
            f"expected {scenario.n_terms} correlator values, got {len(values)}"
        )
    return delta_from_values(scenario.kind, scenario.n, values)
