"""Quantum realizations: observables for every party plus a shared state.

Canonical subsystem order:

* bilocal: ``(A, B_A, B_C, C)`` with sources ``(A, B_A)`` and ``(B_C, C)``;
* star: ``(A_1, ..., A_n, B_1, ..., B_n)`` with source ``k`` on
  ``(A_k, B_k)``, where ``B_k`` is the central party's half for source ``k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from netbell import linalg
from netbell.errors import CapacityError, DimensionMismatch, InvalidParameter
from netbell.linalg import I2, SX, SY, SZ, kron_all
from netbell.scenarios import (
    STAR,
    CorrelatorTable,
    Scenario,
    correlator_sign_vectors,
)

CONVENTION = "transpose-central"
MAX_TOTAL_DIM = 2 ** 12


@dataclass(frozen=True, eq=False)
class Realization:
    scenario: Scenario
    dims: tuple[int, ...]
    edge: tuple[tuple[np.ndarray, ...], ...]
    central: tuple[np.ndarray, ...]
    state: np.ndarray
    edge_positions: tuple[tuple[int, ...], ...]
    central_positions: tuple[int, ...]
    sources: Optional[tuple[tuple[int, ...], ...]] = None

    @property
    def is_pure(self) -> bool:
        return self.state.ndim == 1

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def edge_names(self) -> list[str]:
        if self.scenario.kind == STAR:
            return [f"A{k + 1}" for k in range(len(self.edge))]
        return ["A", "C"]

    def validate(self, atol: float = linalg.MATRIX_ATOL) -> "Realization":
        sc = self.scenario
        if len(self.edge) != sc.n_edge_parties or len(self.edge_positions) != len(self.edge):
            raise DimensionMismatch(f"expected {sc.n_edge_parties} edge parties")
        if len(self.central) != sc.n_central_inputs:
            raise DimensionMismatch(f"expected {sc.n_central_inputs} central observables")
        used = [p for pos in self.edge_positions for p in pos] + list(self.central_positions)
        if sorted(used) != list(range(len(self.dims))):
            raise DimensionMismatch("party positions must partition the subsystems")
        for obs, pos in zip(self.edge, self.edge_positions):
            if len(obs) != sc.n_edge_inputs:
                raise DimensionMismatch(f"expected {sc.n_edge_inputs} edge observables")
            d = math.prod(self.dims[p] for p in pos)
            for o in obs:
                if o.shape != (d, d):
                    raise DimensionMismatch(f"edge observable shape {o.shape}, expected {d}")
                linalg.check_observable(o, atol)
        dc = math.prod(self.dims[p] for p in self.central_positions)
        for o in self.central:
            if o.shape != (dc, dc):
                raise DimensionMismatch(f"central observable shape {o.shape}, expected {dc}")
            linalg.check_observable(o, atol)
        if self.state.shape[0] != self.total_dim:
            raise DimensionMismatch(
                f"state dimension {self.state.shape[0]} != product of dims {self.total_dim}"
            )
        if self.state.ndim == 2 and self.state.shape[1] != self.total_dim:
            raise DimensionMismatch("density matrix must be square")
        return self


def gamma_generators(m: int) -> list[np.ndarray]:
    """``m`` pairwise anticommuting Hermitian involutions of size ``2**(m//2)``.

    Jordan-Wigner layout: generators ``2k`` and ``2k+1`` are ``X`` and ``Y``
    on qubit ``k`` with ``Z`` on every earlier qubit; an odd last generator
    is ``Z`` on every qubit.
    """
    if m < 2:
        raise InvalidParameter(f"m must be >= 2, got {m}")
    k = m // 2
    gens = []
    for site in range(k):
        for p in (SX, SY):
            gens.append(kron_all([SZ] * site + [p] + [I2] * (k - site - 1)))
    if m % 2:
        gens.append(kron_all([SZ] * k))
    return gens


def permute_vector(psi: np.ndarray, order: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Reorder the factors of a vector written in factor order ``order``."""
    order = list(order)
    t = psi.reshape([dims[k] for k in order])
    return t.transpose([order.index(k) for k in range(len(dims))]).reshape(-1)


def _bilocal_optimal(scenario: Scenario) -> Realization:
    m = scenario.m
    d = 2 ** (m // 2)
    gens = gamma_generators(m)
    signs = correlator_sign_vectors(scenario)
    edge_obs = tuple(
        sum(int(signs[r, x]) * gens[r] for r in range(m)) / math.sqrt(m)
        for x in range(signs.shape[1])
    )
    central = tuple(np.kron(g.T, g.T) for g in gens)
    phi = linalg.max_entangled_state(d)
    return Realization(
        scenario=scenario,
        dims=(d, d, d, d),
        edge=(edge_obs, edge_obs),
        central=central,
        state=np.kron(phi, phi),
        edge_positions=((0,), (3,)),
        central_positions=(1, 2),
        sources=((0, 1), (2, 3)),
    )


def _star_optimal(scenario: Scenario) -> Realization:
    n = scenario.n
    a1 = (SZ + SX) / math.sqrt(2)
    a2 = (SZ - SX) / math.sqrt(2)
    dims = (2,) * (2 * n)
    phi = linalg.max_entangled_state(2)
    order = [p for k in range(n) for p in (k, n + k)]
    state = permute_vector(kron_all([phi[:, None]] * n)[:, 0], order, dims)
    return Realization(
        scenario=scenario,
        dims=dims,
        edge=tuple((a1, a2) for _ in range(n)),
        central=(kron_all([SZ] * n), kron_all([SX] * n)),
        state=state,
        edge_positions=tuple((k,) for k in range(n)),
        central_positions=tuple(range(n, 2 * n)),
        sources=tuple((k, n + k) for k in range(n)),
    )


def optimal_dims(scenario: Scenario) -> tuple[int, ...]:
    """Subsystem dimensions of the optimal realization."""
    if scenario.kind == STAR:
        return (2,) * (2 * scenario.n)
    d = 2 ** (scenario.m // 2)
    return (d, d, d, d)


def optimal_realization(scenario: Scenario) -> Realization:
    total = math.prod(optimal_dims(scenario))
    if total > MAX_TOTAL_DIM:
        raise CapacityError(f"optimal realization has total dimension {total} > {MAX_TOTAL_DIM}")
    if scenario.kind == STAR:
        return _star_optimal(scenario)
    return _bilocal_optimal(scenario)


def edge_effective(realization: Realization, party: int, i: int) -> np.ndarray:
    """``sum_x S[i, x] A_x`` for one edge party."""
    signs = correlator_sign_vectors(realization.scenario)
    obs = realization.edge[party]
    return sum(int(signs[i, x]) * obs[x] for x in range(len(obs)))


def term_factors(realization: Realization, i: int, normalize: Sequence[float] | None = None):
    """Local factors of term ``i`` as ``(operator, positions)`` pairs."""
    factors = []
    for k, pos in enumerate(realization.edge_positions):
        eff = edge_effective(realization, k, i)
        if normalize is not None:
            eff = eff / normalize[k]
        factors.append((eff, pos))
    factors.append((realization.central[i], realization.central_positions))
    return factors


def correlator_table(realization: Realization) -> CorrelatorTable:
    values = []
    for i in range(realization.scenario.n_terms):
        val = linalg.local_expectation(realization.state, term_factors(realization, i), realization.dims)
        values.append(float(val.real))
    return CorrelatorTable(values=tuple(values))


def state_norm(state: np.ndarray, op: np.ndarray, positions, dims) -> float:
    """``||(op x I)|psi>||`` for a pure state."""
    v = linalg.apply_operator(op, positions, dims, state)
    return float(np.linalg.norm(v))


def omega_norms(realization: Realization) -> np.ndarray:
    """Array ``[i, k]`` of ``||(sum_x S[i, x] A^k_x x I)|psi>||``."""
    if not realization.is_pure:
        raise InvalidParameter("omega norms are defined for pure states only")
    n_terms = realization.scenario.n_terms
    out = np.zeros((n_terms, len(realization.edge)))
    for i in range(n_terms):
        for k, pos in enumerate(realization.edge_positions):
            out[i, k] = state_norm(realization.state, edge_effective(realization, k, i), pos, realization.dims)
    return out


def apply_visibility(realization: Realization, *visibilities: float) -> Realization:
    """Mix every source with white noise: ``v |phi><phi| + (1 - v) I / d``.

    Give one visibility per source, or a single value used for all of them.
    Observables are unchanged; the result carries a density matrix.
    """
    if not realization.is_pure:
        raise InvalidParameter("visibility is applied to a pure-state realization")
    sources = realization.sources
    if sources is None:
        raise InvalidParameter("realization does not declare its sources")
    if len(visibilities) == 1:
        visibilities = visibilities * len(sources)
    if len(visibilities) != len(sources):
        raise InvalidParameter(f"expected {len(sources)} visibilities, got {len(visibilities)}")
    for v in visibilities:
        if not 0.0 <= v <= 1.0:
            raise InvalidParameter(f"visibility {v} outside [0, 1]")
    dims = realization.dims
    parts = []
    order = []
    for v, pos in zip(visibilities, sources):
        rho = linalg.partial_trace(realization.state, pos, dims)
        d = rho.shape[0]
        parts.append(v * rho + (1.0 - v) * np.eye(d) / d)
        order.extend(pos)
    rho = linalg.permute_subsystems(kron_all(parts), order, dims)
    return replace(realization, state=rho)
