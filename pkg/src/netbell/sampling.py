"""Finite-shot emulation of the network experiment.

Parties are ordered ``(A, B, C)`` for the bilocal network and
``(A_1, ..., A_n, B)`` for the star network; input and outcome tuples follow
the same order.  Each input tuple gets its own counter-based Philox stream
keyed by ``(seed, tuple index)``, and the ``k``-th uniform of that stream
decides shot ``k``.  Counts therefore do not depend on evaluation order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from netbell import linalg
from netbell.errors import DimensionMismatch, InvalidParameter
from netbell.realization import Realization
from netbell.scenarios import STAR, CorrelatorTable, correlator_sign_vectors, delta_from_values


@dataclass
class OutcomeCounts:
    """``counts[t][o]`` for input tuple ``inputs[t]`` and outcome ``outcomes[o]``."""

    inputs: list[tuple[int, ...]]
    outcomes: list[tuple[int, ...]]
    counts: np.ndarray
    shots: int
    seed: int

    def rows(self):
        """``(input tuple, outcome tuple, count)`` for every nonzero count."""
        for t, inp in enumerate(self.inputs):
            for o, out in enumerate(self.outcomes):
                if self.counts[t, o]:
                    yield inp, out, int(self.counts[t, o])


def party_layout(realization: Realization):
    """``(observable lists, positions)`` per party in sampling order."""
    e, ep = realization.edge, realization.edge_positions
    c, cp = realization.central, realization.central_positions
    if realization.scenario.kind == STAR:
        return list(e) + [c], list(ep) + [cp]
    return [e[0], c, e[1]], [ep[0], cp, ep[1]]


def input_tuples(realization: Realization) -> list[tuple[int, ...]]:
    obs, _ = party_layout(realization)
    return list(itertools.product(*[range(len(o)) for o in obs]))


def sign_projectors(o) -> tuple[np.ndarray, np.ndarray]:
    """Projectors onto the ``+1`` (eigenvalue >= 0) and ``-1`` sign eigenspaces."""
    o = linalg.as_matrix(o)
    method = "jacobi" if o.shape[0] <= 16 else "lapack"
    w, v = linalg.hermitian_eigen(o, method=method)
    plus = v[:, w >= 0]
    minus = v[:, w < 0]
    return plus @ plus.conj().T, minus @ minus.conj().T


class _ProjectorCache:
    def __init__(self, realization):
        self.obs, self.pos = party_layout(realization)
        self._cache = {}

    def get(self, party, x):
        key = (party, x)
        if key not in self._cache:
            self._cache[key] = sign_projectors(self.obs[party][x])
        return self._cache[key]


def _distribution(realization, inputs, cache) -> np.ndarray:
    obs, pos = cache.obs, cache.pos
    if len(inputs) != len(obs):
        raise DimensionMismatch(f"expected {len(obs)} inputs, got {len(inputs)}")
    dims = realization.dims
    state = realization.state
    branches = [state]
    for party, x in enumerate(inputs):
        if not 0 <= x < len(obs[party]):
            raise DimensionMismatch(f"input {x} out of range for party {party}")
        projs = cache.get(party, x)
        branches = [linalg.apply_operator(p, pos[party], dims, b) for b in branches for p in projs]
    if state.ndim == 1:
        probs = np.array([np.vdot(b, b).real for b in branches])
    else:
        probs = np.array([np.trace(b).real for b in branches])
    return probs


def outcome_tuples(n_parties: int) -> list[tuple[int, ...]]:
    return list(itertools.product((1, -1), repeat=n_parties))


def outcome_distribution(realization: Realization, inputs) -> dict[tuple[int, ...], float]:
    """Born-rule probabilities of every outcome tuple for one input tuple."""
    cache = _ProjectorCache(realization)
    probs = _distribution(realization, tuple(inputs), cache)
    return dict(zip(outcome_tuples(len(cache.obs)), probs.tolist()))


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))


def shot_allocation(shots: int, n_tuples: int) -> np.ndarray:
    base, extra = divmod(shots, n_tuples)
    alloc = np.full(n_tuples, base, dtype=np.int64)
    alloc[:extra] += 1
    return alloc


def sample_counts(realization: Realization, shots: int, seed: int = 0) -> OutcomeCounts:
    tuples = input_tuples(realization)
    if shots < 1:
        raise InvalidParameter("shots must be >= 1")
    if shots < len(tuples):
        raise InvalidParameter(f"need at least one shot per input tuple ({len(tuples)})")
    if seed < 0:
        raise InvalidParameter("seed must be non-negative")
    cache = _ProjectorCache(realization)
    outs = outcome_tuples(len(cache.obs))
    alloc = shot_allocation(shots, len(tuples))
    counts = np.zeros((len(tuples), len(outs)), dtype=np.int64)
    for t, inp in enumerate(tuples):
        probs = np.clip(_distribution(realization, inp, cache), 0.0, None)
        cdf = np.cumsum(probs / probs.sum())
        cdf[-1] = 1.0
        u = _rng(seed, t).random(alloc[t])
        idx = np.searchsorted(cdf, u, side="right")
        counts[t] = np.bincount(idx, minlength=len(outs))
    return OutcomeCounts(inputs=tuples, outcomes=outs, counts=counts, shots=shots, seed=seed)


def raw_correlators(counts: OutcomeCounts):
    """Empirical full correlators per input tuple and their standard errors."""
    parity = np.array([math.prod(o) for o in counts.outcomes], dtype=float)
    n = counts.counts.sum(axis=1).astype(float)
    est = counts.counts @ parity / n
    se = np.sqrt(np.clip(1.0 - est ** 2, 0.0, None) / n)
    return est, se


def term_coefficients(realization: Realization) -> np.ndarray:
    """``coef[i, t]``: weight of input tuple ``t``'s correlator in term ``i``."""
    signs = correlator_sign_vectors(realization.scenario)
    tuples = input_tuples(realization)
    coef = np.zeros((realization.scenario.n_terms, len(tuples)))
    for t, inp in enumerate(tuples):
        if realization.scenario.kind == STAR:
            i, xs = inp[-1], inp[:-1]
        else:
            i, xs = inp[1], (inp[0], inp[2])
        coef[i, t] = math.prod(int(signs[i, x]) for x in xs)
    return coef


def estimate_from_counts(realization: Realization, counts: OutcomeCounts) -> CorrelatorTable:
    est, se = raw_correlators(counts)
    coef = term_coefficients(realization)
    values = coef @ est
    errors = np.sqrt((coef ** 2) @ (se ** 2))
    raw = {inp: (float(e), float(s)) for inp, e, s in zip(counts.inputs, est, se)}
    return CorrelatorTable(values=tuple(values.tolist()), std_errors=tuple(errors.tolist()), raw=raw)


def sample_and_estimate(realization: Realization, shots: int, seed: int = 0) -> CorrelatorTable:
    return estimate_from_counts(realization, sample_counts(realization, shots, seed))


def delta_with_error(realization: Realization, table: CorrelatorTable) -> tuple[float, float]:
    """Estimated Bell value and its first-order propagated standard error."""
    sc = realization.scenario
    k = sc.n if sc.kind == STAR else 2
    v = np.abs(np.asarray(table.values))
    delta = delta_from_values(sc.kind, sc.n, table.values)
    if table.std_errors is None:
        return delta, 0.0
    with np.errstate(divide="ignore"):
        grad = np.where(v > 0, v ** (1.0 / k - 1.0) / k, 0.0)
    return delta, float(np.sqrt(np.sum((grad * np.asarray(table.std_errors)) ** 2)))
