"""Classical (n-local / bilocal) bounds by closed form and by enumeration.

Deterministic strategies are enumerated as integer bitmasks: bit ``x`` of a
mask set means the response to input ``x`` is ``-1``.  Ties are broken by
the lowest mask.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from netbell.encoding import EncodingScheme, sign_matrix
from netbell.errors import CapacityError, InvalidParameter
from netbell.scenarios import STAR, Scenario, bilocal_classical_bound, correlator_sign_vectors

MAX_ETA_M = 5
MAX_STAR_N = 8
MAX_JOINT_M = 4


@dataclass(frozen=True)
class DeterministicStrategy:
    edge: tuple[tuple[int, ...], ...]
    central: tuple[int, ...]

    def __post_init__(self):
        for row in (*self.edge, self.central):
            if any(v not in (-1, 1) for v in row):
                raise InvalidParameter("deterministic responses must be +1 or -1")


def eta_closed_form(m: int) -> int:
    if m < 2:
        raise InvalidParameter(f"m must be >= 2, got {m}")
    return bilocal_classical_bound(m)


def assignments(n_inputs: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows of +-1 responses for the masks in ``[start, stop)``."""
    stop = 2 ** n_inputs if stop is None else stop
    masks = np.arange(start, stop, dtype=np.int64)[:, None]
    bits = (masks >> np.arange(n_inputs, dtype=np.int64)) & 1
    return 1 - 2 * bits


def _eta_range(signs: np.ndarray, start: int, stop: int):
    a = assignments(signs.shape[1], start, stop)
    eta = np.abs(a @ signs.T).sum(axis=1)
    k = int(np.argmax(eta))
    return int(eta[k]), start + k


def eta_brute_force(scheme: EncodingScheme, chunks: int = 1):
    """Maximum over edge assignments of ``sum_i |sum_x S[i, x] a_x|``.

    Returns ``(value, witness)``; the witness is the lowest-mask maximizer
    as a tuple of +-1.  ``chunks`` splits the mask range; partial maxima
    merge to the same answer regardless of the split.
    """
    if scheme.m > MAX_ETA_M:
        raise CapacityError(f"eta enumeration supports m <= {MAX_ETA_M}, got {scheme.m}")
    signs = sign_matrix(scheme)
    total = 2 ** scheme.n_inputs
    bounds = np.linspace(0, total, chunks + 1).astype(np.int64)
    parts = [_eta_range(signs, int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    best = merge_maxima(parts)
    witness = tuple(int(v) for v in assignments(scheme.n_inputs, best[1], best[1] + 1)[0])
    return best[0], witness


def merge_maxima(parts):
    """Combine ``(value, mask)`` partial maxima; larger value, then lower mask."""
    return min(parts, key=lambda vm: (-vm[0], vm[1]))


def classical_bound(scenario: Scenario) -> float:
    if scenario.kind == STAR:
        return 2.0
    return float(eta_closed_form(scenario.m))


def _star_brute_force(n: int) -> tuple[float, DeterministicStrategy]:
    opts = assignments(2)  # the four (a_1, a_2) responses of one edge party
    plus = opts[:, 0] + opts[:, 1]
    minus = opts[:, 0] - opts[:, 1]
    choice = np.array(list(itertools.product(range(4), repeat=n)), dtype=np.int64)
    prod_plus = np.prod(plus[choice], axis=1)
    prod_minus = np.prod(minus[choice], axis=1)
    b = assignments(2)
    i1 = prod_plus[:, None] * b[None, :, 0]
    i2 = prod_minus[:, None] * b[None, :, 1]
    delta = np.abs(i1) ** (1.0 / n) + np.abs(i2) ** (1.0 / n)
    flat = int(np.argmax(delta))
    e, c = np.unravel_index(flat, delta.shape)
    strat = DeterministicStrategy(
        edge=tuple(tuple(int(v) for v in opts[k]) for k in choice[e]),
        central=tuple(int(v) for v in b[c]),
    )
    return float(delta[e, c]), strat


def _bilocal_joint(scheme: EncodingScheme) -> tuple[float, DeterministicStrategy]:
    signs = sign_matrix(scheme)
    a = assignments(scheme.n_inputs)
    alpha = a @ signs.T  # (masks, m)
    b = assignments(scheme.m)
    best = (-1.0, None)
    for bi, bvec in enumerate(b):
        # J_i = alpha_i(a) * b_i * gamma_i(c) over the full (a, c) grid
        j = alpha[:, None, :] * bvec[None, None, :] * alpha[None, :, :]
        delta = np.sqrt(np.abs(j)).sum(axis=2)
        flat = int(np.argmax(delta))
        val = float(delta.flat[flat])
        if val > best[0] + 1e-12:
            ia, ic = np.unravel_index(flat, delta.shape)
            best = (val, (ia, bi, ic))
    ia, bi, ic = best[1]
    strat = DeterministicStrategy(
        edge=(tuple(int(v) for v in a[ia]), tuple(int(v) for v in a[ic])),
        central=tuple(int(v) for v in b[bi]),
    )
    return best[0], strat


def brute_force_strategy(scenario: Scenario) -> tuple[float, DeterministicStrategy]:
    """Best deterministic strategy and its Bell value.

    Bilocal ``m = 5`` uses the diagonal reduction: the joint optimum is
    reached with Charlie copying Alice's assignment, so only ``a`` is
    scanned.
    """
    if scenario.kind == STAR:
        if scenario.n > MAX_STAR_N:
            raise CapacityError(f"star enumeration supports n <= {MAX_STAR_N}, got {scenario.n}")
        return _star_brute_force(scenario.n)
    m = scenario.m
    if m <= MAX_JOINT_M:
        return _bilocal_joint(scenario.scheme)
    if m <= MAX_ETA_M:
        value, witness = eta_brute_force(scenario.scheme)
        return float(value), DeterministicStrategy(edge=(witness, witness), central=(1,) * m)
    raise CapacityError(f"bilocal enumeration supports m <= {MAX_ETA_M}, got {m}")


def brute_force_delta(scenario: Scenario) -> float:
    return brute_force_strategy(scenario)[0]


def strategy_delta(scenario: Scenario, strategy: DeterministicStrategy) -> float:
    """Bell value of one deterministic strategy."""
    signs = correlator_sign_vectors(scenario)
    effs = [signs @ np.asarray(a) for a in strategy.edge]
    terms = np.prod(effs, axis=0) * np.asarray(strategy.central)
    if scenario.kind == STAR:
        return float(np.sum(np.abs(terms) ** (1.0 / scenario.n)))
    return float(np.sum(np.sqrt(np.abs(terms))))


def diagonal_maximum(scheme: EncodingScheme) -> float:
    """``max_a sum_i sqrt(|alpha_i(a)|^2)`` i.e. the joint value with ``c = a``."""
    return float(eta_brute_force(scheme)[0])


def joint_maximum(scheme: EncodingScheme) -> float:
    """``max_{a, c} sum_i sqrt(|alpha_i(a)| |gamma_i(c)|)`` by full scan."""
    if scheme.m > MAX_JOINT_M:
        raise CapacityError(f"joint scan supports m <= {MAX_JOINT_M}")
    signs = sign_matrix(scheme)
    alpha = np.abs(assignments(scheme.n_inputs) @ signs.T).astype(float)
    best = 0.0
    for row in alpha:
        best = max(best, float(np.max(np.sqrt(row[None, :] * alpha).sum(axis=1))))
    return best


def ratio_quantum_classical(m: int) -> float:
    return 2 ** (m - 1) * math.sqrt(m) / eta_closed_form(m)
