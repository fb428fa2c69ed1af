"""See-saw maximization of the network Bell functionals at fixed dimensions.

The state is always a product of one pure state per source, so the search
stays inside the network model.  Each restart alternates closed-form updates
of one source state or one party's observables at a time.  The non-linear
functional is linearized at the current point: term ``i`` gets weight
``sign(J_i) * g'(|J_i|)`` where ``g(x) = x**(1/k)`` (``k = n`` for the star
network, ``2`` for bilocal) and ``|J_i|`` is floored at ``eps``.  A source
state becomes the top eigenvector of the weighted Bell operator contracted
with the other sources; an observable becomes the sign of its effective
operator.  A sub-step that would lower the objective is rejected, so the
per-sweep trace never decreases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from netbell import linalg
from netbell.errors import CapacityError, InvalidParameter
from netbell.realization import Realization, permute_vector
from netbell.scenarios import STAR, Scenario, correlator_sign_vectors, delta_from_values

MAX_TOTAL_DIM = 2 ** 12


@dataclass(frozen=True)
class SeesawConfig:
    dims: tuple[int, ...]
    restarts: int = 20
    max_sweeps: int = 500
    tol: float = 1e-10
    seed: int = 0
    eps: float = 1e-12

    def __post_init__(self):
        if self.restarts < 1:
            raise InvalidParameter("restarts must be >= 1")
        if self.tol <= 0 or self.eps <= 0:
            raise InvalidParameter("tol and eps must be positive")
        if any(d < 1 for d in self.dims):
            raise InvalidParameter(f"dimensions must be positive, got {self.dims}")


@dataclass
class SeesawResult:
    value: float
    realization: Realization
    traces: list[list[float]] = field(default_factory=list)
    restart_values: list[float] = field(default_factory=list)
    best_restart: int = 0


def sign_operator(h, method: str | None = None) -> np.ndarray:
    """``V sign(L) V^dagger`` with ``sign(0) = +1``."""
    h = linalg.as_matrix(h)
    if method is None:
        method = "jacobi" if h.shape[0] <= 16 else "lapack"
    w, v = linalg.hermitian_eigen(h, method=method)
    s = np.where(w >= 0, 1.0, -1.0)
    return (v * s[None, :]) @ v.conj().T


def layout(scenario: Scenario, dims):
    """Full subsystem dims, edge positions, central positions and sources.

    Star: ``n`` edge dims followed by either ``n`` central halves or one
    central dim equal to the product of the edge dims.  Bilocal:
    ``(dA, dB_A, dB_C, dC)`` or ``(dA, dB, dC)`` with ``dB = dA * dC``.  A
    pure source state never needs a central half larger than its edge
    partner, so the short forms lose nothing.
    """
    dims = tuple(int(d) for d in dims)
    if scenario.kind == STAR:
        n = scenario.n
        if len(dims) == n + 1:
            if dims[n] != math.prod(dims[:n]):
                raise InvalidParameter(
                    f"central dim {dims[n]} must equal the product of the edge dims {dims[:n]}"
                )
            dims = dims[:n] * 2
        elif len(dims) != 2 * n:
            raise InvalidParameter(f"star n={n} needs {n + 1} or {2 * n} dims, got {len(dims)}")
        return (dims, tuple((k,) for k in range(n)), tuple(range(n, 2 * n)),
                tuple((k, n + k) for k in range(n)))
    if len(dims) == 3:
        if dims[1] != dims[0] * dims[2]:
            raise InvalidParameter(f"central dim {dims[1]} must equal dA * dC = {dims[0] * dims[2]}")
        dims = (dims[0], dims[0], dims[2], dims[2])
    elif len(dims) != 4:
        raise InvalidParameter(f"bilocal scenario needs 3 or 4 dims, got {len(dims)}")
    return dims, ((0,), (3,)), (1, 2), ((0, 1), (2, 3))


def _random_observable(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return sign_operator(g + g.conj().T)


class _Problem:
    """Objective, weights and effective operators for one scenario layout."""

    def __init__(self, scenario: Scenario, dims, eps: float):
        self.scenario = scenario
        self.dims, self.edge_pos, self.central_pos, self.sources = layout(scenario, dims)
        self.order = [p for src in self.sources for p in src]
        self.source_dims = [math.prod(self.dims[p] for p in src) for src in self.sources]
        self.total = math.prod(self.dims)
        if self.total > MAX_TOTAL_DIM:
            raise CapacityError(f"total dimension {self.total} exceeds {MAX_TOTAL_DIM}")
        self.signs = correlator_sign_vectors(scenario)
        self.power = scenario.n if scenario.kind == STAR else 2
        self.eps = eps
        self.edge_dims = [math.prod(self.dims[p] for p in pos) for pos in self.edge_pos]
        self.central_dim = math.prod(self.dims[p] for p in self.central_pos)

    def edge_eff(self, obs, i):
        return sum(int(self.signs[i, x]) * obs[x] for x in range(len(obs)))

    def factors(self, edge, central, i, skip=None):
        out = []
        for k, pos in enumerate(self.edge_pos):
            if k != skip:
                out.append((self.edge_eff(edge[k], i), pos))
        if skip != "central":
            out.append((central[i], self.central_pos))
        return out

    def apply_term(self, edge, central, i, vec, skip=None):
        for op, pos in self.factors(edge, central, i, skip):
            vec = linalg.apply_operator(op, pos, self.dims, vec)
        return vec

    def correlators(self, edge, central, psi):
        return np.array([np.vdot(psi, self.apply_term(edge, central, i, psi)).real
                         for i in range(self.signs.shape[0])])

    def objective(self, edge, central, psi) -> float:
        return delta_from_values(self.scenario.kind, self.scenario.n, self.correlators(edge, central, psi))

    def weights(self, j):
        mag = np.maximum(np.abs(j), self.eps)
        s = np.where(j >= 0, 1.0, -1.0)
        return s * mag ** (1.0 / self.power - 1.0) / self.power

    def joint_state(self, parts):
        """Product of the source states in canonical subsystem order."""
        return permute_vector(linalg.kron_all([p[:, None] for p in parts])[:, 0], self.order, self.dims)

    def best_source(self, edge, central, parts, w, k):
        """Top eigenvector of the weighted operator seen by source ``k``."""
        d = self.source_dims[k]
        cols = []
        for b in range(d):
            trial = list(parts)
            trial[k] = np.eye(d, dtype=complex)[b]
            cols.append(self.joint_state(trial))
        x = np.stack(cols, axis=1)
        y = sum(w[i] * self.apply_term(edge, central, i, x) for i in range(len(w)))
        op = x.conj().T @ y
        _, vecs = linalg.hermitian_eigen(0.5 * (op + op.conj().T), method="lapack")
        v = vecs[:, 0]
        return v / np.linalg.norm(v)

    def environment(self, psi, phi, positions):
        """``Tr_rest |phi><psi|`` on ``positions``, so ``<psi|A x O|psi> = tr(A E)``."""
        n = len(self.dims)
        rest = [a for a in range(n) if a not in positions]
        d = math.prod(self.dims[p] for p in positions)
        tp = phi.reshape(self.dims).transpose(list(positions) + rest).reshape(d, -1)
        ts = psi.reshape(self.dims).transpose(list(positions) + rest).reshape(d, -1)
        e = tp @ ts.conj().T
        return 0.5 * (e + e.conj().T)

    def best_edge(self, edge, central, psi, w, k):
        pos = self.edge_pos[k]
        envs = [self.environment(psi, self.apply_term(edge, central, i, psi, skip=k), pos)
                for i in range(len(w))]
        new = []
        for x in range(len(edge[k])):
            e = sum(w[i] * self.signs[i, x] * envs[i] for i in range(len(w)))
            new.append(sign_operator(e))
        return tuple(new)

    def best_central(self, edge, central, psi, w):
        new = []
        for i in range(len(w)):
            phi = self.apply_term(edge, central, i, psi, skip="central")
            new.append(sign_operator(w[i] * self.environment(psi, phi, self.central_pos)))
        return tuple(new)


def _run_restart(problem: _Problem, config: SeesawConfig, restart: int):
    rng = np.random.default_rng(config.seed + restart)
    sc = problem.scenario
    edge = [tuple(_random_observable(d, rng) for _ in range(sc.n_edge_inputs)) for d in problem.edge_dims]
    central = tuple(_random_observable(problem.central_dim, rng) for _ in range(sc.n_central_inputs))
    parts = []
    for d in problem.source_dims:
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        parts.append(v / np.linalg.norm(v))
    psi = problem.joint_state(parts)

    value = problem.objective(edge, central, psi)
    trace = [value]
    for _ in range(config.max_sweeps):
        start = value
        for k in range(len(parts)):
            w = problem.weights(problem.correlators(edge, central, psi))
            trial = list(parts)
            trial[k] = problem.best_source(edge, central, parts, w, k)
            cand = problem.joint_state(trial)
            cv = problem.objective(edge, central, cand)
            if cv >= value:
                parts, psi, value = trial, cand, cv
        for k in range(len(edge)):
            w = problem.weights(problem.correlators(edge, central, psi))
            trial = list(edge)
            trial[k] = problem.best_edge(edge, central, psi, w, k)
            cv = problem.objective(trial, central, psi)
            if cv >= value:
                edge, value = trial, cv
        w = problem.weights(problem.correlators(edge, central, psi))
        cand_c = problem.best_central(edge, central, psi, w)
        cv = problem.objective(edge, cand_c, psi)
        if cv >= value:
            central, value = cand_c, cv
        trace.append(value)
        if value - start < config.tol:
            break
    return value, tuple(edge), central, psi, trace


def seesaw_optimize(scenario: Scenario, config: SeesawConfig) -> SeesawResult:
    """Best of ``config.restarts`` independent see-saw runs.

    Restart ``r`` is seeded with ``config.seed + r``, so runs are
    independent of execution order.
    """
    problem = _Problem(scenario, config.dims, config.eps)
    best = None
    result = SeesawResult(value=-math.inf, realization=None)
    for r in range(config.restarts):
        value, edge, central, psi, trace = _run_restart(problem, config, r)
        result.traces.append(trace)
        result.restart_values.append(value)
        if best is None or value > best[0]:
            best = (value, edge, central, psi)
            result.best_restart = r
    value, edge, central, psi = best
    result.value = value
    result.realization = Realization(
        scenario=scenario,
        dims=problem.dims,
        edge=edge,
        central=central,
        state=psi,
        edge_positions=problem.edge_pos,
        central_positions=problem.central_pos,
        sources=problem.sources,
    )
    return result
