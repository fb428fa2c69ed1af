"""Dense complex linear algebra on numpy arrays.

Operators are plain ``complex128`` arrays.  Multipartite objects use the
canonical subsystem order given by a ``dims`` list; position ``0`` is the
most significant tensor factor.
"""

from __future__ import annotations

import math
from functools import reduce
from typing import Sequence

import numpy as np

from netbell.errors import DimensionMismatch, InvalidOperand, InvalidParameter

MATRIX_ATOL = 1e-12
VALUE_RTOL = 1e-9

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidOperand("matrix has non-finite entries")
    return m


def tensor_product(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(ops: Sequence) -> np.ndarray:
    if not ops:
        return np.eye(1, dtype=complex)
    return reduce(np.kron, [as_matrix(o) for o in ops])


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def is_hermitian(h, atol: float = MATRIX_ATOL) -> bool:
    h = np.asarray(h)
    return h.ndim == 2 and h.shape[0] == h.shape[1] and max_abs(h - h.conj().T) <= atol


def is_involutory(o, atol: float = MATRIX_ATOL) -> bool:
    o = np.asarray(o)
    return max_abs(o @ o - np.eye(o.shape[0])) <= atol


def check_observable(o, atol: float = MATRIX_ATOL) -> np.ndarray:
    """Return ``o`` as a matrix after checking it is a dichotomic observable."""
    o = as_matrix(o)
    if o.shape[0] != o.shape[1]:
        raise DimensionMismatch(f"observable must be square, got {o.shape}")
    if not is_hermitian(o, atol):
        raise InvalidOperand("observable is not Hermitian")
    if not is_involutory(o, atol):
        raise InvalidOperand("observable does not square to identity")
    return o


def _jacobi_eigh(h: np.ndarray, tol: float, max_sweeps: int):
    a = h.astype(complex, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, max_abs(a))
    thresh = tol * scale
    pairs = [(p, q) for p in range(n) for q in range(p + 1, n)]
    for _ in range(max_sweeps):
        off = max((abs(a[p, q]) for p, q in pairs), default=0.0)
        if off < thresh:
            break
        for p, q in pairs:
            apq = a[p, q]
            mag = abs(apq)
            if mag < thresh * 1e-3:
                continue
            phase = apq / mag
            tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
            if tau == 0.0:
                t = 1.0
            else:
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            # U = diag(1, conj(phase)) @ [[c, s], [-s, c]] restricted to (p, q)
            u = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
            idx = [p, q]
            a[:, idx] = a[:, idx] @ u
            a[idx, :] = u.conj().T @ a[idx, :]
            v[:, idx] = v[:, idx] @ u
            a[p, q] = a[q, p] = 0.0
            a[p, p] = a[p, p].real
            a[q, q] = a[q, q].real
    w = a.diagonal().real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigen(h, method: str = "jacobi", tol: float = 1e-14, max_sweeps: int = 100):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    ``method="jacobi"`` runs cyclic complex Jacobi rotations in row-major
    upper-triangle order until the largest off-diagonal entry drops below
    ``tol`` (relative to the matrix scale when that exceeds 1).
    ``method="lapack"`` defers to ``numpy.linalg.eigh``; the optimizer uses
    it on its larger state matrices.

    Returns ``(w, v)`` with ``h = v @ diag(w) @ v.conj().T``.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got {h.shape}")
    if not is_hermitian(h, 1e-10 * max(1.0, max_abs(h))):
        raise InvalidOperand("matrix is not Hermitian")
    h = 0.5 * (h + h.conj().T)
    if method == "jacobi":
        return _jacobi_eigh(h, tol, max_sweeps)
    if method == "lapack":
        w, v = np.linalg.eigh(h)
        return w[::-1].copy(), v[:, ::-1].copy()
    raise InvalidParameter(f"unknown eigensolver {method!r}")


def _check_positions(positions: Sequence[int], dims: Sequence[int]) -> None:
    if len(set(positions)) != len(positions):
        raise DimensionMismatch(f"repeated positions {list(positions)}")
    for p in positions:
        if not 0 <= p < len(dims):
            raise DimensionMismatch(f"position {p} outside {len(dims)} subsystems")


def embed_operator(op, positions: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Full-space matrix acting as ``op`` on ``positions`` and identity elsewhere.

    The tensor factors of ``op`` are matched to ``positions`` in the order
    given, so ``positions=[2, 0]`` means the first factor of ``op`` acts on
    subsystem 2.
    """
    op = as_matrix(op)
    positions = list(positions)
    dims = list(dims)
    _check_positions(positions, dims)
    dsub = math.prod(dims[p] for p in positions)
    if op.shape != (dsub, dsub):
        raise DimensionMismatch(
            f"operator shape {op.shape} does not match subsystems of size {dsub}"
        )
    rest = [k for k in range(len(dims)) if k not in positions]
    full = np.kron(op, np.eye(math.prod(dims[k] for k in rest), dtype=complex))
    order = positions + rest
    n = len(dims)
    t = full.reshape([dims[k] for k in order] * 2)
    inv = [order.index(k) for k in range(n)]
    t = t.transpose(inv + [n + i for i in inv])
    total = math.prod(dims)
    return t.reshape(total, total)


def apply_operator(op, positions: Sequence[int], dims: Sequence[int], target) -> np.ndarray:
    """Apply ``op`` on ``positions`` to the leading (row) index of ``target``.

    ``target`` is a state vector or a matrix whose row index spans ``dims``;
    no full-space operator is formed.
    """
    op = as_matrix(op)
    positions = list(positions)
    dims = list(dims)
    _check_positions(positions, dims)
    target = np.asarray(target, dtype=complex)
    total = math.prod(dims)
    if target.shape[0] != total:
        raise DimensionMismatch(f"target has {target.shape[0]} rows, expected {total}")
    k = len(positions)
    sub = [dims[p] for p in positions]
    if op.shape != (math.prod(sub), math.prod(sub)):
        raise DimensionMismatch("operator does not match the listed subsystems")
    trailing = target.shape[1:]
    t = target.reshape(dims + list(trailing))
    o = op.reshape(sub + sub)
    out = np.tensordot(o, t, axes=(list(range(k, 2 * k)), positions))
    # tensordot puts the op's output axes first; restore canonical order
    remaining = [a for a in range(len(dims)) if a not in positions]
    current = positions + remaining
    perm = [current.index(a) for a in range(len(dims))]
    perm += list(range(len(dims), len(dims) + len(trailing)))
    return out.transpose(perm).reshape(target.shape)


def permute_subsystems(op, order: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of a square operator.

    ``op`` is written with its factors in the order ``order`` (indices into
    ``dims``); the result has them in canonical order.
    """
    op = as_matrix(op)
    order = list(order)
    n = len(dims)
    t = op.reshape([dims[k] for k in order] * 2)
    inv = [order.index(k) for k in range(n)]
    total = math.prod(dims)
    return t.transpose(inv + [n + i for i in inv]).reshape(total, total)


def max_entangled_state(d: int) -> np.ndarray:
    """``sum_k |kk> / sqrt(d)``."""
    if d < 2:
        raise InvalidParameter(f"dimension must be >= 2, got {d}")
    psi = np.zeros(d * d, dtype=complex)
    psi[:: d + 1] = 1.0
    return psi / math.sqrt(d)


def expectation(state, o) -> complex:
    """``<psi|O|psi>`` for a vector, ``trace(rho O)`` for a matrix."""
    o = as_matrix(o)
    state = np.asarray(state, dtype=complex)
    if state.shape[0] != o.shape[0]:
        raise DimensionMismatch(f"state dim {state.shape[0]} vs operator {o.shape}")
    if state.ndim == 1:
        return complex(np.vdot(state, o @ state))
    if state.ndim == 2 and state.shape[0] == state.shape[1]:
        return complex(np.einsum("ij,ji->", state, o))
    raise DimensionMismatch(f"unsupported state shape {state.shape}")


def local_expectation(state, factors, dims: Sequence[int]) -> complex:
    """Expectation of a tensor product of local operators.

    ``factors`` is a list of ``(op, positions)`` pairs acting on disjoint
    subsystems.  Works subsystem by subsystem, so the full operator is never
    built.
    """
    state = np.asarray(state, dtype=complex)
    out = state
    for op, positions in factors:
        out = apply_operator(op, positions, dims, out)
    if state.ndim == 1:
        return complex(np.vdot(state, out))
    return complex(np.trace(out))


def density(state) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def partial_trace(rho, keep: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Reduced operator on ``keep`` (in the order listed)."""
    rho = density(rho)
    dims = list(dims)
    keep = list(keep)
    _check_positions(keep, dims)
    total = math.prod(dims)
    if rho.shape != (total, total):
        raise DimensionMismatch(f"operator shape {rho.shape} does not match dims {dims}")
    n = len(dims)
    t = rho.reshape(dims * 2)
    row = list(range(n))
    col = list(range(n, 2 * n))
    for k in range(n):
        if k not in keep:
            col[k] = row[k]
    out = [row[k] for k in keep] + [col[k] for k in keep]
    dk = math.prod(dims[k] for k in keep)
    return np.einsum(t, row + col, out).reshape(dk, dk)


def anticommutator(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape}")
    return a @ b + b @ a


def commutator(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape}")
    return a @ b - b @ a


def commutator_norm(a, b) -> float:
    return max_abs(commutator(a, b))
