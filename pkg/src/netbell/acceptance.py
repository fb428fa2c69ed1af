"""Built-in acceptance checks shared by the test suite and ``netbell selftest``.

Every ``criterion_*`` function returns a :class:`CriterionResult`; the list
:data:`CRITERIA` fixes their order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from netbell import linalg
from netbell.classical import brute_force_delta, eta_brute_force, eta_closed_form
from netbell.encoding import constraint_strings
from netbell.realization import (
    apply_visibility,
    correlator_table,
    omega_norms,
    optimal_realization,
)
from netbell.sampling import (
    delta_with_error,
    input_tuples,
    party_layout,
    raw_correlators,
    sample_counts,
    estimate_from_counts,
)
from netbell.scenarios import build_scenario, delta_from_correlators
from netbell.seesaw import SeesawConfig, seesaw_optimize
from netbell.verifier import (
    certify,
    verify_central_commutation,
    verify_edge_anticommutators,
    verify_linear_constraints,
)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    checks: list[tuple[str, bool]] = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [name for name, ok in self.checks if not ok]
        tail = f" (failed: {'; '.join(failed)})" if failed else ""
        return f"[{status}] criterion {self.number}: {self.title} [{self.seconds:.2f}s]{tail}"


class _Collector:
    def __init__(self, number, title):
        self.result = CriterionResult(number, title, True)
        self._t0 = time.perf_counter()

    def check(self, name: str, ok) -> bool:
        ok = bool(ok)
        self.result.checks.append((name, ok))
        self.result.passed &= ok
        return ok

    def done(self, limit: float | None = None) -> CriterionResult:
        self.result.seconds = time.perf_counter() - self._t0
        if limit is not None:
            self.check(f"runtime {self.result.seconds:.2f}s < {limit}s", self.result.seconds < limit)
        return self.result


def criterion_1() -> CriterionResult:
    c = _Collector(1, "star network n in {2,3,4}")
    target = 2 * math.sqrt(2)
    for n in (2, 3, 4):
        sc = build_scenario("star", n=n)
        r = optimal_realization(sc)
        delta = delta_from_correlators(sc, correlator_table(r))
        c.check(f"n={n} delta={delta:.12f} vs 2sqrt2", abs(delta - target) <= 1e-9)
        c.check(f"n={n} brute force = 2", brute_force_delta(sc) == 2.0)
        comm = linalg.commutator_norm(*r.central)
        if n % 2 == 0:
            c.check(f"n={n} [B1,B2] = {comm:.3g} <= 1e-12", comm <= 1e-12)
        else:
            c.check(f"n={n} [B1,B2] = {comm:.15g} = 2", abs(comm - 2.0) <= 1e-12)
    return c.done(limit=5.0)


def criterion_2() -> CriterionResult:
    c = _Collector(2, "bilocal m=3")
    sc = build_scenario("bilocal", m=3)
    r = optimal_realization(sc)
    delta = delta_from_correlators(sc, correlator_table(r))
    c.check(f"delta={delta:.12f} vs 4sqrt3", abs(delta - 4 * math.sqrt(3)) <= 1e-9)
    c.check("brute force = 6", brute_force_delta(sc) == 6.0)
    for e in verify_edge_anticommutators(r, tol=1e-12):
        c.check(f"{e.name} = {e.measured:+.12f}",
                abs(abs(e.measured) - 2 / 3) <= 1e-12 and abs(e.measured - e.expected) <= 1e-12)
    for e in verify_linear_constraints(r, tol=1e-10):
        if e.name.startswith("delta_m"):
            c.check(f"{e.name} = {e.measured:.12f} vs 4", abs(e.measured - 4.0) <= 1e-10)
    om = omega_norms(r)
    c.check("every omega = 4/sqrt3", np.all(np.abs(om - 4 / math.sqrt(3)) <= 1e-10))
    for e in verify_central_commutation(r, tol=1e-12):
        c.check(f"{e.name} <= 1e-12", e.measured <= 1e-12)
    return c.done()


def criterion_3() -> CriterionResult:
    c = _Collector(3, "general m in {2,3,4,5}")
    t5 = None
    for m in (2, 3, 4, 5):
        t0 = time.perf_counter()
        sc = build_scenario("bilocal", m=m)
        r = optimal_realization(sc)
        delta = delta_from_correlators(sc, correlator_table(r))
        c.check(f"m={m} delta vs 2^(m-1)sqrt(m)", abs(delta - 2 ** (m - 1) * math.sqrt(m)) <= 1e-9)
        eta, _ = eta_brute_force(sc.scheme)
        c.check(f"m={m} eta brute force {eta} = {eta_closed_form(m)}", eta == m * math.comb(m - 1, (m - 1) // 2))
        entries = verify_linear_constraints(r, tol=1e-10)
        residuals = [e for e in entries if e.name.startswith("constraint")]
        deltas = [e for e in entries if e.name.startswith("delta_m")]
        n_cons = len(constraint_strings(m).elements)
        c.check(f"m={m} {n_cons} constraints per party",
                n_cons == 2 ** (m - 1) - m and len(residuals) == 2 * n_cons)
        c.check(f"m={m} constraint residuals <= 1e-10", all(e.measured <= 1e-10 for e in residuals))
        want = (2 ** (m - 1) - m) * 2 ** (m - 1)
        c.check(f"m={m} delta_m = {want}", all(abs(e.measured - want) <= 1e-9 for e in deltas))
        comms = verify_central_commutation(r, tol=1e-12)
        c.check(f"m={m} {len(comms)} central commutators <= 1e-12",
                len(comms) == math.comb(m, 2) and all(e.measured <= 1e-12 for e in comms))
        if m == 5:
            t5 = time.perf_counter() - t0
    c.check(f"m=5 runtime {t5:.2f}s < 120s", t5 < 120.0)
    return c.done()


RATIO_EXAMPLES = {2: 1.4142, 3: 1.1547, 4: 1.3333}


def criterion_4() -> CriterionResult:
    c = _Collector(4, "quantum over classical ratio, m in {2..6}")
    for m in range(2, 7):
        sc = build_scenario("bilocal", m=m)
        ratio = sc.quantum_optimum / sc.classical_bound
        by_hand = (2 ** (m - 1) * math.sqrt(m)) / (m * math.comb(m - 1, (m - 1) // 2))
        c.check(f"m={m} ratio {ratio:.6f} > 1", ratio > 1.0)
        c.check(f"m={m} ratio matches closed form", abs(ratio - by_hand) <= 1e-12)
        if m in RATIO_EXAMPLES:
            c.check(f"m={m} ratio ~ {RATIO_EXAMPLES[m]}", abs(ratio - RATIO_EXAMPLES[m]) < 5e-5)
    return c.done()


def criterion_5() -> CriterionResult:
    c = _Collector(5, "see-saw reaches the optima")
    cases = [
        (build_scenario("star", n=2), (2, 2, 2, 2), 2 * math.sqrt(2)),
        (build_scenario("bilocal", m=3), (2, 4, 2), 4 * math.sqrt(3)),
    ]
    for sc, dims, target in cases:
        res = seesaw_optimize(sc, SeesawConfig(dims=dims, restarts=20, seed=7))
        label = f"{sc.kind} dims={dims}"
        c.check(f"{label} best {res.value:.10f} within 1e-4 of {target:.10f}", abs(res.value - target) <= 1e-4)
        c.check(f"{label} never above optimum", res.value <= target + 1e-7)
        mono = all(b >= a - 1e-10 for tr in res.traces for a, b in zip(tr, tr[1:]))
        c.check(f"{label} traces nondecreasing", mono)
    return c.done(limit=60.0)


def _exact_raw(r):
    obs, pos = party_layout(r)
    out = []
    for inp in input_tuples(r):
        factors = [(obs[p][x], pos[p]) for p, x in enumerate(inp)]
        out.append(linalg.local_expectation(r.state, factors, r.dims).real)
    return np.array(out)


def criterion_6() -> CriterionResult:
    c = _Collector(6, "finite-shot sampling at 1e5 shots")
    shots = 100_000
    for m in (2, 3):
        sc = build_scenario("bilocal", m=m)
        r = optimal_realization(sc)
        exact = _exact_raw(r)
        worst = 0.0
        gaps = []
        for seed in range(20):
            counts = sample_counts(r, shots, seed)
            est, se = raw_correlators(counts)
            z = np.abs(est - exact) / np.where(se > 0, se, np.inf)
            zero_se_ok = np.all(np.abs(est - exact)[se == 0] <= 1e-12)
            worst = max(worst, float(np.max(z)))
            c.check(f"m={m} seed={seed} zero-error correlators exact", zero_se_ok)
            delta, dse = delta_with_error(r, estimate_from_counts(r, counts))
            gaps.append((delta - sc.classical_bound) / dse)
        c.check(f"m={m} every raw correlator within 5 SE (worst {worst:.2f})", worst <= 5.0)
        c.check(f"m={m} violation >= 5 SE in every seed (min {min(gaps):.1f})", min(gaps) >= 5.0)
    return c.done()


def criterion_7(samples: int = 10_000, seed: int = 2024) -> CriterionResult:
    """The three auxiliary inequalities on random nonnegative tuples."""
    c = _Collector(7, "auxiliary inequalities on random tuples")
    rng = np.random.default_rng(seed)
    tol = 1e-12

    # sum_i (prod_k z_k^i)^(1/n) <= prod_k (sum_i z_k^i)^(1/n)
    worst = -np.inf
    for _ in range(samples):
        m = int(rng.integers(1, 7))
        n = int(rng.integers(1, 6))
        z = rng.exponential(size=(n, m)) * rng.uniform(0, 10)
        lhs = np.sum(np.prod(z, axis=0) ** (1.0 / n))
        rhs = np.prod(np.sum(z, axis=1) ** (1.0 / n))
        worst = max(worst, lhs - rhs)
    c.check(f"product-power inequality (worst excess {worst:.2e})", worst <= tol)

    # sum_i sqrt(z1_i z2_i) <= sqrt(sum z1 * sum z2)
    worst = -np.inf
    for _ in range(samples):
        m = int(rng.integers(1, 9))
        z1, z2 = rng.exponential(size=m), rng.exponential(size=m)
        lhs = np.sum(np.sqrt(z1 * z2))
        rhs = math.sqrt(z1.sum() * z2.sum())
        worst = max(worst, lhs - rhs)
    c.check(f"Cauchy-Schwarz inequality (worst excess {worst:.2e})", worst <= tol)

    # sum_i w_i <= sqrt(m sum_i w_i^2)
    worst = -np.inf
    for _ in range(samples):
        m = int(rng.integers(1, 9))
        w = rng.exponential(size=m)
        lhs = w.sum()
        rhs = math.sqrt(m * np.sum(w ** 2))
        worst = max(worst, lhs - rhs)
    c.check(f"power-mean inequality (worst excess {worst:.2e})", worst <= tol)
    return c.done()


def criterion_8() -> CriterionResult:
    c = _Collector(8, "visibility scaling")
    grid = [k / 10 for k in range(11)]
    for m in (2, 3):
        sc = build_scenario("bilocal", m=m)
        r = optimal_realization(sc)
        opt = sc.quantum_optimum
        ratio = sc.classical_bound / opt
        for v in grid:
            noisy = apply_visibility(r, v, v)
            delta = delta_from_correlators(sc, correlator_table(noisy))
            c.check(f"m={m} v={v:.1f} delta = v * opt", abs(delta - v * opt) <= 1e-9)
            rep = certify(noisy)
            viol = rep.entry("delta exceeds classical bound")
            c.check(f"m={m} v={v:.1f} violation entry fails iff v < {ratio:.4f}", viol.passed == (v > ratio))
            target = rep.entry("delta")
            c.check(f"m={m} v={v:.1f} delta entry fails iff v*opt < opt - tol",
                    target.passed == (v * opt >= opt - target.tolerance))
    return c.done()


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


def run_all(echo=print) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        res = fn()
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results
