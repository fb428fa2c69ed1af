import itertools
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netbell import linalg
from netbell.encoding import (
    constraint_strings,
    generate_transversal,
    parity_signs,
    predicted_anticommutator,
    sign_matrix,
)
from netbell.errors import CapacityError, DimensionMismatch, InvalidParameter
from netbell.linalg import SX, SY, SZ
from netbell.realization import (
    apply_visibility,
    correlator_table,
    edge_effective,
    gamma_generators,
    omega_norms,
    optimal_realization,
)
from netbell.scenarios import build_scenario, delta_from_correlators
from netbell.seesaw import sign_operator


def bilocal(m, policy="lex-first-zero"):
    return optimal_realization(build_scenario("bilocal", m=m, policy=policy))


def star(n):
    return optimal_realization(build_scenario("star", n=n))


class TestGammaGenerators:
    def test_m2_jordan_wigner(self):
        g = gamma_generators(2)
        np.testing.assert_array_equal(g[0], SX)
        np.testing.assert_array_equal(g[1], SY)

    def test_m3_pauli_triple(self):
        g = gamma_generators(3)
        assert [x.shape for x in g] == [(2, 2)] * 3
        np.testing.assert_array_equal(g[2], SZ)

    @pytest.mark.parametrize("m", range(2, 9))
    def test_clifford_relations(self, m):
        g = gamma_generators(m)
        assert len(g) == m
        assert g[0].shape == (2 ** (m // 2),) * 2
        for a in g:
            linalg.check_observable(a)
        for a, b in itertools.combinations(g, 2):
            assert linalg.max_abs(linalg.anticommutator(a, b)) <= 1e-12

    def test_rejects_m1(self):
        with pytest.raises(InvalidParameter):
            gamma_generators(1)


class TestOptimalBilocal:
    def test_minority_linear_identity(self):
        a = bilocal(3, "minority-weight").edge[0]
        assert linalg.max_abs(a[0] - a[1] - a[2] - a[3]) <= 1e-12

    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    @pytest.mark.parametrize("policy", ["lex-first-zero", "minority-weight"])
    def test_operator_anticommutators(self, m, policy):
        r = bilocal(m, policy)
        obs = r.edge[0]
        eye = np.eye(obs[0].shape[0])
        for j, jp in itertools.combinations(range(len(obs)), 2):
            expected = float(predicted_anticommutator(r.scenario.scheme, j, jp))
            assert linalg.max_abs(linalg.anticommutator(obs[j], obs[jp]) - expected * eye) <= 1e-12

    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_effective_is_generator(self, m):
        r = bilocal(m)
        g = gamma_generators(m)
        scale = math.sqrt(m) / 2 ** (m - 1)
        for i in range(m):
            assert linalg.max_abs(scale * edge_effective(r, 0, i) - g[i]) <= 1e-12

    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_delta_and_correlators(self, m):
        r = bilocal(m)
        table = correlator_table(r)
        np.testing.assert_allclose(table.values, 4 ** (m - 1) / m, rtol=1e-12)
        assert abs(delta_from_correlators(r.scenario, table) - 2 ** (m - 1) * math.sqrt(m)) <= 1e-9

    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_central_commute(self, m):
        b = bilocal(m).central
        for x, y in itertools.combinations(b, 2):
            assert linalg.commutator_norm(x, y) <= 1e-12

    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_omega(self, m):
        np.testing.assert_allclose(omega_norms(bilocal(m)), 2 ** (m - 1) / math.sqrt(m), rtol=1e-12)

    def test_omega_m3(self):
        np.testing.assert_allclose(omega_norms(bilocal(3)), 4 / math.sqrt(3), atol=1e-12)

    def test_fully_mixed(self):
        r = bilocal(3)
        mixed = replace(r, state=np.eye(r.total_dim) / r.total_dim)
        np.testing.assert_allclose(correlator_table(mixed).values, 0, atol=1e-12)

    def test_validate(self):
        r = bilocal(3)
        assert r.validate() is r
        with pytest.raises(DimensionMismatch):
            replace(r, state=r.state[:-1]).validate()

    def test_capacity(self):
        with pytest.raises(CapacityError):
            bilocal(8)


class TestOptimalStar:
    def test_n2_observables(self):
        a1, a2 = star(2).edge[0]
        np.testing.assert_allclose(a1, (SZ + SX) / math.sqrt(2), atol=1e-15)
        np.testing.assert_allclose(a2, (SZ - SX) / math.sqrt(2), atol=1e-15)

    def test_n2_correlators(self):
        np.testing.assert_allclose(correlator_table(star(2)).values, [2, 2], atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_delta_and_omega(self, n):
        r = star(n)
        assert abs(delta_from_correlators(r.scenario, correlator_table(r)) - 2 * math.sqrt(2)) <= 1e-9
        np.testing.assert_allclose(omega_norms(r), math.sqrt(2), atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_central_commutator_parity(self, n):
        b1, b2 = star(n).central
        expected = 0.0 if n % 2 == 0 else 2.0
        assert abs(linalg.commutator_norm(b1, b2) - expected) <= 1e-12

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_effective_product_sign_rule(self, n):
        r = star(n)
        e1 = linalg.kron_all([edge_effective(r, k, 0) for k in range(n)])
        e2 = linalg.kron_all([edge_effective(r, k, 1) for k in range(n)])
        assert linalg.max_abs(e1 @ e2 - (-1) ** n * e2 @ e1) <= 1e-10


class TestVisibility:
    def test_full_visibility(self):
        r = bilocal(3)
        np.testing.assert_allclose(correlator_table(apply_visibility(r, 1.0, 1.0)).values,
                                   correlator_table(r).values, atol=1e-12)

    @pytest.mark.parametrize("other", [0.0, 0.4, 1.0])
    def test_one_dead_source(self, other):
        noisy = apply_visibility(bilocal(3), 0.0, other)
        np.testing.assert_allclose(correlator_table(noisy).values, 0, atol=1e-12)

    @pytest.mark.parametrize("m", [2, 3])
    def test_linear_scaling(self, m):
        r = bilocal(m)
        opt = r.scenario.quantum_optimum
        for v in np.linspace(0, 1, 11):
            got = delta_from_correlators(r.scenario, correlator_table(apply_visibility(r, v)))
            assert abs(got - v * opt) <= 1e-9

    def test_star_sources(self):
        r = star(3)
        table = correlator_table(apply_visibility(r, 0.5, 1.0, 1.0))
        np.testing.assert_allclose(table.values, [math.sqrt(2)] * 2, atol=1e-12)

    def test_errors(self):
        r = bilocal(2)
        with pytest.raises(InvalidParameter):
            apply_visibility(r, 1.2)
        with pytest.raises(InvalidParameter):
            apply_visibility(r, 0.5, 0.5, 0.5)
        with pytest.raises(InvalidParameter):
            omega_norms(apply_visibility(r, 0.5))


@settings(max_examples=40, deadline=None)
@given(m=st.integers(2, 4), d=st.integers(1, 3), env=st.integers(1, 3), seed=st.integers(0, 2 ** 32 - 1))
def test_norm_budget_identity(m, d, env, seed):
    """Term norms and constraint norms always add up to 4**(m-1)."""
    rng = np.random.default_rng(seed)
    scheme = generate_transversal(m)
    obs = []
    for _ in range(scheme.n_inputs):
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        obs.append(sign_operator(g + g.conj().T))
    psi = rng.normal(size=d * env) + 1j * rng.normal(size=d * env)
    psi /= np.linalg.norm(psi)
    dims = [d, env]

    def norm_sq(signs):
        op = sum(int(s) * o for s, o in zip(signs, obs))
        return float(np.linalg.norm(linalg.apply_operator(op, [0], dims, psi)) ** 2)

    total = sum(norm_sq(row) for row in sign_matrix(scheme))
    total += sum(norm_sq(parity_signs(scheme, s)) for s in constraint_strings(m).elements)
    assert abs(total - 4 ** (m - 1)) <= 1e-9
