import math
from dataclasses import replace

import numpy as np
import pytest

from netbell.errors import DegenerateRealization, NotApplicable
from netbell.realization import apply_visibility, optimal_realization
from netbell.scenarios import build_scenario, delta_from_values
from netbell.seesaw import sign_operator
from netbell.verifier import (
    certify,
    check,
    purify,
    verify_central_commutation,
    verify_edge_anticommutators,
    verify_eigenvector_conditions,
    verify_linear_constraints,
)


def bilocal(m, policy="lex-first-zero"):
    return optimal_realization(build_scenario("bilocal", m=m, policy=policy))


def star(n):
    return optimal_realization(build_scenario("star", n=n))


def by_name(entries):
    return {e.name: e for e in entries}


class TestCentralCommutation:
    def test_bilocal_m3(self):
        entries = verify_central_commutation(bilocal(3))
        assert len(entries) == 3
        assert all(e.passed and e.measured <= 1e-12 for e in entries)

    def test_star_n3_fails(self):
        (e,) = verify_central_commutation(star(3))
        assert not e.passed
        assert abs(e.measured - 2) <= 1e-12

    def test_star_n2_passes(self):
        (e,) = verify_central_commutation(star(2))
        assert e.passed and e.measured == 0


class TestEdgeAnticommutators:
    def test_m3_minority_values(self):
        entries = by_name(verify_edge_anticommutators(bilocal(3, "minority-weight")))
        e = entries["anticommutator A1,A2"]
        assert abs(e.measured - 2 / 3) <= 1e-12 and e.passed and e.operator_level
        e = entries["anticommutator C3,C4"]
        assert abs(e.expected + 2 / 3) <= 1e-15 and e.passed

    def test_pair_count(self):
        # C(4, 2) pairs per edge party
        assert len(verify_edge_anticommutators(bilocal(3))) == 12

    def test_perturbed_fails(self):
        r = bilocal(3)
        rng = np.random.default_rng(0)
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        bad = sign_operator(g + g.conj().T)
        edge = ((bad,) + r.edge[0][1:], r.edge[1])
        entries = verify_edge_anticommutators(replace(r, edge=edge))
        assert any(not e.passed for e in entries)


class TestLinearConstraints:
    def test_m3(self):
        entries = by_name(verify_linear_constraints(bilocal(3)))
        assert entries["constraint A s=111"].measured <= 1e-12
        assert abs(entries["delta_m A"].measured - 4) <= 1e-10

    def test_m2_vacuous(self):
        entries = verify_linear_constraints(bilocal(2))
        assert [e.name for e in entries] == ["delta_m A", "delta_m C"]
        assert all(e.passed and e.measured == 0 for e in entries)

    def test_m4(self):
        entries = verify_linear_constraints(bilocal(4))
        residuals = [e for e in entries if e.name.startswith("constraint A")]
        assert len(residuals) == 4
        assert all(e.measured <= 1e-10 for e in residuals)
        assert abs(by_name(entries)["delta_m A"].measured - 32) <= 1e-9

    def test_star_not_applicable(self):
        with pytest.raises(NotApplicable):
            verify_linear_constraints(star(2))


class TestEigenvectorConditions:
    @pytest.mark.parametrize("r", [bilocal(3), star(2)], ids=["bilocal3", "star2"])
    def test_optimal(self, r):
        entries = verify_eigenvector_conditions(r)
        assert all(e.passed and e.measured <= 1e-10 for e in entries)
        assert all("lambda=+1" in e.name for e in entries)

    def test_noisy_fails(self):
        entries = verify_eigenvector_conditions(apply_visibility(bilocal(3), 0.9))
        assert all(not e.passed and e.measured > 0 for e in entries)

    def test_degenerate(self):
        r = bilocal(2)
        same = (r.edge[0][0], r.edge[0][0])
        with pytest.raises(DegenerateRealization):
            verify_eigenvector_conditions(replace(r, edge=(same, same)))


class TestCertify:
    def test_bilocal_m3(self):
        rep = certify(bilocal(3))
        assert rep.overall
        assert abs(rep.delta_value - 4 * math.sqrt(3)) <= 1e-9

    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_soundness_bilocal(self, m):
        assert certify(bilocal(m)).overall

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_soundness_star_even(self, n):
        rep = certify(star(n))
        assert rep.overall
        assert rep.entry("commutator B1,B2").passed

    def test_star_odd_fails_only_on_commutator(self):
        rep = certify(star(3))
        assert [e.name for e in rep.failures()] == ["commutator B1,B2"]

    def test_commuting_realization(self):
        # every observable diagonal: the statistics are those of a deterministic mixture
        sc = build_scenario("bilocal", m=3)
        diag = [np.diag(s) for s in ([1, 1], [1, -1], [-1, 1], [-1, -1])]
        rng = np.random.default_rng(3)

        def pick(k):
            return tuple(diag[j] for j in rng.integers(0, 4, k))

        best = 0.0
        for _ in range(30):
            edge = (pick(4), pick(4))
            central = pick(3)
            psi = rng.normal(size=8) + 1j * rng.normal(size=8)
            r = replace(optimal_realization(sc), dims=(2, 2, 2), edge=edge, central=central,
                        state=psi / np.linalg.norm(psi), edge_positions=((0,), (2,)),
                        central_positions=(1,), sources=None)
            try:
                rep = certify(r)
            except DegenerateRealization:
                continue
            best = max(best, rep.delta_value)
            assert rep.delta_value <= 6 + 1e-9
            assert not rep.entry("delta").passed
            assert not rep.entry("delta exceeds classical bound").passed
        assert best > 0

    def test_entry_order(self):
        names = [e.name for e in certify(bilocal(3)).entries]
        kinds = [n.split()[0] for n in names]
        order = ["delta", "omega", "commutator", "anticommutator", "constraint", "eigenvector"]
        firsts = [kinds.index(k) for k in order]
        assert firsts == sorted(firsts)
        assert names[:2] == ["delta", "delta exceeds classical bound"]

    def test_deterministic(self):
        a = certify(bilocal(3)).as_dict()
        b = certify(bilocal(3)).as_dict()
        assert a == b

    @pytest.mark.parametrize("r", [bilocal(4), star(3)], ids=["bilocal4", "star3"])
    def test_self_consistent(self, r):
        rep = certify(r)
        again = delta_from_values(r.scenario.kind, r.scenario.n, rep.correlators)
        assert abs(again - rep.delta_value) <= 1e-12

    def test_visibility_sensitivity(self):
        r = bilocal(3)
        opt = r.scenario.quantum_optimum
        ratio = r.scenario.classical_bound / opt
        for v in np.linspace(0, 1, 11):
            rep = certify(apply_visibility(r, v))
            assert rep.entry("delta").passed == (v * opt >= opt - 1e-9)
            assert rep.entry("delta exceeds classical bound").passed == (v > ratio)

    def test_mixed_state_purified(self):
        p = purify(apply_visibility(bilocal(2), 0.7))
        assert p.is_pure
        assert p.dims[-1] > 1
        assert abs(np.linalg.norm(p.state) - 1) <= 1e-12


class TestCheck:
    def test_relations(self):
        assert check("x", 1.0, 1.0 + 1e-10, 1e-9).passed
        assert not check("x", 1.0, 1.1, 1e-9).passed
        assert check("x", 1.0, 2.0, 1e-9, relation="le").passed
        assert not check("x", 2.0, 2.0, 1e-9, relation="gt").passed

    def test_unknown_relation(self):
        with pytest.raises(ValueError):
            check("x", 1, 1, 0, relation="ne")

    def test_operator_level_reported(self):
        assert "operator_level" in check("x", 0, 0, 0, operator_level=True).as_dict()
        assert "operator_level" not in check("x", 0, 0, 0).as_dict()
