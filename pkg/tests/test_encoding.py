import itertools
from fractions import Fraction

import numpy as np
import pytest

from netbell.encoding import (
    EncodingScheme,
    Policy,
    complement,
    constraint_strings,
    generate_transversal,
    pair_statistics,
    parity_signs,
    predicted_anticommutator,
    sign_matrix,
)
from netbell.errors import CapacityError, InvalidParameter

POLICIES = [Policy.LEX_FIRST_ZERO, Policy.MINORITY_WEIGHT]


def minority3():
    return generate_transversal(3, "minority-weight")


class TestGenerateTransversal:
    def test_m2_lex(self):
        assert generate_transversal(2).as_strings() == ["00", "01"]

    def test_m3_minority(self):
        assert minority3().as_strings() == ["000", "001", "010", "100"]

    def test_m3_lex(self):
        assert generate_transversal(3).as_strings() == ["000", "001", "010", "011"]

    def test_m4_pairwise_non_complementary(self):
        s = generate_transversal(4)
        assert s.n_inputs == 8
        for a, b in itertools.combinations(s.strings, 2):
            assert complement(a) != b

    @pytest.mark.parametrize("m", [0, 1, -3])
    def test_rejects_small_m(self, m):
        with pytest.raises(InvalidParameter):
            generate_transversal(m)

    def test_rejects_unknown_policy(self):
        with pytest.raises(InvalidParameter):
            generate_transversal(3, "random")

    def test_capacity(self):
        with pytest.raises(CapacityError):
            generate_transversal(40)

    def test_from_strings_round_trip(self):
        s = minority3()
        again = EncodingScheme.from_strings(s.as_strings(), policy=s.policy)
        assert again == s

    @pytest.mark.parametrize("strings", [
        ["000", "111", "010", "100"],  # complementary pair
        ["000", "000", "010", "100"],  # duplicate
        ["000", "001", "010"],  # too few
        ["00", "001", "010", "100"],  # ragged
    ])
    def test_invalid_schemes(self, strings):
        with pytest.raises(InvalidParameter):
            EncodingScheme.from_strings(strings)


class TestSignMatrix:
    def test_minority_row_1(self):
        np.testing.assert_array_equal(sign_matrix(minority3())[0], [1, 1, 1, -1])

    def test_m2_row_2(self):
        np.testing.assert_array_equal(sign_matrix(generate_transversal(2))[1], [1, -1])

    def test_m3_rows_orthogonal(self):
        s = sign_matrix(generate_transversal(3))
        assert int(s[0] @ s[1]) == 0

    @pytest.mark.parametrize("policy", POLICIES)
    @pytest.mark.parametrize("m", range(2, 9))
    def test_row_orthogonality_exhaustive(self, m, policy):
        s = sign_matrix(generate_transversal(m, policy))
        gram = s @ s.T
        np.testing.assert_array_equal(gram, 2 ** (m - 1) * np.eye(m, dtype=int))


class TestPairStatistics:
    def test_first_pair(self):
        st = pair_statistics(minority3(), 0, 1)
        assert (st.q, st.d, st.p) == (1, 0, 1)

    def test_diagonal(self):
        s = generate_transversal(4)
        for j in range(s.n_inputs):
            assert pair_statistics(s, j, j).p == 0

    def test_second_pair(self):
        st = pair_statistics(minority3(), 1, 2)
        assert (st.q, st.d, st.p) == (2, 0, 2)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            pair_statistics(minority3(), 0, 4)

    @pytest.mark.parametrize("policy", POLICIES)
    @pytest.mark.parametrize("m", range(2, 9))
    def test_p_is_hamming_distance(self, m, policy):
        s = generate_transversal(m, policy)
        y = np.array(s.strings)
        hamming = (y[:, None, :] != y[None, :, :]).sum(axis=2)
        for j in range(s.n_inputs):
            for jp in range(s.n_inputs):
                assert pair_statistics(s, j, jp).p == hamming[j, jp]


class TestPredictedAnticommutator:
    def test_first_pair(self):
        assert predicted_anticommutator(minority3(), 0, 1) == Fraction(2, 3)

    def test_diagonal(self):
        assert predicted_anticommutator(minority3(), 2, 2) == 2

    def test_last_pair(self):
        assert predicted_anticommutator(minority3(), 2, 3) == Fraction(-2, 3)

    @pytest.mark.parametrize("m", range(2, 7))
    def test_symmetric_and_bounded(self, m):
        s = generate_transversal(m)
        for j in range(s.n_inputs):
            for jp in range(s.n_inputs):
                v = predicted_anticommutator(s, j, jp)
                assert v == predicted_anticommutator(s, jp, j)
                assert -2 <= v <= 2
                assert (v == 2) == (j == jp)


class TestConstraintStrings:
    def test_m3(self):
        assert constraint_strings(3).elements == ((1, 1, 1),)

    def test_m2_empty(self):
        assert constraint_strings(2).elements == ()

    def test_m4(self):
        got = ["".join(map(str, s)) for s in constraint_strings(4).elements]
        assert got == ["0111", "1011", "1101", "1110"]

    @pytest.mark.parametrize("m", range(2, 11))
    def test_count(self, m):
        assert len(constraint_strings(m).elements) == 2 ** (m - 1) - m

    @pytest.mark.parametrize("m", range(2, 7))
    def test_flipped_parities_balanced(self, m):
        # every s + e_r has even weight, so its parity pattern must sum to zero
        s = generate_transversal(m)
        for c in constraint_strings(m).elements:
            for r in range(m):
                flipped = list(c)
                flipped[r] ^= 1
                assert int(parity_signs(s, tuple(flipped)).sum()) == 0
