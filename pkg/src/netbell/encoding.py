"""Bit-string encodings that fix the signs of the bilocal Bell expressions.

A scheme picks one string from every complementary pair of length-``m``
bit strings.  Row ``i`` of the sign matrix holds ``(-1)**y[x][i]`` over the
``2**(m-1)`` edge inputs ``x``.  Indices are 0-based here; reports shift
them to 1-based.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from netbell.errors import CapacityError, InvalidParameter

# 2**(MAX_M - 1) strings are materialized; larger m is out of reach anyway.
MAX_M = 16

Bits = tuple[int, ...]


class Policy(str, enum.Enum):
    LEX_FIRST_ZERO = "lex-first-zero"
    MINORITY_WEIGHT = "minority-weight"


@dataclass(frozen=True)
class EncodingScheme:
    m: int
    strings: tuple[Bits, ...]
    policy: Policy = Policy.LEX_FIRST_ZERO

    def __post_init__(self):
        if self.m < 2:
            raise InvalidParameter(f"m must be >= 2, got {self.m}")
        if len(self.strings) != 2 ** (self.m - 1):
            raise InvalidParameter(
                f"expected {2 ** (self.m - 1)} strings, got {len(self.strings)}"
            )
        seen = set()
        for s in self.strings:
            if len(s) != self.m or any(b not in (0, 1) for b in s):
                raise InvalidParameter(f"malformed bit string {s!r}")
            if s in seen:
                raise InvalidParameter(f"duplicate string {format_bits(s)}")
            if complement(s) in seen:
                raise InvalidParameter(
                    f"{format_bits(s)} is the complement of another string"
                )
            seen.add(s)

    @property
    def n_inputs(self) -> int:
        return len(self.strings)

    def as_strings(self) -> list[str]:
        return [format_bits(s) for s in self.strings]

    @classmethod
    def from_strings(cls, strings, policy=Policy.LEX_FIRST_ZERO) -> "EncodingScheme":
        parsed = tuple(parse_bits(s) for s in strings)
        if not parsed:
            raise InvalidParameter("empty encoding")
        return cls(m=len(parsed[0]), strings=parsed, policy=Policy(policy))


@dataclass(frozen=True)
class ConstraintSet:
    m: int
    elements: tuple[Bits, ...]


@dataclass(frozen=True)
class PairStats:
    q: int
    d: int
    p: int


def complement(bits: Bits) -> Bits:
    return tuple(1 - b for b in bits)


def format_bits(bits: Bits) -> str:
    return "".join(str(b) for b in bits)


def parse_bits(text: str) -> Bits:
    if not text or any(ch not in "01" for ch in text):
        raise InvalidParameter(f"not a bit string: {text!r}")
    return tuple(int(ch) for ch in text)


def generate_transversal(m: int, policy=Policy.LEX_FIRST_ZERO) -> EncodingScheme:
    """Pick one string from each complementary pair of length-``m`` strings.

    ``lex-first-zero`` keeps the member starting with 0 and orders the result
    lexicographically.  ``minority-weight`` keeps the lower-weight member
    (ties go to the one starting with 0) and orders by weight, then
    lexicographically.
    """
    if not isinstance(m, int) or m < 2:
        raise InvalidParameter(f"m must be an integer >= 2, got {m!r}")
    try:
        policy = Policy(policy)
    except ValueError:
        raise InvalidParameter(f"unknown policy {policy!r}") from None
    if m > MAX_M:
        raise CapacityError(f"encodings are enumerated for m <= {MAX_M}, got {m}")

    halves = [s for s in itertools.product((0, 1), repeat=m) if s[0] == 0]
    if policy is Policy.LEX_FIRST_ZERO:
        chosen = sorted(halves)
    else:
        chosen = []
        for s in halves:
            c = complement(s)
            ws, wc = sum(s), sum(c)
            chosen.append(s if ws <= wc else c)
        chosen.sort(key=lambda s: (sum(s), s))
    return EncodingScheme(m=m, strings=tuple(chosen), policy=policy)


def sign_matrix(scheme: EncodingScheme) -> np.ndarray:
    """``S[i, x] = (-1)**y[x][i]`` as an ``m x 2**(m-1)`` integer array."""
    bits = np.array(scheme.strings, dtype=np.int64).T
    return 1 - 2 * bits


def _check_index(scheme: EncodingScheme, j: int) -> None:
    if not 0 <= j < scheme.n_inputs:
        raise IndexError(f"input index {j} outside [0, {scheme.n_inputs})")


def pair_statistics(scheme: EncodingScheme, j: int, jp: int) -> PairStats:
    _check_index(scheme, j)
    _check_index(scheme, jp)
    a, b = scheme.strings[j], scheme.strings[jp]
    q = sum(a) + sum(b)
    d = sum(x & y for x, y in zip(a, b))
    return PairStats(q=q, d=d, p=q - 2 * d)


def predicted_anticommutator(scheme: EncodingScheme, j: int, jp: int) -> Fraction:
    """Value of ``{A_j, A_j'}`` (a multiple of identity) forced at the optimum."""
    p = pair_statistics(scheme, j, jp).p
    return Fraction(2) - Fraction(4 * p, scheme.m)


def constraint_strings(m: int) -> ConstraintSet:
    """All length-``m`` strings of odd Hamming weight at least 3, in lex order."""
    if m < 2:
        raise InvalidParameter(f"m must be >= 2, got {m}")
    elems = tuple(
        s for s in itertools.product((0, 1), repeat=m) if sum(s) >= 3 and sum(s) % 2 == 1
    )
    return ConstraintSet(m=m, elements=elems)


def parity_signs(scheme: EncodingScheme, s: Bits) -> np.ndarray:
    """``(-1)**(s . y[x])`` for every input ``x``."""
    y = np.array(scheme.strings, dtype=np.int64)
    return 1 - 2 * ((y @ np.array(s, dtype=np.int64)) % 2)
