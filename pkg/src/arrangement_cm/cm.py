"""The small model CM: critical monomials indexed by flags.

A critical monomial is stored as its flag ``T`` (bottom to top); its exponents
are determined by the dimension labels and never materialized.  The empty
flag is the unit.  The cohomological degree is ``2 dim(top T) - |T|``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .chains import ChainComplexQ, Flag, add_into, flags_of, Poset
from .lattice import LabeledLattice
from .linalg import QMatrix

CMElement = Dict[Flag, Fraction]

UNIT: Flag = ()


def top(T: Flag) -> Optional[int]:
    return T[-1] if T else None


def cm_degree(L: LabeledLattice, T: Flag) -> int:
    if not T:
        return 0
    return 2 * L.dim(T[-1]) - len(T)


def homological_degree(T: Flag) -> int:
    """Degree of ``T`` minus its top, as a simplex of the flag complex below the top."""
    return len(T) - 2


def q_from_p(L: LabeledLattice, A: int, p: int) -> int:
    return 2 * L.dim(A) - p - 2


def is_flag(L: LabeledLattice, T: Sequence[int]) -> bool:
    return all(x != L.bottom for x in T) and all(L.lt(a, b) for a, b in zip(T, T[1:]))


def cm_differential(L: LabeledLattice, T: Flag) -> CMElement:
    """Alternating deletion of every element except the top (positions 1..k-1 get sign (-1)^i)."""
    out: CMElement = {}
    for i in range(1, len(T)):
        add_into(out, T[: i - 1] + T[i:], (-1) ** i)
    return out


def _merge(L: LabeledLattice, T1: Flag, T2: Flag) -> Iterator[Tuple[List[int], int]]:
    # Recursive shuffle generation; the sign flips each time an element of T2
    # jumps over the remaining elements of T1.
    def rec(i: int, j: int, acc: List[int], sgn: int):
        if i == len(T1) and j == len(T2):
            yield list(acc), sgn
            return
        if i < len(T1):
            acc.append(T1[i])
            yield from rec(i + 1, j, acc, sgn)
            acc.pop()
        if j < len(T2):
            acc.append(T2[j])
            s = -sgn if (len(T1) - i) % 2 else sgn
            yield from rec(i, j + 1, acc, s)
            acc.pop()

    yield from rec(0, 0, [], 1)


def independent(L: LabeledLattice, A: int, B: int) -> bool:
    return L.dim(L.join(A, B)) == L.dim(A) + L.dim(B)


def cm_product(L: LabeledLattice, T1: Flag, T2: Flag) -> CMElement:
    if not T1:
        return {T2: Fraction(1)}
    if not T2:
        return {T1: Fraction(1)}
    if not independent(L, T1[-1], T2[-1]):
        return {}
    out: CMElement = {}
    for seq, sgn in _merge(L, T1, T2):
        flag = []
        j = L.bottom
        for c in seq:
            j = L.join(j, c)
            if flag and flag[-1] == j:
                break
            flag.append(j)
        else:
            add_into(out, tuple(flag), sgn)
    return out


def cm_element_product(L: LabeledLattice, x: CMElement, y: CMElement) -> CMElement:
    out: CMElement = {}
    for T1, a in x.items():
        for T2, b in y.items():
            for T, c in cm_product(L, T1, T2).items():
                add_into(out, T, a * b * c)
    return out


def cm_d(L: LabeledLattice, x: CMElement) -> CMElement:
    out: CMElement = {}
    for T, a in x.items():
        for S, c in cm_differential(L, T).items():
            add_into(out, S, a * c)
    return out


def cm_add(x: CMElement, y: CMElement, scale=1) -> CMElement:
    out = dict(x)
    for T, a in y.items():
        add_into(out, T, scale * a)
    return out


def cm_scale(x: CMElement, a) -> CMElement:
    return {T: a * v for T, v in x.items() if a * v}


def homogeneous_degree(L: LabeledLattice, x: CMElement) -> Optional[int]:
    degs = {cm_degree(L, T) for T in x}
    if len(degs) > 1:
        raise ValueError("element is not homogeneous")
    return degs.pop() if degs else None


def critical_monomials(L: LabeledLattice, A: int) -> List[Flag]:
    """All flags with top ``A``, sorted lexicographically."""
    below = flags_of(Poset.open_interval(L, L.bottom, A))
    return sorted(f + (A,) for fl in below.values() for f in fl)


class CMComplex:
    """CM_A viewed as a chain complex in the homological degree ``p = |T| - 2``."""

    def __init__(self, L: LabeledLattice, A: int, check: bool = True):
        self.lattice = L
        self.element = A
        basis: Dict[int, List[Flag]] = {}
        for T in critical_monomials(L, A):
            basis.setdefault(homological_degree(T), []).append(T)
        index = {p: {T: i for i, T in enumerate(b)} for p, b in basis.items()}
        boundary = {}
        for p, b in basis.items():
            if p - 1 not in basis:
                continue
            rows = []
            for T in b:
                rows.append({index[p - 1][S]: c for S, c in cm_differential(L, T).items()})
            boundary[p] = QMatrix(len(b), len(basis[p - 1]), rows)
        self.chain_complex = ChainComplexQ(basis, boundary, check=check)

    def q_of(self, p: int) -> int:
        return q_from_p(self.lattice, self.element, p)

    def p_of(self, q: int) -> int:
        return 2 * self.lattice.dim(self.element) - q - 2

    def betti_by_q(self) -> Dict[int, int]:
        out = {}
        for p, b in self.chain_complex.betti_numbers().items():
            if b:
                out[self.q_of(p)] = b
        return out

    @staticmethod
    def to_flag(T: Flag) -> Flag:
        """The isomorphism onto the flag complex of the open interval below the top."""
        return T[:-1]


def cm_complex(L: LabeledLattice, check: bool = True) -> Dict[int, CMComplex]:
    return {A: CMComplex(L, A, check) for A in L.nonbottom()}
