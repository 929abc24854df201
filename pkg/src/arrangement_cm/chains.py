"""Augmented chain complexes of posets and lattices, with rational homology.

Every complex here is augmented: the empty simplex sits in degree -1, so the
empty poset has reduced homology Q in degree -1.

Conventions
-----------
* A flag is a tuple of lattice elements listed bottom to top.
* ``boundary[p]`` is stored one row per degree-p basis element; row ``i`` is
  the boundary of ``basis[p][i]`` in degree p-1 coordinates.  A chain is
  therefore mapped by ``x @ boundary[p]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

from .lattice import LabeledLattice, LatticeError
from .linalg import Echelon, QMatrix, kernel_basis, rank, rref

Flag = Tuple[int, ...]


class ComplexError(ValueError):
    pass


@dataclass
class QChain:
    degree: int
    coeffs: Dict[Hashable, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {k: v for k, v in self.coeffs.items() if v}

    def __add__(self, other: "QChain") -> "QChain":
        if self.degree != other.degree:
            raise ComplexError("adding chains of different degrees")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return QChain(self.degree, out)

    def __neg__(self) -> "QChain":
        return QChain(self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "QChain") -> "QChain":
        return self + (-other)

    def __rmul__(self, a) -> "QChain":
        return QChain(self.degree, {k: a * v for k, v in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs


def add_into(acc: dict, key, val) -> None:
    nv = acc.get(key, 0) + val
    if nv:
        acc[key] = nv
    else:
        acc.pop(key, None)


# ---------------------------------------------------------------------------
# posets and their flags


class Poset:
    """A finite poset given by its elements and a strict-order predicate."""

    def __init__(self, elements: Iterable[Hashable], lt: Callable[[Hashable, Hashable], bool]):
        self.elements = tuple(elements)
        self.lt = lt

    @classmethod
    def open_interval(cls, L: LabeledLattice, a: int, b: int) -> "Poset":
        return cls(L.open_interval(a, b), L.lt)

    @classmethod
    def proper_part(cls, L: LabeledLattice) -> "Poset":
        return cls.open_interval(L, L.bottom, L.top)


def flags_of(P: Poset, max_len: Optional[int] = None) -> Dict[int, List[Flag]]:
    """All chains of ``P`` keyed by degree (length - 1), each list sorted lexicographically."""
    elems = list(P.elements)
    succ = {a: [b for b in elems if P.lt(a, b)] for a in elems}
    out: Dict[int, List[Flag]] = {-1: [()]}

    def rec(chain: List):
        out.setdefault(len(chain) - 1, []).append(tuple(chain))
        if max_len is not None and len(chain) >= max_len:
            return
        for b in succ[chain[-1]]:
            chain.append(b)
            rec(chain)
            chain.pop()

    for a in elems:
        rec([a])
    for p in out:
        out[p].sort()
    return out


# ---------------------------------------------------------------------------
# chain complexes


class ChainComplexQ:
    """Graded free Q-modules with boundary maps; checks d o d = 0 on construction."""

    def __init__(self, basis: Dict[int, List[Hashable]], boundary: Dict[int, QMatrix], check: bool = True):
        self.basis = {p: list(b) for p, b in basis.items()}
        self.index = {p: {lab: i for i, lab in enumerate(b)} for p, b in self.basis.items()}
        self.boundary = dict(boundary)
        for p, B in self.boundary.items():
            if B.nrows != len(self.basis.get(p, [])) or B.ncols != len(self.basis.get(p - 1, [])):
                raise ComplexError(f"boundary in degree {p} has shape {B.nrows}x{B.ncols}")
        if check:
            for p in self.boundary:
                if p - 1 in self.boundary:
                    if not (self.boundary[p] @ self.boundary[p - 1]).is_zero():
                        raise ComplexError(f"d o d != 0 in degree {p}")

    @property
    def degrees(self) -> List[int]:
        return sorted(self.basis)

    def rank_of_boundary(self, p: int) -> int:
        cache = self.__dict__.setdefault("_ranks", {})
        if p not in cache:
            B = self.boundary.get(p)
            cache[p] = rank(B) if B is not None else 0
        return cache[p]

    def betti(self, p: int) -> int:
        return len(self.basis.get(p, [])) - self.rank_of_boundary(p) - self.rank_of_boundary(p + 1)

    def betti_numbers(self) -> Dict[int, int]:
        return {p: self.betti(p) for p in self.degrees}

    def vector(self, chain: QChain) -> Dict[int, Fraction]:
        idx = self.index.get(chain.degree, {})
        try:
            return {idx[k]: v for k, v in chain.coeffs.items()}
        except KeyError as e:
            raise ComplexError(f"{e.args[0]!r} is not a basis element in degree {chain.degree}") from None

    def chain(self, p: int, vec: Dict[int, Fraction]) -> QChain:
        b = self.basis[p]
        return QChain(p, {b[i]: v for i, v in vec.items()})

    def d(self, chain: QChain) -> QChain:
        p = chain.degree
        B = self.boundary.get(p)
        if B is None:
            return QChain(p - 1)
        return self.chain(p - 1, B.left_apply(self.vector(chain)))


def _build(basis: Dict[int, List[Flag]], faces: Callable[[Flag], Iterator[Tuple[Flag, int]]], check=True) -> ChainComplexQ:
    index = {p: {f: i for i, f in enumerate(b)} for p, b in basis.items()}
    boundary = {}
    for p, b in basis.items():
        if p - 1 not in basis:
            continue
        tgt = index[p - 1]
        rows = []
        for s in b:
            r: Dict[int, int] = {}
            for face, sgn in faces(s):
                add_into(r, tgt[face], sgn)
            rows.append(r)
        boundary[p] = QMatrix(len(b), len(basis[p - 1]), rows)
    return ChainComplexQ(basis, boundary, check=check)


def _deletion_faces(s: Flag) -> Iterator[Tuple[Flag, int]]:
    for i in range(len(s)):
        yield s[:i] + s[i + 1:], (-1) ** i


def flag_complex(P: Poset, check: bool = True) -> ChainComplexQ:
    """Augmented order complex: simplices are the flags of ``P``."""
    return _build(flags_of(P), _deletion_faces, check)


def atom_simplices(L: LabeledLattice, top: Optional[int] = None) -> Dict[int, List[Flag]]:
    """Atom subsets (in atom order) whose join stays strictly below ``top``."""
    if top is None:
        top = L.top
    atoms = L.atoms_below(top)
    out: Dict[int, List[Flag]] = {-1: [()]}

    def rec(start: int, chosen: List[int], j: int):
        for i in range(start, len(atoms)):
            a = atoms[i]
            jj = L.join(j, a)
            if jj == top:
                continue
            chosen.append(a)
            out.setdefault(len(chosen) - 1, []).append(tuple(chosen))
            rec(i + 1, chosen, jj)
            chosen.pop()

    rec(0, [], L.bottom)
    for p in out:
        out[p].sort()
    return out


def atomic_complex(L: LabeledLattice, check: bool = True) -> ChainComplexQ:
    if not L.is_atomic:
        raise LatticeError("atomic complex needs an atomic lattice")
    return _build(atom_simplices(L), _deletion_faces, check)


# ---------------------------------------------------------------------------
# homology


class Homology:
    """Homology in one degree: Betti number, representative cycles, reducer."""

    def __init__(self, C: ChainComplexQ, p: int):
        self.complex = C
        self.degree = p
        n = len(C.basis.get(p, []))
        B_out = C.boundary.get(p)
        if B_out is not None:
            Z = kernel_basis(B_out.transpose())
        else:
            Z = QMatrix.identity(n)
        self._echelon = Echelon()
        B_in = C.boundary.get(p + 1)
        if B_in is not None:
            R, _, _ = rref(B_in)
            for row in R.rows:
                self._echelon.add(row)
        self.boundary_rank = len(self._echelon)
        Zr, _, _ = rref(Z)
        reps = []
        for row in Zr.rows:
            if self._echelon.add(row, tag=len(reps)):
                reps.append(row)
        self.cycle_rank = Zr.nrows
        self.betti = len(reps)
        self.reps = [C.chain(p, r) for r in reps]

    def is_cycle(self, chain: QChain) -> bool:
        return self.complex.d(chain).is_zero()

    def reduce(self, chain: QChain) -> List[Fraction]:
        """Coordinates of the class of a cycle in the basis ``reps``."""
        if chain.degree != self.degree:
            raise ComplexError(f"chain has degree {chain.degree}, expected {self.degree}")
        if not self.is_cycle(chain):
            raise ComplexError("reduce() called on a chain that is not a cycle")
        coords = self._echelon.express(self.complex.vector(chain))
        if coords is None:
            raise ComplexError("cycle outside the computed cycle space")
        return [coords.get(k, Fraction(0)) for k in range(self.betti)]


def homology(C: ChainComplexQ, p: int) -> Homology:
    return Homology(C, p)


# ---------------------------------------------------------------------------
# lattice-specific maps


def flag_from_sequence(L: LabeledLattice, seq: Sequence[int]) -> Optional[Flag]:
    """Joins of initial segments; ``None`` if two of them coincide."""
    out = []
    j = L.bottom
    for c in seq:
        nj = L.join(j, c)
        if out and nj == out[-1]:
            return None
        out.append(nj)
        j = nj
    return tuple(out)


def perm_sign(perm: Sequence[int]) -> int:
    inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def atoms_to_flags(L: LabeledLattice, sigma: Sequence[int]) -> QChain:
    """Chain map from the atomic complex to the flag complex (sum over orderings of sigma)."""
    sigma = tuple(sigma)
    out: Dict[Flag, int] = {}
    for perm in permutations(range(len(sigma))):
        f = flag_from_sequence(L, [sigma[i] for i in perm])
        if f is not None:
            add_into(out, f, perm_sign(perm))
    return QChain(len(sigma) - 1, out)


def shuffles(p: int, q: int) -> Iterator[Tuple[Tuple[int, ...], int]]:
    """(p, q)-shuffles in lexicographic order.

    Yields ``(word, sign)`` where ``word[t]`` is 0 if slot ``t`` takes the next
    element of the first sequence and 1 for the second; ``sign`` is the parity
    of the permutation taking the concatenation to the shuffled order.
    """
    n = p + q
    for pos in combinations(range(n), p):
        word = [1] * n
        for t in pos:
            word[t] = 0
        inv = sum(t - i for i, t in enumerate(pos))
        yield tuple(word), (-1 if inv % 2 else 1)


def shuffle_sequences(T1: Sequence[int], T2: Sequence[int]) -> Iterator[Tuple[List[int], int]]:
    for word, sgn in shuffles(len(T1), len(T2)):
        i = j = 0
        seq = []
        for w in word:
            if w == 0:
                seq.append(T1[i])
                i += 1
            else:
                seq.append(T2[j])
                j += 1
        yield seq, sgn


def shuffle_flag_product(L: LabeledLattice, FA: Sequence[int], A: int, FB: Sequence[int], B: int) -> QChain:
    """Product of a flag below ``A`` and a flag below ``B``, landing below ``A v B``.

    The flags are augmented by ``A`` and ``B``, shuffled, turned into flags
    by taking joins of initial segments (flags with repetitions vanish), and
    the common last element ``A v B`` is dropped.
    """
    T1 = tuple(FA) + (A,)
    T2 = tuple(FB) + (B,)
    out: Dict[Flag, int] = {}
    for seq, sgn in shuffle_sequences(T1, T2):
        f = flag_from_sequence(L, seq)
        if f is not None:
            add_into(out, f[:-1], sgn)
    return QChain(len(FA) + len(FB), out)
