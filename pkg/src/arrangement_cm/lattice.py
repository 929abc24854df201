"""Dimension-labeled lattices.

A :class:`LabeledLattice` is the only input the rest of the package needs.
It can be built from explicit rational subspaces (:func:`intersection_lattice`),
from an abstract order plus dimension labels, or as a k-equal partition
lattice (:func:`kequal_lattice`).

Element 0 is always the bottom.  Order relations are kept as integer bitsets:
``up[a]`` has bit ``b`` set iff ``a <= b``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .linalg import QMatrix, rank, rref


class LatticeError(ValueError):
    """Raised for malformed lattice or arrangement input."""


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class LabeledLattice:
    """Finite lattice with a nonnegative dimension label on every element.

    Instances are immutable after construction.  ``labels`` optionally keeps
    whatever each element "is" (a canonical matrix, a :class:`Partition`);
    ``parent`` records original indices when the lattice was cut out of a
    bigger one.
    """

    def __init__(
        self,
        dims: Sequence[int],
        up: Sequence[int],
        labels: Optional[Sequence] = None,
        parent: Optional[Sequence[int]] = None,
        realized: bool = False,
    ):
        self.n = len(dims)
        if self.n == 0:
            raise LatticeError("empty lattice")
        self.dims = tuple(int(d) for d in dims)
        self.up = tuple(up)
        self.labels = tuple(labels) if labels is not None else None
        self.parent = tuple(parent) if parent is not None else None
        self.realized = realized
        down = [0] * self.n
        for a in range(self.n):
            for b in _bits(self.up[a]):
                down[b] |= 1 << a
        self.down = tuple(down)
        self._check_order()
        self._join, self._meet = self._tables()
        self.bottom = 0
        self.top = next(c for c in range(self.n) if self.down[c] == (1 << self.n) - 1)
        self.atoms = tuple(a for a in range(1, self.n) if self.down[a] == (1 | (1 << a)))
        for a in range(self.n):
            for b in _bits(self.up[a]):
                if a != b and self.dims[a] >= self.dims[b]:
                    raise LatticeError(
                        f"dimension labels must increase strictly: dim({a})={self.dims[a]}"
                        f" but dim({b})={self.dims[b]}"
                    )

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_leq_pairs(cls, dims: Sequence[int], pairs: Iterable[Tuple[int, int]], **kw) -> "LabeledLattice":
        """Reflexive-transitive closure of the given pairs; index 0 must be the bottom."""
        n = len(dims)
        up = [1 << a for a in range(n)]
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise LatticeError(f"pair {(a, b)} out of range")
            up[a] |= 1 << b
        for a in range(n):
            up[0] |= 1 << a
        # transitive closure on bitsets
        for k in range(n):
            bit = 1 << k
            for a in range(n):
                if up[a] & bit:
                    up[a] |= up[k]
        return cls(dims, up, **kw)

    def restrict(self, elements: Iterable[int]) -> "LabeledLattice":
        """Induced order on a subset containing its own bottom; must be a lattice."""
        # the subset's least element goes first; everything else keeps its
        # original relative order so atom orders (and hence signs) agree
        elems = sorted(set(elements))
        least = min(elems, key=lambda e: bin(self.down[e]).count("1"))
        elems.remove(least)
        elems.insert(0, least)
        pos = {e: i for i, e in enumerate(elems)}
        up = []
        for e in elems:
            m = 0
            for f in _bits(self.up[e]):
                if f in pos:
                    m |= 1 << pos[f]
            up.append(m)
        labels = [self.labels[e] for e in elems] if self.labels is not None else None
        parent = [self.parent[e] if self.parent is not None else e for e in elems]
        return LabeledLattice([self.dims[e] for e in elems], up, labels, parent, self.realized)

    # -- validation ------------------------------------------------------------

    def _check_order(self):
        n = self.n
        for a in range(n):
            if not self.up[a] >> a & 1:
                raise LatticeError("order relation is not reflexive")
            for b in _bits(self.up[a]):
                if b != a and self.up[b] >> a & 1:
                    raise LatticeError(f"order relation is not antisymmetric on {a}, {b}")
                if self.up[b] & ~self.up[a]:
                    raise LatticeError("order relation is not transitive")
        if self.up[0] != (1 << n) - 1:
            raise LatticeError("element 0 must be the bottom")

    def _tables(self):
        n = self.n
        join = [[0] * n for _ in range(n)]
        meet = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                U = self.up[a] & self.up[b]
                j = self._least(U, self.up)
                D = self.down[a] & self.down[b]
                m = self._least(D, self.down)
                if j is None:
                    raise LatticeError(f"elements {a}, {b} have no least upper bound")
                if m is None:
                    raise LatticeError(f"elements {a}, {b} have no greatest lower bound")
                join[a][b] = join[b][a] = j
                meet[a][b] = meet[b][a] = m
        return tuple(tuple(r) for r in join), tuple(tuple(r) for r in meet)

    @staticmethod
    def _least(S: int, rel: Sequence[int]) -> Optional[int]:
        for c in _bits(S):
            if rel[c] & S == S:
                return c
        return None

    def check_input_dims(self):
        if self.dims[0] != 0:
            raise LatticeError("dim(bottom) must be 0")

    # -- queries ----------------------------------------------------------------

    def leq(self, a: int, b: int) -> bool:
        return bool(self.up[a] >> b & 1)

    def lt(self, a: int, b: int) -> bool:
        return a != b and bool(self.up[a] >> b & 1)

    def join(self, a: int, b: int) -> int:
        return self._join[a][b]

    def meet(self, a: int, b: int) -> int:
        return self._meet[a][b]

    def join_all(self, elems: Iterable[int]) -> int:
        j = 0
        for e in elems:
            j = self._join[j][e]
        return j

    def dim(self, a: int) -> int:
        return self.dims[a]

    def elements(self) -> range:
        return range(self.n)

    def nonbottom(self) -> List[int]:
        return [a for a in range(self.n) if a != self.bottom]

    def atoms_below(self, a: int) -> Tuple[int, ...]:
        return tuple(x for x in self.atoms if self.down[a] >> x & 1)

    def open_interval(self, a: int, b: int) -> List[int]:
        """Elements strictly between ``a`` and ``b``, in index order."""
        S = (self.up[a] & self.down[b]) & ~(1 << a) & ~(1 << b)
        return list(_bits(S))

    def closed_interval(self, a: int, b: int) -> List[int]:
        if not self.leq(a, b):
            raise LatticeError(f"{a} is not below {b}")
        return list(_bits(self.up[a] & self.down[b]))

    def below(self, a: int) -> List[int]:
        return [x for x in _bits(self.down[a]) if x != a]

    def above(self, a: int) -> List[int]:
        return [x for x in _bits(self.up[a]) if x != a]

    def covers(self) -> List[Tuple[int, int]]:
        out = []
        for a in range(self.n):
            for b in self.above(a):
                if not (self.up[a] & self.down[b] & ~(1 << a) & ~(1 << b)):
                    out.append((a, b))
        return out

    @cached_property
    def is_atomic(self) -> bool:
        return all(self.join_all(self.atoms_below(a)) == a for a in range(1, self.n))

    @cached_property
    def is_submodular(self) -> bool:
        """dim(A v B) + dim(A ^ B) <= dim A + dim B for all pairs (true for subspaces)."""
        d = self.dims
        return all(
            d[self._join[a][b]] + d[self._meet[a][b]] <= d[a] + d[b]
            for a in range(self.n)
            for b in range(a + 1, self.n)
        )

    def independent_tops(self, a: int, b: int) -> bool:
        """The product condition dim(A v B) = dim A + dim B."""
        return self.dims[self._join[a][b]] == self.dims[a] + self.dims[b]

    def topological_order(self, elems: Iterable[int]) -> List[int]:
        return sorted(elems, key=lambda e: (bin(self.down[e]).count("1"), e))

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"LabeledLattice(n={self.n}, top_dim={self.dims[self.top]}, atoms={len(self.atoms)})"

    def __eq__(self, other):
        if not isinstance(other, LabeledLattice):
            return NotImplemented
        return self.dims == other.dims and self.up == other.up

    def __hash__(self):
        return hash((self.dims, self.up))

    # -- serialisation -----------------------------------------------------------

    def to_json(self) -> dict:
        return {"lattice": {"dims": list(self.dims), "leq_pairs": [list(p) for p in self.covers()]}}


# ---------------------------------------------------------------------------
# module-level wrappers


def join(L: LabeledLattice, a: int, b: int) -> int:
    return L.join(a, b)


def meet(L: LabeledLattice, a: int, b: int) -> int:
    return L.meet(a, b)


def interval(L: LabeledLattice, a: int, b: int) -> LabeledLattice:
    """Closed interval [a, b], re-indexed, dimension labels unshifted."""
    return L.restrict(L.closed_interval(a, b))


def sublattice_AB(L: LabeledLattice, a: int, b: int) -> LabeledLattice:
    """Joins of all subsets of atoms(a) u atoms(b), plus the bottom.

    ``result.parent`` is the inclusion into ``L`` (and hence into [0, a v b]).
    """
    for x in (a, b):
        if x == L.bottom:
            raise LatticeError("sublattice_AB needs non-bottom elements")
        if L.join_all(L.atoms_below(x)) != x:
            raise LatticeError(f"lattice is not atomic below element {x}")
    closed = {L.bottom} | set(L.atoms_below(a)) | set(L.atoms_below(b))
    frontier = set(closed)
    while frontier:
        new = set()
        for x in frontier:
            for y in closed:
                z = L.join(x, y)
                if z not in closed:
                    new.add(z)
        closed |= new
        frontier = new
    return L.restrict(closed)


def is_geometric(L: LabeledLattice) -> Tuple[bool, Optional[Dict[int, int]]]:
    """Atomic, graded and semimodular; returns the rank function when true."""
    if not L.is_atomic:
        return False, None
    order = L.topological_order(range(L.n))
    lo: Dict[int, int] = {L.bottom: 0}
    hi: Dict[int, int] = {L.bottom: 0}
    cov: Dict[int, List[int]] = {x: [] for x in range(L.n)}
    for a, b in L.covers():
        cov[b].append(a)
    for x in order[1:]:
        lo[x] = 1 + min(lo[y] for y in cov[x])
        hi[x] = 1 + max(hi[y] for y in cov[x])
        if lo[x] != hi[x]:
            return False, None
    rk = lo
    for a in range(L.n):
        for b in range(a + 1, L.n):
            if rk[L.join(a, b)] + rk[L.meet(a, b)] > rk[a] + rk[b]:
                return False, None
    return True, rk


def moebius(L: LabeledLattice, a: int, b: int) -> int:
    if not L.leq(a, b):
        raise LatticeError(f"{a} is not below {b}")
    elems = L.topological_order(L.closed_interval(a, b))
    mu: Dict[int, int] = {}
    for c in elems:
        if c == a:
            mu[c] = 1
        else:
            mu[c] = -sum(mu[x] for x in elems if x != c and L.leq(x, c) and x in mu)
    return mu[b]


# ---------------------------------------------------------------------------
# subspace arrangements


Canon = Tuple[Tuple[Fraction, ...], ...]


def canonical_subspace(rows: Sequence[Sequence], ambient_dim: int) -> Canon:
    """Reduced row-echelon form with zero rows dropped, as a hashable tuple."""
    M = QMatrix.from_dense(rows, ambient_dim) if rows else QMatrix(0, ambient_dim)
    R, _, _ = rref(M)
    return tuple(tuple(r.get(j, Fraction(0)) for j in range(ambient_dim)) for r in R.rows)


def subspace_sum(A: Canon, B: Canon, ambient_dim: int) -> Canon:
    return canonical_subspace(list(A) + list(B), ambient_dim)


@dataclass(frozen=True)
class SubspaceArrangement:
    ambient_dim: int
    subspaces: Tuple[Canon, ...]

    @classmethod
    def from_rows(cls, ambient_dim: int, subspaces: Sequence[Sequence[Sequence]]) -> "SubspaceArrangement":
        if ambient_dim <= 0:
            raise LatticeError("ambient dimension must be positive")
        seen = []
        for rows in subspaces:
            for r in rows:
                if len(r) != ambient_dim:
                    raise LatticeError(f"row {list(r)} does not have {ambient_dim} entries")
            c = canonical_subspace(rows, ambient_dim)
            if not c:
                raise LatticeError("the zero subspace is not allowed in an arrangement")
            if c not in seen:
                seen.append(c)
        return cls(ambient_dim, tuple(seen))


def intersection_lattice(arr: SubspaceArrangement) -> LabeledLattice:
    """Lattice of all sums of the subspaces, ordered by inclusion, labeled by dimension."""
    n = arr.ambient_dim
    elems = set(arr.subspaces)
    frontier = set(elems)
    while frontier:
        new = set()
        for A in frontier:
            for B in elems:
                S = subspace_sum(A, B, n)
                if S not in elems:
                    new.add(S)
        elems |= new
        frontier = new
    ordered = [()] + sorted(elems, key=lambda c: (len(c), c))
    pos = {c: i for i, c in enumerate(ordered)}
    up = []
    for A in ordered:
        m = 0
        for B in ordered:
            if len(B) >= len(A) and subspace_sum(A, B, n) == B:
                m |= 1 << pos[B]
        up.append(m)
    return LabeledLattice([len(c) for c in ordered], up, labels=ordered, realized=True)


# ---------------------------------------------------------------------------
# partitions and k-equal lattices


@dataclass(frozen=True, order=True)
class Partition:
    n: int
    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        pts = sorted(x for b in self.blocks for x in b)
        if pts != list(range(1, self.n + 1)) or any(not b for b in self.blocks):
            raise LatticeError(f"{self.blocks} is not a set partition of 1..{self.n}")

    @classmethod
    def of(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        given = [tuple(sorted(b)) for b in blocks]
        covered = {x for b in given for x in b}
        given += [(x,) for x in range(1, n + 1) if x not in covered]
        return cls(n, tuple(sorted(given)))

    @property
    def nontrivial_blocks(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(b for b in self.blocks if len(b) > 1)

    @property
    def dim(self) -> int:
        return sum(len(b) - 1 for b in self.blocks)

    def refines(self, other: "Partition") -> bool:
        where = {x: i for i, b in enumerate(other.blocks) for x in b}
        return all(len({where[x] for x in b}) == 1 for b in self.blocks)

    def __str__(self) -> str:
        nt = self.nontrivial_blocks
        return "|".join("".join(map(str, b)) for b in nt) if nt else "0"


def set_partitions(n: int) -> Iterator[List[List[int]]]:
    """All set partitions of 1..n (restricted growth order)."""
    def rec(i: int, blocks: List[List[int]]):
        if i > n:
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from rec(i + 1, blocks)
        blocks.pop()

    yield from rec(1, [])


def kequal_lattice(n: int, k: int, ell: int = 0) -> LabeledLattice:
    """Partitions of 1..n whose blocks are singletons, of size >= k, or meet 1..ell."""
    if n < 2 or k < 2 or not (k <= n or ell > 0) or ell < 0:
        raise LatticeError(f"invalid k-equal parameters n={n}, k={k}, ell={ell}")
    parts = []
    for blocks in set_partitions(n):
        if all(len(b) == 1 or len(b) >= k or min(b) <= ell for b in blocks):
            parts.append(Partition.of(n, blocks))
    parts.sort(key=lambda p: (p.dim, p.nontrivial_blocks))
    up = []
    for p in parts:
        m = 0
        for j, q in enumerate(parts):
            if p.refines(q):
                m |= 1 << j
        up.append(m)
    return LabeledLattice([p.dim for p in parts], up, labels=parts, realized=(ell == 0))


def kequal_arrangement(n: int, k: int) -> SubspaceArrangement:
    """The subspaces V(w), w a k-subset: spanned by e_i - e_j for i, j in w."""
    subs = []
    for w in combinations(range(n), k):
        rows = []
        for j in w[1:]:
            r = [0] * n
            r[w[0]], r[j] = 1, -1
            rows.append(r)
        subs.append(rows)
    return SubspaceArrangement.from_rows(n, subs)


def coordinate_arrangement(n: int) -> SubspaceArrangement:
    return SubspaceArrangement.from_rows(n, [[[1 if j == i else 0 for j in range(n)]] for i in range(n)])


BUILTIN_HELP = "boolean:N, braid:N, kequal:N:K[:ELL], oneline"


def builtin(name: str) -> LabeledLattice:
    parts = name.split(":")
    try:
        args = [int(x) for x in parts[1:]]
    except ValueError:
        raise LatticeError(f"bad builtin {name!r}; expected one of {BUILTIN_HELP}") from None
    kind = parts[0]
    if kind == "boolean" and len(args) == 1 and args[0] >= 1:
        return intersection_lattice(coordinate_arrangement(args[0]))
    if kind == "braid" and len(args) == 1 and args[0] >= 2:
        return kequal_lattice(args[0], 2, 0)
    if kind == "kequal" and len(args) in (2, 3):
        return kequal_lattice(*args)
    if kind == "oneline" and not args:
        return intersection_lattice(SubspaceArrangement.from_rows(1, [[[1]]]))
    raise LatticeError(f"unknown builtin {name!r}; expected one of {BUILTIN_HELP}")


# ---------------------------------------------------------------------------
# JSON input


def _rational(x) -> Fraction:
    if isinstance(x, bool):
        raise LatticeError(f"not a rational: {x!r}")
    if isinstance(x, (int, str)):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise LatticeError(f"not a rational: {x!r}") from None
    raise LatticeError(f"rationals must be strings or integers, got {x!r}")


def lattice_from_json(obj: dict) -> LabeledLattice:
    if "lattice" in obj:
        body = obj["lattice"]
        dims = body.get("dims")
        pairs = body.get("leq_pairs", [])
        if not isinstance(dims, list) or not dims:
            raise LatticeError("'dims' must be a nonempty list")
        if any(not isinstance(d, int) or d < 0 for d in dims):
            raise LatticeError("'dims' entries must be nonnegative integers")
        L = LabeledLattice.from_leq_pairs(dims, [tuple(p) for p in pairs])
        L.check_input_dims()
        return L
    if "subspaces" in obj:
        n = obj.get("ambient_dim")
        if not isinstance(n, int):
            raise LatticeError("'ambient_dim' must be an integer")
        subs = [[[_rational(x) for x in row] for row in sub] for sub in obj["subspaces"]]
        return intersection_lattice(SubspaceArrangement.from_rows(n, subs))
    raise LatticeError("input must have a 'lattice' or a 'subspaces' key")


def load_lattice(path: str) -> LabeledLattice:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as e:
            raise LatticeError(f"{path}: invalid JSON ({e})") from None
    return lattice_from_json(obj)


def rank_of_subspaces(L: LabeledLattice, elems: Sequence[int]) -> int:
    """Rank of the stacked canonical matrices (realized lattices only)."""
    if not L.realized or L.labels is None or not isinstance(L.labels[0], tuple):
        raise LatticeError("lattice does not carry subspace labels")
    rows = [list(r) for e in elems for r in L.labels[e]]
    if not rows:
        return 0
    return rank(QMatrix.from_dense(rows))
