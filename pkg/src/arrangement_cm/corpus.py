"""Test corpora of dimension-labeled lattices.

Three sources: every lattice with at most six elements (up to isomorphism),
the strictly monotone labelings of a lattice, and seeded random lattices
built as union-closed set families.
"""

from __future__ import annotations

import random
from itertools import permutations, product
from typing import Iterator, List, Optional, Tuple

from .lattice import LabeledLattice


def _closure(m: int, rel: set) -> set:
    rel = set(rel)
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c, d in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return rel


def _canonical(m: int, rel: frozenset) -> Tuple:
    best = None
    for perm in permutations(range(m)):
        key = tuple(sorted((perm[a], perm[b]) for a, b in rel))
        if best is None or key < best:
            best = key
    return best


def _topological(m: int, rel) -> Tuple:
    # relabel so that a < b in the order implies a < b as integers
    order = sorted(range(m), key=lambda x: sum(1 for a, b in rel if b == x))
    pos = {x: i for i, x in enumerate(order)}
    return tuple(sorted((pos[a], pos[b]) for a, b in rel))


def _is_lattice(n: int, up: List[int]) -> bool:
    # every pair needs a least upper bound; with a bottom, meets follow
    for a in range(n):
        for b in range(a + 1, n):
            common = up[a] & up[b]
            cands = [c for c in range(n) if common >> c & 1]
            least = [c for c in cands if all(up[c] >> d & 1 for d in cands)]
            if len(least) != 1:
                return False
    return True


def small_lattice_orders(max_elements: int = 6) -> List[List[int]]:
    """Up-set bitsets of every lattice with 2..max_elements elements, one per isomorphism class.

    Index 0 is the bottom and the last index is the top; every order is
    compatible with the index order.
    """
    out = []
    for n in range(2, max_elements + 1):
        m = n - 2
        pairs = [(a, b) for a in range(m) for b in range(m) if a < b]
        seen = set()
        for mask in range(1 << len(pairs)):
            rel = {pairs[i] for i in range(len(pairs)) if mask >> i & 1}
            if _closure(m, rel) != rel:
                continue
            key = _canonical(m, frozenset(rel))
            if key in seen:
                continue
            seen.add(key)
            key = _topological(m, key)
            up = [0] * n
            for i in range(n):
                up[i] = 1 << i
            up[0] = (1 << n) - 1
            for i in range(1, n - 1):
                up[i] |= 1 << (n - 1)
            for a, b in key:
                up[a + 1] |= 1 << (b + 1)
            if _is_lattice(n, up):
                out.append(up)
    return out


def heights(up: List[int]) -> List[int]:
    """Length of the longest chain from the bottom to each element."""
    n = len(up)
    h = [0] * n
    for b in range(n):
        for a in range(b):
            if a != b and up[a] >> b & 1:
                h[b] = max(h[b], h[a] + 1)
    return h


def labelings(up: List[int], slack: int = 1) -> Iterator[List[int]]:
    """Strictly monotone labelings with dim(bottom) = 0 and dim(top) <= height(top) + slack."""
    n = len(up)
    h = heights(up)
    cap = h[-1] + slack
    depth = [0] * n
    for a in reversed(range(n)):
        for b in range(a + 1, n):
            if up[a] >> b & 1:
                depth[a] = max(depth[a], depth[b] + 1)
    ranges = [range(h[i], cap - depth[i] + 1) if i else range(0, 1) for i in range(n)]
    for dims in product(*ranges):
        ok = all(dims[a] < dims[b] for a in range(n) for b in range(n)
                 if a != b and up[a] >> b & 1)
        if ok:
            yield list(dims)


def small_lattices(max_elements: int = 6, slack: int = 1,
                   submodular: Optional[bool] = None) -> List[LabeledLattice]:
    """Every lattice with at most ``max_elements`` elements, with all small monotone labelings.

    ``submodular=True`` keeps only labelings with dim(A v B) + dim(A ^ B) <= dim A + dim B.
    """
    out = []
    for up in small_lattice_orders(max_elements):
        for dims in labelings(up, slack):
            L = LabeledLattice(dims, up)
            if submodular is not None and L.is_submodular != submodular:
                continue
            out.append(L)
    return out


def random_lattice(rng: random.Random, max_elements: int = 10, ground: int = 4,
                   max_step: int = 2) -> LabeledLattice:
    """A random union-closed family on a small ground set, with random monotone dims."""
    while True:
        k = rng.randint(1, ground + 2)
        gens = [rng.randint(1, (1 << ground) - 1) for _ in range(k)]
        fam = {0}
        frontier = set(gens)
        while frontier:
            fam |= frontier
            frontier = {a | b for a in fam for b in fam} - fam
        if len(fam) > max_elements or len(fam) < 2:
            continue
        elems = sorted(fam, key=lambda s: (bin(s).count("1"), s))
        n = len(elems)
        up = [0] * n
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                if a & b == a:
                    up[i] |= 1 << j
        dims = [0] * n
        for j in range(1, n):
            below = [dims[i] for i in range(j) if up[i] >> j & 1]
            dims[j] = max(below) + rng.randint(1, max_step)
        return LabeledLattice(dims, up)


def random_lattices(count: int, seed: int = 0, max_elements: int = 10) -> List[LabeledLattice]:
    rng = random.Random(seed)
    return [random_lattice(rng, max_elements) for _ in range(count)]


__all__ = [
    "small_lattice_orders",
    "heights",
    "labelings",
    "small_lattices",
    "random_lattice",
    "random_lattices",
]
