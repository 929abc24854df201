"""Cohomology of the complement as a graded ring.

Betti numbers are computed two ways: from the flag complexes of the open
intervals below each element, and from the CM complexes.  Products are
computed at chain level in CM and reduced to homology coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .chains import Homology, Poset, QChain, flag_complex, homology
from .cm import CMComplex, CMElement, cm_element_product, independent
from .lattice import LabeledLattice
from .linalg import Echelon, smith_normal_form


def betti_gm(L: LabeledLattice) -> Dict[int, int]:
    out = {0: 1}
    for A in L.nonbottom():
        C = flag_complex(Poset.open_interval(L, L.bottom, A))
        for p, b in C.betti_numbers().items():
            if b:
                q = 2 * L.dim(A) - p - 2
                out[q] = out.get(q, 0) + b
    return dict(sorted(out.items()))


class LocalCohomology:
    """Lazily built CM_A complexes and their homology, keyed by (A, q)."""

    def __init__(self, L: LabeledLattice):
        self.lattice = L
        self._cm: Dict[int, CMComplex] = {}
        self._hom: Dict[Tuple[int, int], Homology] = {}

    def complex(self, A: int) -> CMComplex:
        if A not in self._cm:
            self._cm[A] = CMComplex(self.lattice, A)
        return self._cm[A]

    def betti(self, A: int) -> Dict[int, int]:
        return self.complex(A).betti_by_q()

    def homology(self, A: int, q: int) -> Homology:
        key = (A, q)
        if key not in self._hom:
            C = self.complex(A)
            self._hom[key] = homology(C.chain_complex, C.p_of(q))
        return self._hom[key]

    def reps(self, A: int, q: int) -> List[CMElement]:
        return [dict(r.coeffs) for r in self.homology(A, q).reps]

    def reduce(self, A: int, q: int, x: CMElement) -> List[Fraction]:
        H = self.homology(A, q)
        return H.reduce(QChain(H.degree, x))


def betti_cm(L: LabeledLattice, local: Optional[LocalCohomology] = None) -> Dict[int, int]:
    local = local or LocalCohomology(L)
    out = {0: 1}
    for A in L.nonbottom():
        for q, b in local.betti(A).items():
            out[q] = out.get(q, 0) + b
    return dict(sorted(out.items()))


@dataclass
class GradedRing:
    lattice: LabeledLattice
    basis: List[Tuple[Optional[int], int, int]]
    reps: List[CMElement]
    products: Dict[Tuple[int, int], Dict[int, Fraction]] = field(default_factory=dict)
    offsets: Dict[Tuple[int, int], int] = field(default_factory=dict)

    @property
    def components(self) -> Dict[Tuple[Optional[int], int], int]:
        out: Dict[Tuple[Optional[int], int], int] = {}
        for A, q, _ in self.basis:
            out[(A, q)] = out.get((A, q), 0) + 1
        return out

    @property
    def betti(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for _, q, _ in self.basis:
            out[q] = out.get(q, 0) + 1
        return dict(sorted(out.items()))

    @property
    def poincare(self) -> List[int]:
        b = self.betti
        return [b.get(q, 0) for q in range(max(b) + 1)]

    def embed(self, A: int, q: int, coords) -> Dict[int, Fraction]:
        """Global basis coordinates of a class given in the (A, q) component basis."""
        base = self.offsets.get((A, q))
        if base is None:
            if any(coords):
                raise ValueError(f"no homology in component {(A, q)}")
            return {}
        return {base + k: Fraction(c) for k, c in enumerate(coords) if c}

    def degree(self, i: int) -> int:
        return self.basis[i][1]

    def indices(self, q: int) -> List[int]:
        return [i for i, (_, d, _) in enumerate(self.basis) if d == q]

    def multiply(self, x: Dict[int, Fraction], y: Dict[int, Fraction]) -> Dict[int, Fraction]:
        """Product of two classes given in basis coordinates."""
        out: Dict[int, Fraction] = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.product(i, j).items():
                    v = out.get(k, 0) + a * b * c
                    if v:
                        out[k] = v
                    else:
                        out.pop(k, None)
        return out

    def product(self, i: int, j: int) -> Dict[int, Fraction]:
        if i == 0:
            return {j: Fraction(1)}
        if j == 0:
            return {i: Fraction(1)}
        return self.products.get((i, j), {})

    def image_rank(self, q1: int, q2: int) -> int:
        """Dimension of the span of all products of degree-q1 and degree-q2 classes."""
        E = Echelon()
        for i in self.indices(q1):
            for j in self.indices(q2):
                v = self.product(i, j)
                if v:
                    E.add(v)
        return len(E)

    def to_json(self) -> dict:
        return {
            "betti": {str(q): b for q, b in self.betti.items()},
            "components": [
                {"element": A if A is not None else self.lattice.bottom, "q": q, "dim": d}
                for (A, q), d in self.components.items()
            ],
            "products": [
                {"i": i, "j": j, "coords": {str(k): str(v) for k, v in sorted(c.items())}}
                for (i, j), c in sorted(self.products.items())
            ],
        }


def ring_structure(L: LabeledLattice, local: Optional[LocalCohomology] = None) -> GradedRing:
    local = local or LocalCohomology(L)
    basis: List[Tuple[Optional[int], int, int]] = [(None, 0, 0)]
    reps: List[CMElement] = [{(): Fraction(1)}]
    offset: Dict[Tuple[int, int], int] = {}
    for A in L.nonbottom():
        for q, b in sorted(local.betti(A).items()):
            offset[(A, q)] = len(basis)
            for k, r in enumerate(local.reps(A, q)):
                basis.append((A, q, k))
                reps.append(r)
    R = GradedRing(L, basis, reps, offsets=offset)
    for i in range(1, len(basis)):
        A, q1, _ = basis[i]
        for j in range(1, len(basis)):
            B, q2, _ = basis[j]
            if not independent(L, A, B):
                continue
            C = L.join(A, B)
            q = q1 + q2
            x = cm_element_product(L, reps[i], reps[j])
            if not x:
                continue
            if (C, q) not in offset:
                # cycle in a component with no homology; still must be a cycle
                local.reduce(C, q, x)
                continue
            coords = local.reduce(C, q, x)
            base = offset[(C, q)]
            v = {base + k: c for k, c in enumerate(coords) if c}
            if v:
                R.products[(i, j)] = v
    return R


def poincare_polynomial(L: LabeledLattice) -> List[int]:
    b = betti_cm(L)
    return [b.get(q, 0) for q in range(max(b) + 1)]


def integral_betti_experimental(L: LabeledLattice) -> Dict[int, Tuple[int, Tuple[int, ...]]]:
    """EXPERIMENTAL: free rank and torsion of the integral CM cohomology per degree.

    Integral validity of the model is not known; the output is a report, not
    a theorem.  Free ranks must agree with the rational Betti numbers.
    """
    free: Dict[int, int] = {0: 1}
    torsion: Dict[int, List[int]] = {}
    for A in L.nonbottom():
        C = CMComplex(L, A).chain_complex
        snf: Dict[int, Tuple[int, ...]] = {}
        for p, B in C.boundary.items():
            snf[p] = smith_normal_form(B)
        for p in C.degrees:
            n = len(C.basis[p])
            r_out = len(snf.get(p, ()))
            r_in = snf.get(p + 1, ())
            q = 2 * L.dim(A) - p - 2
            b = n - r_out - len(r_in)
            if b:
                free[q] = free.get(q, 0) + b
            t = [d for d in r_in if d > 1]
            if t:
                # torsion of the cokernel of the map into degree p sits in cohomology degree q
                torsion.setdefault(q, []).extend(t)
    degs = sorted(set(free) | set(torsion))
    return {q: (free.get(q, 0), tuple(sorted(torsion.get(q, [])))) for q in degs}
