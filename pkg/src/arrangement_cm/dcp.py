"""Degree-truncated reference implementation of the full model M(X).

M(X) is the free graded-commutative algebra on ``e_A`` (degree 1) and ``c_A``
(degree 2), one pair per non-bottom element, with ``d e_A = c_A``, modulo the
ideal J of the relations ``r(X1, X2, B)``.  Only desk-scale lattices are in
reach: each degree slice is handled by plain linear algebra.

Any monomial whose support is not a chain lies in J, so the free algebra is
replaced throughout by its span of chain-supported monomials; products that
leave that span are dropped on the spot.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .chains import Poset, add_into, flags_of
from .cm import cm_differential, cm_product, critical_monomials
from .lattice import LabeledLattice
from .linalg import Echelon, QMatrix, rank, rref

# A monomial is (E, C): E is a strictly increasing tuple of element indices
# (the exterior letters, in canonical order), C a sorted tuple of (element, exponent).
Mono = Tuple[Tuple[int, ...], Tuple[Tuple[int, int], ...]]
Poly = Dict[Mono, Fraction]

ONE: Mono = ((), ())


class TruncationOverflow(RuntimeError):
    pass


class IdealNotClosed(RuntimeError):
    pass


class TruncationTooSmall(ValueError):
    pass


def mono_degree(m: Mono) -> int:
    return len(m[0]) + 2 * sum(k for _, k in m[1])


def mono_support(m: Mono) -> set:
    return set(m[0]) | {a for a, _ in m[1]}


def weight(L: LabeledLattice, m: Mono) -> int:
    return sum(L.dim(a) for a in m[0]) + 2 * sum(k * L.dim(b) for b, k in m[1])


def _is_chain(L: LabeledLattice, elems) -> bool:
    el = sorted(elems, key=L.dim)
    return all(L.lt(a, b) for a, b in zip(el, el[1:]))


def mono_mul(L: LabeledLattice, m1: Mono, m2: Mono) -> Optional[Tuple[int, Mono]]:
    """Product of two monomials as (sign, monomial), or None when it vanishes modulo non-chains."""
    E1, C1 = m1
    E2, C2 = m2
    if set(E1) & set(E2):
        return None
    if not _is_chain(L, mono_support(m1) | mono_support(m2)):
        return None
    inv = 0
    for a in E1:
        for b in E2:
            if a > b:
                inv += 1
    E = tuple(sorted(E1 + E2))
    C = dict(C1)
    for b, k in C2:
        C[b] = C.get(b, 0) + k
    return (-1 if inv % 2 else 1), (E, tuple(sorted(C.items())))


def poly_mul(L: LabeledLattice, p1: Poly, p2: Poly) -> Poly:
    out: Poly = {}
    for m1, a in p1.items():
        for m2, b in p2.items():
            r = mono_mul(L, m1, m2)
            if r is not None:
                add_into(out, r[1], r[0] * a * b)
    return out


def poly_add(p1: Poly, p2: Poly, scale=1) -> Poly:
    out = dict(p1)
    for m, a in p2.items():
        add_into(out, m, scale * a)
    return out


def poly_pow(L: LabeledLattice, p: Poly, k: int) -> Poly:
    out: Poly = {ONE: Fraction(1)}
    for _ in range(k):
        out = poly_mul(L, out, p)
    return out


def poly_d(p: Poly) -> Poly:
    out: Poly = {}
    for (E, C), a in p.items():
        for i, x in enumerate(E):
            Cd = dict(C)
            Cd[x] = Cd.get(x, 0) + 1
            add_into(out, (E[:i] + E[i + 1:], tuple(sorted(Cd.items()))), (-1) ** i * a)
    return out


def poly_degree(p: Poly) -> Optional[int]:
    degs = {mono_degree(m) for m in p}
    if len(degs) > 1:
        raise ValueError("inhomogeneous element")
    return degs.pop() if degs else None


def e(A: int) -> Poly:
    return {((A,), ()): Fraction(1)}


def c(A: int) -> Poly:
    return {((), ((A, 1),)): Fraction(1)}


def sigma(L: LabeledLattice, A: int) -> Poly:
    return {((), ((C, 1),)): Fraction(1) for C in [A] + L.above(A)}


def tau(L: LabeledLattice, A: int) -> Poly:
    return {((C,), ()): Fraction(1) for C in [A] + L.above(A)}


# ---------------------------------------------------------------------------
# relations


@dataclass(frozen=True)
class Relation:
    X1: Tuple[int, ...]
    X2: Tuple[int, ...]
    B: int
    exponent: int

    def poly(self, L: LabeledLattice) -> Poly:
        p: Poly = {ONE: Fraction(1)}
        for A in self.X1:
            p = poly_mul(L, p, e(A))
        for A in self.X2:
            p = poly_mul(L, p, c(A))
        return poly_mul(L, p, poly_pow(L, sigma(L, self.B), self.exponent))

    def degree(self) -> int:
        return len(self.X1) + 2 * len(self.X2) + 2 * self.exponent


def relation_generators(L: LabeledLattice, minimal: bool = False) -> List[Relation]:
    """All r(X1, X2, B): B strictly above every element of Y = X1 u X2, exponent dim B - dim(join Y).

    With ``minimal`` only |Y| <= 1 is produced; every other generator is a
    multiple of one of these or has non-chain support.
    """
    out = []
    for B in L.nonbottom():
        below = [A for A in L.nonbottom() if L.lt(A, B)]
        sizes = range(0, 2) if minimal else range(0, len(below) + 1)
        for s in sizes:
            for Y in combinations(below, s):
                d = L.dim(B) - L.dim(L.join_all(Y))
                for mask in range(1 << s):
                    X1 = tuple(Y[i] for i in range(s) if mask >> i & 1)
                    X2 = tuple(Y[i] for i in range(s) if not mask >> i & 1)
                    out.append(Relation(X1, X2, B, d))
    return out


# ---------------------------------------------------------------------------
# chain-supported monomials


def chains(L: LabeledLattice) -> List[Tuple[int, ...]]:
    fl = flags_of(Poset(L.nonbottom(), L.lt))
    return [f for p in sorted(fl) for f in fl[p]]


def flag_monomials(L: LabeledLattice, r: int, all_chains=None) -> List[Mono]:
    out = []
    for F in all_chains if all_chains is not None else chains(L):

        def rec(i: int, left: int, E: list, C: list):
            if i == len(F):
                if left == 0:
                    out.append((tuple(sorted(E)), tuple(sorted(C))))
                return
            A = F[i]
            for ine in (0, 1):
                for k in range(0, (left - ine) // 2 + 1):
                    if not ine and not k:
                        continue
                    if ine:
                        E.append(A)
                    if k:
                        C.append((A, k))
                    rec(i + 1, left - ine - 2 * k, E, C)
                    if ine:
                        E.pop()
                    if k:
                        C.pop()

        rec(0, r, [], [])
    return sorted(set(out))


class TruncatedQuotient:
    """Slices M_r for r <= D: monomial bases, ideal slices in RREF, and normal forms."""

    def __init__(self, L: LabeledLattice, D: int, cap: int = 200000, check: bool = True):
        self.lattice = L
        self.D = D
        ch = chains(L)
        self.monos: Dict[int, List[Mono]] = {}
        self.index: Dict[int, Dict[Mono, int]] = {}
        for r in range(D + 1):
            ms = flag_monomials(L, r, ch)
            if len(ms) > cap:
                raise TruncationOverflow(f"{len(ms)} monomials in degree {r} exceed the cap {cap}")
            self.monos[r] = ms
            self.index[r] = {m: i for i, m in enumerate(ms)}
        gens = [(g, g.poly(L)) for g in relation_generators(L, minimal=True)]
        self.ideal: Dict[int, QMatrix] = {}
        self.pivots: Dict[int, List[int]] = {}
        self._pivot_row: Dict[int, Dict[int, dict]] = {}
        self.basis: Dict[int, List[int]] = {}
        self.basis_pos: Dict[int, Dict[int, int]] = {}
        for r in range(D + 1):
            rows = []
            for g, gp in gens:
                dg = g.degree()
                if dg > r:
                    continue
                for m in self.monos[r - dg]:
                    v = self.vector(r, poly_mul(self.lattice, gp, {m: Fraction(1)}))
                    if v:
                        rows.append(v)
            R, piv, _ = rref(QMatrix(len(rows), len(self.monos[r]), rows))
            self.ideal[r] = R
            self.pivots[r] = piv
            self._pivot_row[r] = {p: R.rows[i] for i, p in enumerate(piv)}
            ps = set(piv)
            self.basis[r] = [i for i in range(len(self.monos[r])) if i not in ps]
            self.basis_pos[r] = {j: k for k, j in enumerate(self.basis[r])}
        if check:
            bad = self.check_ideal_closed()
            if bad:
                raise IdealNotClosed(bad[0])

    def dim(self, r: int) -> int:
        self._need(r)
        return len(self.basis[r])

    def _need(self, r: int):
        if r > self.D:
            raise TruncationTooSmall(f"degree {r} exceeds the truncation degree {self.D}")

    def vector(self, r: int, p: Poly) -> Dict[int, Fraction]:
        idx = self.index[r]
        out: Dict[int, Fraction] = {}
        for m, a in p.items():
            if mono_degree(m) != r:
                raise ValueError(f"monomial {m} is not in degree {r}")
            add_into(out, idx[m], a)
        return out

    def normal_form(self, r: int, p: Poly) -> Dict[int, Fraction]:
        """Coordinates of the class of ``p`` in the basis of degree-r cosets."""
        self._need(r)
        v = self.vector(r, p)
        prow = self._pivot_row[r]
        out = dict(v)
        for col, a in v.items():
            row = prow.get(col)
            if row is None:
                continue
            for j, b in row.items():
                add_into(out, j, -a * b)
        pos = self.basis_pos[r]
        return {pos[j]: a for j, a in out.items()}

    def is_zero(self, r: int, p: Poly) -> bool:
        return not self.normal_form(r, p)

    def basis_monomials(self, r: int) -> List[Mono]:
        return [self.monos[r][j] for j in self.basis[r]]

    def d_matrix(self, r: int) -> QMatrix:
        """Differential M_r -> M_{r+1} on the coset bases."""
        self._need(r + 1)
        rows = [self.normal_form(r + 1, poly_d({m: Fraction(1)})) for m in self.basis_monomials(r)]
        return QMatrix(len(rows), self.dim(r + 1), rows)

    def check_ideal_closed(self) -> List[str]:
        bad = []
        for r in range(self.D):
            for row in self.ideal[r].rows:
                p = {self.monos[r][j]: a for j, a in row.items()}
                if self.normal_form(r + 1, poly_d(p)):
                    bad.append(f"d(J) not contained in J in degree {r}")
                    break
        return bad

    def cohomology(self, q: int) -> int:
        self._need(q + 1)
        out_rank = rank(self.d_matrix(q))
        in_rank = rank(self.d_matrix(q - 1)) if q > 0 else 0
        return self.dim(q) - out_rank - in_rank


def truncated_quotient(L: LabeledLattice, D: int, cap: int = 200000) -> TruncatedQuotient:
    return TruncatedQuotient(L, D, cap)


# ---------------------------------------------------------------------------
# basic monomials in sigma/tau


@dataclass(frozen=True, order=True)
class BasicMonomial:
    T: Tuple[int, ...]
    m: Tuple[Tuple[int, int], ...]

    @property
    def S(self) -> Tuple[int, ...]:
        return tuple(a for a, _ in self.m)

    def exponent(self, A: int) -> int:
        return dict(self.m).get(A, 0)

    def degree(self) -> int:
        return len(self.T) + 2 * sum(k for _, k in self.m)

    def support(self, L: LabeledLattice) -> List[int]:
        return sorted(set(self.T) | set(self.S), key=L.dim)


def predecessor_dims(L: LabeledLattice, chain: Sequence[int]) -> Dict[int, int]:
    out = {}
    prev = L.dim(L.bottom)
    for A in chain:
        out[A] = prev
        prev = L.dim(A)
    return out


def sigma_tau_expand(L: LabeledLattice, b: BasicMonomial) -> Poly:
    p: Poly = {ONE: Fraction(1)}
    for A in b.T:
        p = poly_mul(L, p, tau(L, A))
    for A, k in b.m:
        p = poly_mul(L, p, poly_pow(L, sigma(L, A), k))
    return p


def basic_monomials(L: LabeledLattice, r: int) -> List[BasicMonomial]:
    out = []
    for F in chains(L):
        F = tuple(sorted(F, key=L.dim))
        pd = predecessor_dims(L, F)

        def rec(i: int, left: int, T: list, m: list):
            if i == len(F):
                if left == 0:
                    out.append(BasicMonomial(tuple(T), tuple(m)))
                return
            A = F[i]
            kmax = L.dim(A) - pd[A] - 1
            for inT in (0, 1):
                for k in range(0, min(kmax, (left - inT) // 2) + 1):
                    if not inT and not k:
                        continue
                    if inT:
                        T.append(A)
                    if k:
                        m.append((A, k))
                    rec(i + 1, left - inT - 2 * k, T, m)
                    if inT:
                        T.pop()
                    if k:
                        m.pop()

        rec(0, r, [], [])
    return sorted(out)


def critical_elements(L: LabeledLattice, b: BasicMonomial) -> List[int]:
    pd = predecessor_dims(L, b.support(L))
    return [B for B in b.T if b.exponent(B) == L.dim(B) - pd[B] - 1]


def is_critical(L: LabeledLattice, b: BasicMonomial) -> bool:
    return set(b.S) <= set(b.T) and len(critical_elements(L, b)) == len(b.T)


def norm(L: LabeledLattice, b: BasicMonomial) -> int:
    """|b|: support elements that are not critical."""
    return len(set(b.support(L)) - set(critical_elements(L, b)))


def critical_basic(L: LabeledLattice, T: Sequence[int]) -> BasicMonomial:
    pd = predecessor_dims(L, T)
    m = tuple((A, L.dim(A) - pd[A] - 1) for A in T if L.dim(A) - pd[A] - 1 > 0)
    return BasicMonomial(tuple(T), m)


def homotopy_h(L: LabeledLattice, b: BasicMonomial, strict: bool = True) -> Dict[BasicMonomial, int]:
    if strict and norm(L, b) == 0:
        raise ValueError("homotopy is defined on non-critical monomials only")
    out: Dict[BasicMonomial, int] = {}
    Tset = set(b.T)
    for A, k in b.m:
        if A in Tset:
            continue
        sgn = (-1) ** sum(1 for B in b.T if L.lt(B, A))
        T = tuple(sorted(b.T + (A,), key=L.dim))
        m = tuple((x, j - 1 if x == A else j) for x, j in b.m if not (x == A and j == 1))
        add_into(out, BasicMonomial(T, m), sgn)
    return out


class BasicBasis:
    """Basic monomials of one degree together with their coordinates in a quotient slice."""

    def __init__(self, Q: TruncatedQuotient, r: int):
        self.r = r
        self.monomials = basic_monomials(Q.lattice, r)
        self.quotient = Q
        self._echelon = Echelon()
        self.independent = True
        for i, b in enumerate(self.monomials):
            v = Q.normal_form(r, sigma_tau_expand(Q.lattice, b))
            if not self._echelon.add(v, tag=i):
                self.independent = False

    def express(self, v: Dict[int, Fraction]) -> Dict[BasicMonomial, Fraction]:
        coords = self._echelon.express(v)
        if coords is None:
            raise AssertionError(f"element outside the span of basic monomials in degree {self.r}")
        return {self.monomials[i]: a for i, a in coords.items() if a}


class DCPModel:
    """A truncated quotient plus cached basic-monomial bases."""

    def __init__(self, L: LabeledLattice, D: int, cap: int = 200000):
        self.lattice = L
        self.D = D
        self.Q = TruncatedQuotient(L, D, cap)
        self._bases: Dict[int, BasicBasis] = {}

    def basic(self, r: int) -> BasicBasis:
        if r not in self._bases:
            self._bases[r] = BasicBasis(self.Q, r)
        return self._bases[r]

    def nf(self, r: int, p: Poly) -> Dict[int, Fraction]:
        return self.Q.normal_form(r, p)

    def expand_combo(self, combo: Dict[BasicMonomial, Fraction]) -> Poly:
        out: Poly = {}
        for b, a in combo.items():
            out = poly_add(out, sigma_tau_expand(self.lattice, b), a)
        return out

    def d_basic(self, b: BasicMonomial) -> Dict[BasicMonomial, Fraction]:
        r = b.degree()
        v = self.nf(r + 1, poly_d(sigma_tau_expand(self.lattice, b)))
        return self.basic(r + 1).express(v)

    # -- checks; each returns a list of failure descriptions

    def check_basis_counts(self) -> List[str]:
        bad = []
        for r in range(self.D + 1):
            B = self.basic(r)
            if len(B.monomials) != self.Q.dim(r) or not B.independent:
                bad.append(f"degree {r}: {len(B.monomials)} basic monomials, slice dimension {self.Q.dim(r)}")
        return bad

    def check_homotopy(self, max_degree: Optional[int] = None) -> Tuple[int, List[str]]:
        L = self.lattice
        top = self.D - 1 if max_degree is None else min(max_degree, self.D - 1)
        bad = []
        count = 0
        for r in range(top + 1):
            for b in self.basic(r).monomials:
                n = norm(L, b)
                if n == 0:
                    continue
                count += 1
                hd: Dict[BasicMonomial, Fraction] = {}
                for x, a in self.d_basic(b).items():
                    for y, s in homotopy_h(L, x, strict=False).items():
                        add_into(hd, y, a * s)
                dh = poly_d(self.expand_combo(homotopy_h(L, b)))
                lhs = poly_add(self.expand_combo(hd), dh)
                diff = poly_add(lhs, sigma_tau_expand(L, b), -n)
                if self.nf(r, diff):
                    bad.append(f"identity fails for {b}")
        return count, bad

    def check_differential(self) -> List[str]:
        """d of a critical monomial follows the deletion formula; d keeps CM-perp inside CM-perp."""
        L = self.lattice
        bad = []
        for r in range(self.D):
            for b in self.basic(r).monomials:
                db = self.d_basic(b)
                if is_critical(L, b):
                    want: Dict[BasicMonomial, Fraction] = {}
                    for S, a in cm_differential(L, b.T).items():
                        add_into(want, critical_basic(L, S), a)
                    if db != want:
                        bad.append(f"differential of critical {b.T}")
                elif any(is_critical(L, x) for x in db):
                    bad.append(f"d leaves the complement at {b}")
        return bad

    def check_cm_product(self) -> List[str]:
        L = self.lattice
        bad = []
        flags = [T for A in L.nonbottom() for T in critical_monomials(L, A)]
        deg = {T: 2 * L.dim(T[-1]) - len(T) for T in flags}
        for T1 in flags:
            for T2 in flags:
                r = deg[T1] + deg[T2]
                if r > self.D:
                    continue
                lhs = poly_mul(L, sigma_tau_expand(L, critical_basic(L, T1)), sigma_tau_expand(L, critical_basic(L, T2)))
                rhs: Poly = {}
                for T, a in cm_product(L, T1, T2).items():
                    rhs = poly_add(rhs, sigma_tau_expand(L, critical_basic(L, T)), a)
                if self.nf(r, poly_add(lhs, rhs, -1)):
                    bad.append(f"product of {T1} and {T2}")
        return bad

    def check_w_product(self, max_exponent: int = 1) -> List[str]:
        L = self.lattice
        elems = []
        for F in chains(L):
            F = tuple(sorted(F, key=L.dim))
            for exps in _exponent_vectors(len(F), max_exponent):
                elems.append((F, exps))
        bad = []
        for x in elems:
            for y in elems:
                r = w_degree(x) + w_degree(y)
                if r > self.D:
                    continue
                lhs = poly_mul(L, f_map(L, x), f_map(L, y))
                rhs: Poly = {}
                for z, a in w_product(L, x, y).items():
                    rhs = poly_add(rhs, f_map(L, z), a)
                if self.nf(r, poly_add(lhs, rhs, -1)):
                    bad.append(f"f not multiplicative on {x}, {y}")
        return bad

    def check_tau_relation(self) -> List[str]:
        L = self.lattice
        bad = []
        if self.D < 2:
            return bad
        for A in L.nonbottom():
            for B in L.nonbottom():
                J = L.join(A, B)
                p = poly_mul(L, tau(L, A), tau(L, B))
                p = poly_add(p, poly_mul(L, tau(L, A), tau(L, J)), -1)
                p = poly_add(p, poly_mul(L, tau(L, B), tau(L, J)), 1)
                if self.nf(2, p):
                    bad.append(f"tau relation for {A}, {B}")
        return bad


def _exponent_vectors(n: int, kmax: int) -> Iterator[Tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for rest in _exponent_vectors(n - 1, kmax):
        for k in range(kmax + 1):
            yield rest + (k,)


# ---------------------------------------------------------------------------
# the algebra W of flags with multiplicities, and f : W -> M

WElem = Tuple[Tuple[int, ...], Tuple[int, ...]]


def w_degree(x: WElem) -> int:
    return len(x[0]) + 2 * sum(x[1])


def f_map(L: LabeledLattice, x: WElem) -> Poly:
    T, m = x
    p: Poly = {ONE: Fraction(1)}
    for A in T:
        p = poly_mul(L, p, tau(L, A))
    for A, k in zip(T, m):
        p = poly_mul(L, p, poly_pow(L, sigma(L, A), k))
    return p


def w_product(L: LabeledLattice, x: WElem, y: WElem) -> Dict[WElem, int]:
    (T1, m1), (T2, m2) = x, y
    p, q = len(T1), len(T2)
    out: Dict[WElem, int] = {}
    for pos in combinations(range(p + q), p):
        sgn = -1 if sum(t - i for i, t in enumerate(pos)) % 2 else 1
        ps = set(pos)
        i = j = 0
        flag, mult = [], []
        cur = L.bottom
        ok = True
        for t in range(p + q):
            if t in ps:
                cur = L.join(cur, T1[i])
                k = m1[i]
                i += 1
            else:
                cur = L.join(cur, T2[j])
                k = m2[j]
                j += 1
            if flag and flag[-1] == cur:
                ok = False
                break
            flag.append(cur)
            mult.append(k)
        if ok:
            add_into(out, (tuple(flag), tuple(mult)), sgn)
    return out


# ---------------------------------------------------------------------------
# comparison with CM


def quasi_iso_check(L: LabeledLattice, D: int, model: Optional[DCPModel] = None, local=None) -> Dict[int, dict]:
    """Per degree q <= D-1: cohomology of M, of CM, and whether CM classes stay independent in M."""
    from .ring import LocalCohomology

    model = model or DCPModel(L, D)
    Q = model.Q
    local = local or LocalCohomology(L)
    cm_reps: Dict[int, List[Dict]] = {}
    for A in L.nonbottom():
        for q in local.betti(A):
            cm_reps.setdefault(q, []).extend(local.reps(A, q))
    report = {}
    for q in range(D):
        hM = Q.cohomology(q)
        hCM = 1 if q == 0 else len(cm_reps.get(q, []))
        E = Echelon()
        if q > 0:
            for row in Q.d_matrix(q - 1).rows:
                E.add(row)
        indep = True
        reps = [{(): Fraction(1)}] if q == 0 else cm_reps.get(q, [])
        for x in reps:
            p: Poly = {}
            for T, a in x.items():
                p = poly_add(p, sigma_tau_expand(L, critical_basic(L, T)) if T else {ONE: Fraction(1)}, a)
            v = Q.normal_form(q, p)
            if not E.add(v):
                indep = False
        report[q] = {"M": hM, "CM": hCM, "independent": indep, "ok": hM == hCM and indep}
    return report


def verify_homotopy(L: LabeledLattice, D: int) -> Tuple[int, List[str]]:
    return DCPModel(L, D).check_homotopy()
