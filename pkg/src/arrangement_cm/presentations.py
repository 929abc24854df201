"""Generators and relations: zeta classes of atom sets, the geometric-lattice
presentation, and the k-equal analysis."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .chains import Poset, atoms_to_flags, flag_complex, homology, QChain, add_into
from .lattice import LabeledLattice, LatticeError, is_geometric, kequal_lattice, moebius, sublattice_AB
from .linalg import Echelon, rank
from .ring import GradedRing, LocalCohomology, betti_gm, ring_structure

AtomSet = Tuple[int, ...]


def join_of(L: LabeledLattice, sigma: Sequence[int]) -> int:
    return L.join_all(sigma)


def is_independent(L: LabeledLattice, sigma: Sequence[int]) -> bool:
    """No proper subset has the same join (checking the facets is enough)."""
    J = join_of(L, sigma)
    return all(join_of(L, sigma[:i] + sigma[i + 1:]) != J for i in range(len(sigma)))


def is_rank_independent(L: LabeledLattice, sigma: Sequence[int], rk: Dict[int, int]) -> bool:
    return rk[join_of(L, sigma)] == len(sigma)


def is_essential(L: LabeledLattice, sigma: Sequence[int], top: Optional[int] = None) -> bool:
    return join_of(L, sigma) == (L.top if top is None else top)


def independent_sets(L: LabeledLattice, max_size: int = 8, below: Optional[int] = None) -> List[AtomSet]:
    """Independent atom sets in atom order.  Supersets of dependent sets are dependent, so
    the search only extends independent sets."""
    atoms = L.atoms if below is None else L.atoms_below(below)
    out: List[AtomSet] = []

    def rec(start: int, cur: List[int]):
        for i in range(start, len(atoms)):
            s = tuple(cur + [atoms[i]])
            if not is_independent(L, s):
                continue
            out.append(s)
            if len(s) < max_size:
                rec(i + 1, list(s))

    rec(0, [])
    return out


def shuffle_sign(sigma: Sequence[int], tau: Sequence[int]) -> int:
    """Parity of the permutation sorting sigma followed by tau."""
    inv = sum(1 for a in sigma for b in tau if a > b)
    return -1 if inv % 2 else 1


# ---------------------------------------------------------------------------
# partition statistics


def _blocks(L: LabeledLattice, x: int):
    if L.labels is None:
        raise LatticeError("partition statistics need a partition lattice")
    return L.labels[x].nontrivial_blocks


def rank_of(L: LabeledLattice, sigma: Sequence[int]) -> int:
    """Largest subfamily of sigma whose nontrivial blocks are pairwise disjoint."""
    blocks = [frozenset(b) for x in sigma for b in _blocks(L, x)]
    best = 0

    def rec(i: int, used: frozenset, size: int):
        nonlocal best
        best = max(best, size)
        if size + len(blocks) - i <= best:
            return
        for j in range(i, len(blocks)):
            if not blocks[j] & used:
                rec(j + 1, used | blocks[j], size + 1)

    rec(0, frozenset(), 0)
    return best


def n_of(L: LabeledLattice, sigma: Sequence[int]) -> int:
    return sum(len(b) for b in _blocks(L, join_of(L, sigma)))


def s_of(L: LabeledLattice, sigma: Sequence[int]) -> int:
    return len(_blocks(L, join_of(L, sigma)))


def one_block(L: LabeledLattice, block) -> int:
    block = tuple(sorted(block))
    for x in range(L.n):
        if _blocks(L, x) == (block,):
            return x
    raise LatticeError(f"no element with the single block {block}")


# ---------------------------------------------------------------------------
# zeta classes


@dataclass
class ZetaClass:
    source: AtomSet
    ambient: int
    q: int
    coords: List[Fraction]
    dependent: bool = False
    chain: Optional[QChain] = None

    @property
    def p(self) -> int:
        return len(self.source) - 2

    def is_zero(self) -> bool:
        return not any(self.coords)


def boundary_chain(L: LabeledLattice, sigma: Sequence[int]) -> QChain:
    """Image in the flag complex of the cycle sum_i (-1)^i (sigma minus its i-th atom), i from 1."""
    sigma = tuple(sigma)
    out: Dict = {}
    for i in range(len(sigma)):
        face = sigma[:i] + sigma[i + 1:]
        for F, a in atoms_to_flags(L, face).coeffs.items():
            add_into(out, F, (-1) ** (i + 1) * a)
    return QChain(len(sigma) - 2, out)


def zeta(L: LabeledLattice, sigma: Sequence[int], local: Optional[LocalCohomology] = None) -> ZetaClass:
    sigma = tuple(sorted(sigma, key=L.atoms.index))
    local = local or LocalCohomology(L)
    A = join_of(L, sigma)
    q = 2 * L.dim(A) - len(sigma)
    betti = local.betti(A).get(q, 0)
    if not is_independent(L, sigma):
        return ZetaClass(sigma, A, q, [Fraction(0)] * betti, dependent=True)
    ch = boundary_chain(L, sigma)
    x = {F + (A,): a for F, a in ch.coeffs.items()}
    coords = local.reduce(A, q, x)
    return ZetaClass(sigma, A, q, coords, chain=ch)


def zeta_global(R: GradedRing, z: ZetaClass) -> Dict[int, Fraction]:
    return R.embed(z.ambient, z.q, z.coords)


# ---------------------------------------------------------------------------
# geometric lattices


@dataclass
class PresentationReport:
    generators: List[Tuple[AtomSet, int]]
    linear_relations: int
    multiplicative_relations: int
    betti_presentation: Dict[int, int]
    betti_moebius: Dict[int, int]
    betti_ring: Dict[int, int]
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.betti_presentation == self.betti_moebius == self.betti_ring

    def to_json(self) -> dict:
        return {
            "generators": [{"atoms": list(s), "q": q} for s, q in self.generators],
            "linear_relations": self.linear_relations,
            "multiplicative_relations": self.multiplicative_relations,
            "betti_presentation": {str(k): v for k, v in self.betti_presentation.items()},
            "betti_moebius": {str(k): v for k, v in self.betti_moebius.items()},
            "betti_ring": {str(k): v for k, v in self.betti_ring.items()},
            "failures": self.failures,
            "ok": self.ok,
        }


def moebius_betti(L: LabeledLattice, rk: Dict[int, int]) -> Dict[int, int]:
    out: Dict[int, int] = {}
    for A in range(L.n):
        mu = abs(moebius(L, L.bottom, A))
        if mu:
            q = 2 * L.dim(A) - rk[A]
            out[q] = out.get(q, 0) + mu
    return dict(sorted(out.items()))


def geometric_presentation(L: LabeledLattice, R: Optional[GradedRing] = None,
                           local: Optional[LocalCohomology] = None) -> PresentationReport:
    ok, rk = is_geometric(L)
    if not ok:
        raise LatticeError("lattice is not geometric")
    local = local or LocalCohomology(L)
    R = R or ring_structure(L, local)
    failures: List[str] = []
    atoms = L.atoms

    # both notions of independence agree on geometric lattices
    for s in range(1, len(atoms) + 1):
        for sigma in combinations(atoms, s):
            if is_independent(L, sigma) != is_rank_independent(L, sigma, rk):
                failures.append(f"independence notions disagree on {sigma}")

    gens = [s for s in independent_sets(L, max_size=len(atoms)) if is_rank_independent(L, s, rk)]
    zetas = {s: zeta(L, s, local) for s in gens}
    gvec = {s: zeta_global(R, z) for s, z in zetas.items()}
    by_top: Dict[int, List[AtomSet]] = {}
    for s in gens:
        by_top.setdefault(join_of(L, s), []).append(s)

    # linear relations from dependent (p+1)-sets below each A
    nlin = 0
    pres: Dict[int, int] = {0: 1}
    for A, gs in by_top.items():
        p = rk[A]
        pos = {s: i for i, s in enumerate(gs)}
        E = Echelon()
        for tau in combinations(L.atoms_below(A), p + 1):
            if is_independent(L, tau):
                continue
            rel: Dict[int, int] = {}
            val: Dict[int, Fraction] = {}
            for j in range(p + 1):
                face = tau[:j] + tau[j + 1:]
                if face in pos:
                    sgn = (-1) ** (j + 1)
                    add_into(rel, pos[face], sgn)
                    for k, v in gvec[face].items():
                        add_into(val, k, sgn * v)
            if not rel:
                continue
            nlin += 1
            E.add(rel)
            if val:
                failures.append(f"linear relation from {tau} does not vanish")
        q = 2 * L.dim(A) - p
        pres[q] = pres.get(q, 0) + len(gs) - len(E)
        span = rank([gvec[s] for s in gs])
        if span != local.betti(A).get(q, 0):
            failures.append(f"zeta classes below {A} span {span} of {local.betti(A).get(q, 0)}")

    # multiplicative relations
    nmul = 0
    for s in gens:
        for t in gens:
            A, B = join_of(L, s), join_of(L, t)
            prod = R.multiply(gvec[s], gvec[t])
            nmul += 1
            if L.dim(L.join(A, B)) == L.dim(A) + L.dim(B) and not set(s) & set(t):
                u = tuple(sorted(s + t, key=atoms.index))
                want = {k: shuffle_sign(s, t) * v for k, v in zeta_global(R, zeta(L, u, local)).items()}
            else:
                want = {}
            if prod != want:
                failures.append(f"product of zeta{s} and zeta{t}")
    return PresentationReport(
        generators=[(s, 2 * L.dim(join_of(L, s)) - len(s)) for s in gens],
        linear_relations=nlin,
        multiplicative_relations=nmul,
        betti_presentation=dict(sorted((q, b) for q, b in pres.items() if b)),
        betti_moebius=moebius_betti(L, rk),
        betti_ring=R.betti,
        failures=failures,
    )


# ---------------------------------------------------------------------------
# k-equal lattices


def nonvanishing_degrees(L: LabeledLattice) -> List[int]:
    C = flag_complex(Poset.proper_part(L))
    return sorted(p for p, b in C.betti_numbers().items() if b)


def predicted_degrees(n: int, k: int) -> List[int]:
    return sorted(n - 3 - t * (k - 2) for t in range(1, n // k + 1))


def essential_span(L: LabeledLattice, local: Optional[LocalCohomology] = None, max_size: int = 8) -> Dict[int, Tuple[int, int]]:
    """Per degree p: (rank spanned by zeta of independent essential sets, Betti number of the proper part)."""
    local = local or LocalCohomology(L)
    top = L.top
    spans: Dict[int, Echelon] = {}
    for s in independent_sets(L, max_size=max_size):
        if join_of(L, s) != top:
            continue
        z = zeta(L, s, local)
        spans.setdefault(z.p, Echelon()).add({i: c for i, c in enumerate(z.coords) if c})
    betti = flag_complex(Poset.proper_part(L)).betti_numbers()
    out = {}
    for p in sorted(set(spans) | {p for p, b in betti.items() if b}):
        out[p] = (len(spans[p]) if p in spans else 0, betti.get(p, 0))
    return out


def generated_subring(R: GradedRing, gens: List[Dict[int, Fraction]]) -> int:
    """Dimension of the subalgebra generated by the unit and ``gens``."""
    E = Echelon()
    basis: List[Dict[int, Fraction]] = []
    for v in [{0: Fraction(1)}] + gens:
        if E.add(v):
            basis.append(v)
    frontier = list(basis)
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = R.multiply(x, g)
                if y and E.add(y):
                    new.append(y)
        basis.extend(new)
        frontier = new
    return len(E)


def disconnected_check(L: LabeledLattice) -> List[str]:
    """Homology below a multi-block element is the graded tensor product of the one-block pieces."""
    failures = []
    cache: Dict[int, Dict[int, int]] = {}

    def bet(x):
        if x not in cache:
            cache[x] = {p: b for p, b in flag_complex(Poset.open_interval(L, L.bottom, x)).betti_numbers().items() if b}
        return cache[x]

    for U in L.nonbottom():
        blocks = _blocks(L, U)
        s = len(blocks)
        if s < 2:
            continue
        parts = [bet(one_block(L, b)) for b in blocks]
        conv = {0: 1}
        for d in parts:
            nxt: Dict[int, int] = {}
            for a, x in conv.items():
                for b, y in d.items():
                    nxt[a + b] = nxt.get(a + b, 0) + x * y
            conv = nxt
        want = {p + 2 * (s - 1): v for p, v in conv.items() if v}
        if bet(U) != want:
            failures.append(f"element {U}: {bet(U)} != {want}")
    return failures


def xi_surjectivity(L: LabeledLattice, n: int, k: int) -> Dict[int, Tuple[int, int]]:
    """Per p < n-k-1: (rank of the images of the sublattices L_{A,B}, Betti number of the proper part)."""
    Pi = flag_complex(Poset.proper_part(L))
    pairs = []
    ones = [x for x in L.nonbottom() if len(_blocks(L, x)) == 1]
    for A, B in combinations(ones, 2):
        a, b = set(_blocks(L, A)[0]), set(_blocks(L, B)[0])
        if a | b == set(range(1, n + 1)) and len(a & b) == 1:
            pairs.append((A, B))
    out = {}
    for p in range(-1, n - k - 1):
        H = homology(Pi, p)
        E = Echelon()
        for A, B in pairs:
            sub = sublattice_AB(L, A, B)
            inc = sub.parent
            Hs = homology(flag_complex(Poset.proper_part(sub)), p)
            for r in Hs.reps:
                img = QChain(p, {tuple(inc[x] for x in F): c for F, c in r.coeffs.items()})
                E.add({i: c for i, c in enumerate(H.reduce(img)) if c})
        out[p] = (len(E), H.betti)
    return out


@dataclass
class KEqualReport:
    n: int
    k: int
    betti: Dict[int, int]
    table: List[dict]
    checks: Dict[str, bool]
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "betti": {str(q): b for q, b in self.betti.items()},
            "table": self.table,
            "checks": self.checks,
            "details": {k: v for k, v in self.details.items()},
        }


def kequal_analysis(n: int, k: int, ells: Sequence[int] = (1, 2), cap: int = 7,
                    full: bool = True, ring: bool = True, max_atoms: int = 8) -> KEqualReport:
    if n > cap:
        raise ValueError(f"n = {n} exceeds the cap {cap}")
    L = kequal_lattice(n, k)
    local = LocalCohomology(L)
    checks: Dict[str, bool] = {}
    details: Dict[str, object] = {}
    betti = betti_gm(L)

    # (a) table rows, and (b) vanishing outside the dimension count
    sets = independent_sets(L, max_size=max_atoms)
    zetas = {s: zeta(L, s, local) for s in sets}
    groups: Dict[Tuple, Dict[int, Echelon]] = {}
    violations = []
    for s, z in zetas.items():
        U = z.ambient
        r, sb, nn = rank_of(L, s), s_of(L, s), n_of(L, s)
        if len(s) != nn - r * (k - 2) - sb and not z.is_zero():
            violations.append(list(s))
        key = (L.dim(U), len(s), len(s) - 2, r, sb, nn, z.q)
        groups.setdefault(key, {}).setdefault(U, Echelon()).add({i: c for i, c in enumerate(z.coords) if c})
    table = []
    for key in sorted(groups, key=lambda t: (t[6], t[3], t[0])):
        dim = sum(len(E) for E in groups[key].values())
        if dim:
            table.append(dict(zip(("dimU", "size", "p", "rank", "s", "n", "q", "dim"), key + (dim,))))
    checks["vanishing"] = not violations
    details["vanishing_violations"] = violations

    # (e) rank-one basis from explicit sets sigma(a)
    rank1_ok = True
    counts = {}
    for U in L.nonbottom():
        blocks = _blocks(L, U)
        if len(blocks) != 1:
            continue
        b = blocks[0]
        m = len(b)
        span = Echelon()
        for s, z in zetas.items():
            if z.ambient == U and len(s) == m - k + 1 and rank_of(L, s) == 1:
                span.add({i: c for i, c in enumerate(z.coords) if c})
        E = Echelon()
        good = True
        for a in combinations(b[1:], k - 1):
            sig = tuple(sorted((one_block(L, set(a) | {i}) for i in b if i not in a), key=L.atoms.index))
            z = zeta(L, sig, local)
            v = {i: c for i, c in enumerate(z.coords) if c}
            good &= E.add(v) and span.contains(v)
        want = comb(m - 1, k - 1)
        counts[m] = (len(E), want)
        rank1_ok &= good and len(E) == want == len(span)
    checks["rank1_basis"] = rank1_ok
    details["rank1_basis_counts"] = {str(m): list(v) for m, v in sorted(counts.items())}

    # (f) tensor decomposition below multi-block elements
    fail = disconnected_check(L)
    checks["disconnected"] = not fail
    details["disconnected_failures"] = fail

    # nonvanishing degrees of the whole lattice
    got, want = nonvanishing_degrees(L), predicted_degrees(n, k)
    checks["nonvanishing_degrees"] = got == want
    details["nonvanishing_degrees"] = got

    # (c) independent essential sets span the homology of the l-variants
    if full:
        span_ok = True
        sp = {}
        for ell in ells:
            try:
                Lel = kequal_lattice(n, k, ell)
            except LatticeError:
                continue
            res = essential_span(Lel, max_size=max_atoms)
            sp[str(ell)] = {str(p): list(v) for p, v in res.items()}
            span_ok &= all(a == b for a, b in res.values())
        res0 = essential_span(L, local, max_size=max_atoms)
        sp["0"] = {str(p): list(v) for p, v in res0.items()}
        span_ok &= all(a == b for a, b in res0.values())
        checks["essential_span"] = span_ok
        details["essential_span"] = sp

        # (g) the sublattices L_{A,B} carry all homology below the top degree
        xi = xi_surjectivity(L, n, k)
        checks["xi_surjective"] = all(a == b for a, b in xi.values())
        details["xi"] = {str(p): list(v) for p, v in xi.items()}

    # (d) rank-one classes generate the ring
    if ring:
        R = ring_structure(L, local)
        gens = [zeta_global(R, z) for s, z in zetas.items() if rank_of(L, s) == 1 and not z.is_zero()]
        sub = generated_subring(R, gens)
        total = sum(R.betti.values())
        checks["rank1_generation"] = sub == total
        details["rank1_generation"] = [sub, total]
        checks["betti_cm"] = R.betti == betti
    return KEqualReport(n, k, betti, table, checks, details)
