"""Invariant suite for the small model and its cross-checks.

Each check returns a list of failure messages; an empty list means pass.
Above ``exhaustive_limit`` lattice elements, pairs and triples of critical
monomials are sampled with a seeded generator instead of enumerated.
"""

from __future__ import annotations

import random
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .chains import (
    Flag,
    Poset,
    atom_simplices,
    atomic_complex,
    atoms_to_flags,
    flag_complex,
    shuffle_flag_product,
)
from .cm import (
    CMElement,
    cm_add,
    cm_d,
    cm_degree,
    cm_differential,
    cm_element_product,
    cm_product,
    critical_monomials,
    independent,
)
from .lattice import LabeledLattice
from .ring import LocalCohomology, betti_cm, betti_gm


def _flags_by_top(L: LabeledLattice) -> Dict[int, List[Flag]]:
    return {A: critical_monomials(L, A) for A in L.nonbottom()}


def _all_flags(by_top: Dict[int, List[Flag]]) -> List[Flag]:
    return [()] + [T for A in sorted(by_top) for T in by_top[A]]


def _show(x: CMElement) -> str:
    return "{" + ", ".join(f"{T}: {v}" for T, v in sorted(x.items())) + "}"


def check_d_squared(L: LabeledLattice, flags: Sequence[Flag]) -> List[str]:
    bad = []
    for T in flags:
        dd = cm_d(L, cm_differential(L, T))
        if dd:
            bad.append(f"d(d{T}) = {_show(dd)}")
    return bad


def check_leibniz(L: LabeledLattice, pairs) -> List[str]:
    bad = []
    for T1, T2 in pairs:
        lhs = cm_d(L, cm_product(L, T1, T2))
        s = -1 if cm_degree(L, T1) % 2 else 1
        rhs = cm_add(
            cm_element_product(L, cm_differential(L, T1), {T2: 1}),
            cm_element_product(L, {T1: 1}, cm_differential(L, T2)),
            s,
        )
        if cm_add(lhs, rhs, -1):
            bad.append(f"Leibniz fails for {T1}, {T2}")
    return bad


def check_commutativity(L: LabeledLattice, pairs) -> List[str]:
    bad = []
    for T1, T2 in pairs:
        s = -1 if (cm_degree(L, T1) * cm_degree(L, T2)) % 2 else 1
        if cm_add(cm_product(L, T1, T2), cm_product(L, T2, T1), -s):
            bad.append(f"graded commutativity fails for {T1}, {T2}")
    return bad


def _top_zero(L: LabeledLattice, A: Optional[int], B: Optional[int]) -> Tuple[bool, Optional[int]]:
    # (is the product forced to vanish, top of the product)
    if A is None:
        return False, B
    if B is None:
        return False, A
    if not independent(L, A, B):
        return True, None
    return False, L.join(A, B)


def check_associativity(L: LabeledLattice, triples) -> List[str]:
    bad = []
    for T1, T2, T3 in triples:
        left = cm_element_product(L, cm_product(L, T1, T2), {T3: 1})
        right = cm_element_product(L, {T1: 1}, cm_product(L, T2, T3))
        if cm_add(left, right, -1):
            bad.append(f"associativity fails for {T1}, {T2}, {T3}")
    return bad


def associative_triples(L: LabeledLattice, by_top: Dict[int, List[Flag]]):
    """Triples whose product is not forced to vanish on both sides by the top-element test."""
    tops: List[Optional[int]] = [None] + sorted(by_top)
    for A, B, C in product(tops, repeat=3):
        z1, AB = _top_zero(L, A, B)
        left_zero = z1 or _top_zero(L, AB, C)[0]
        z2, BC = _top_zero(L, B, C)
        right_zero = z2 or _top_zero(L, A, BC)[0]
        if left_zero and right_zero:
            continue
        for T1 in by_top.get(A, [()]):
            for T2 in by_top.get(B, [()]):
                for T3 in by_top.get(C, [()]):
                    yield T1, T2, T3


def check_transport(L: LabeledLattice, pairs) -> List[str]:
    """The CM product equals the flag shuffle product with the joined top appended."""
    bad = []
    for T1, T2 in pairs:
        if not T1 or not T2:
            continue
        A, B = T1[-1], T2[-1]
        if not independent(L, A, B):
            continue
        C = L.join(A, B)
        sh = shuffle_flag_product(L, T1[:-1], A, T2[:-1], B)
        via = {F + (C,): v for F, v in sh.coeffs.items()}
        if cm_add(cm_product(L, T1, T2), via, -1):
            bad.append(f"shuffle transport fails for {T1}, {T2}")
    return bad


def check_shuffle_leibniz(L: LabeledLattice, pairs) -> List[str]:
    """Boundary of the flag shuffle product, with the product taken below A v B."""
    bad = []

    def bd(F: Flag) -> Dict[Flag, int]:
        out: Dict[Flag, int] = {}
        for i in range(len(F)):
            G = F[:i] + F[i + 1:]
            out[G] = out.get(G, 0) + (-1) ** i
        return out

    def prod(x: Dict[Flag, int], A: int, y: Dict[Flag, int], B: int) -> Dict[Flag, int]:
        out: Dict[Flag, int] = {}
        for F, a in x.items():
            for G, b in y.items():
                for H, c in shuffle_flag_product(L, F, A, G, B).coeffs.items():
                    out[H] = out.get(H, 0) + a * b * c
        return {k: v for k, v in out.items() if v}

    for T1, T2 in pairs:
        if not T1 or not T2:
            continue
        A, B = T1[-1], T2[-1]
        if not independent(L, A, B):
            continue
        FA, FB = T1[:-1], T2[:-1]
        lhs: Dict[Flag, int] = {}
        for H, c in shuffle_flag_product(L, FA, A, FB, B).coeffs.items():
            for G, s in bd(H).items():
                lhs[G] = lhs.get(G, 0) + c * s
        sgn = -1 if (len(FA) + 1) % 2 else 1
        r1 = prod(bd(FA), A, {FB: 1}, B)
        r2 = prod({FA: 1}, A, bd(FB), B)
        for G, v in r1.items():
            lhs[G] = lhs.get(G, 0) - v
        for G, v in r2.items():
            lhs[G] = lhs.get(G, 0) - sgn * v
        if any(lhs.values()):
            bad.append(f"flag shuffle Leibniz fails for {FA} < {A}, {FB} < {B}")
    return bad


def check_gm_cm(L: LabeledLattice, local: Optional[LocalCohomology] = None) -> List[str]:
    gm, cm = betti_gm(L), betti_cm(L, local)
    return [] if gm == cm else [f"GM {gm} != CM {cm}"]


def check_atoms_to_flags(L: LabeledLattice) -> List[str]:
    """Chain-map property of the atoms-to-flags map and equality of Betti numbers."""
    if not L.is_atomic or L.n < 2:
        return []
    bad = []
    P = Poset.proper_part(L)
    F = flag_complex(P)
    A = atomic_complex(L)
    if {p: b for p, b in F.betti_numbers().items() if b} != {p: b for p, b in A.betti_numbers().items() if b}:
        bad.append("atomic and flag complexes have different Betti numbers")
    for p, simplices in atom_simplices(L).items():
        if p < 0:
            continue
        for s in simplices:
            img = atoms_to_flags(L, s)
            lhs = F.d(img)
            rhs: Dict[Flag, int] = {}
            for i in range(len(s)):
                for G, v in atoms_to_flags(L, s[:i] + s[i + 1:]).coeffs.items():
                    rhs[G] = rhs.get(G, 0) + (-1) ** i * v
            diff = dict(lhs.coeffs)
            for G, v in rhs.items():
                diff[G] = diff.get(G, 0) - v
            if any(diff.values()):
                bad.append(f"atoms-to-flags is not a chain map on {s}")
    return bad


def run_suite(L: LabeledLattice, exhaustive_limit: int = 30, samples: int = 400,
              seed: int = 0, dcp_degree: Optional[int] = None) -> Dict[str, List[str]]:
    """All DGA checks, the GM comparison, and optionally the truncated DCP checks."""
    by_top = _flags_by_top(L)
    flags = _all_flags(by_top)
    if L.n <= exhaustive_limit:
        pairs = [(a, b) for a in flags for b in flags]
        triples = list(associative_triples(L, by_top))
    else:
        rng = random.Random(seed)
        pairs = [(rng.choice(flags), rng.choice(flags)) for _ in range(samples)]
        triples = []
        tops = sorted(by_top)
        while len(triples) < samples // 4:
            A, B = rng.sample(tops, 2)
            if not independent(L, A, B):
                continue
            C = rng.choice(tops)
            triples.append((rng.choice(by_top[A]), rng.choice(by_top[B]), rng.choice(by_top[C])))
    out = {
        "d_squared": check_d_squared(L, flags),
        "leibniz": check_leibniz(L, pairs),
        "associativity": check_associativity(L, triples),
        "graded_commutativity": check_commutativity(L, pairs),
        "shuffle_transport": check_transport(L, pairs),
        "shuffle_leibniz": check_shuffle_leibniz(L, pairs),
        "gm_equals_cm": check_gm_cm(L),
    }
    if L.is_atomic and L.n <= exhaustive_limit:
        out["atoms_to_flags"] = check_atoms_to_flags(L)
    if dcp_degree is not None:
        out.update(dcp_suite(L, dcp_degree))
    return out


def dcp_suite(L: LabeledLattice, D: int, model=None, qi=None) -> Dict[str, List[str]]:
    from .dcp import DCPModel, quasi_iso_check

    model = model or DCPModel(L, D)
    qi = qi or quasi_iso_check(L, D, model)
    _, homotopy_bad = model.check_homotopy()
    return {
        "dcp_ideal_closed": model.Q.check_ideal_closed(),
        "dcp_basis_counts": model.check_basis_counts(),
        "dcp_quasi_iso": [f"q={q}: {r}" for q, r in qi.items() if not r["ok"]],
        "dcp_homotopy": homotopy_bad,
        "dcp_differential": model.check_differential(),
        "dcp_cm_product": model.check_cm_product(),
        "dcp_w_product": model.check_w_product(),
        "dcp_tau_relation": model.check_tau_relation(),
    }


def passed(results: Dict[str, List[str]]) -> bool:
    return not any(results.values())
