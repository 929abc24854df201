from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given

from arrangement_cm.chains import (
    ChainComplexQ,
    ComplexError,
    Poset,
    QChain,
    atom_simplices,
    atomic_complex,
    atoms_to_flags,
    flag_complex,
    flags_of,
    homology,
    shuffle_flag_product,
    shuffles,
)
from arrangement_cm.corpus import small_lattices
from arrangement_cm.lattice import LabeledLattice, LatticeError, builtin, kequal_lattice
from arrangement_cm.linalg import QMatrix
from arrangement_cm.verify import check_atoms_to_flags, check_shuffle_leibniz

from conftest import lattices


def reduced_betti(C):
    return {p: b for p, b in C.betti_numbers().items() if b}


def test_empty_poset():
    C = flag_complex(Poset([], lambda a, b: False))
    assert C.basis == {-1: [()]}
    assert reduced_betti(C) == {-1: 1}


def test_antichain_of_four():
    L = kequal_lattice(4, 3)
    assert reduced_betti(flag_complex(Poset.proper_part(L))) == {0: 3}


def test_proper_subsets_of_three_is_a_circle():
    elems = [frozenset(s) for r in (1, 2) for s in combinations(range(3), r)]
    C = flag_complex(Poset(elems, lambda a, b: a < b))
    assert reduced_betti(C) == {1: 1}


def test_atomic_complex_examples():
    assert reduced_betti(atomic_complex(builtin("oneline"))) == {-1: 1}
    C = atomic_complex(builtin("braid:3"))
    assert len(C.basis[0]) == 3 and 1 not in C.basis
    assert reduced_betti(C) == {0: 2}
    assert reduced_betti(atomic_complex(builtin("boolean:3"))) == {1: 1}


def test_atomic_complex_of_pi63():
    L = kequal_lattice(6, 3)
    A = reduced_betti(atomic_complex(L))
    assert A == {1: 10, 2: 10}
    assert A == reduced_betti(flag_complex(Poset.proper_part(L)))


def test_atomic_complex_needs_atomic_lattice():
    L = LabeledLattice.from_leq_pairs([0, 1, 2], [(0, 1), (1, 2)])
    with pytest.raises(LatticeError):
        atomic_complex(L)


def circle():
    # boundary of a triangle, augmented
    basis = {-1: [()], 0: [(0,), (1,), (2,)], 1: [(0, 1), (0, 2), (1, 2)]}
    return flag_complex(Poset(range(3), lambda a, b: False)), ChainComplexQ(
        basis,
        {
            0: QMatrix.from_dense([[1], [1], [1]]),
            1: QMatrix.from_dense([[-1, 1, 0], [-1, 0, 1], [0, -1, 1]]),
        },
    )


def test_homology_of_circle():
    _, C = circle()
    H = homology(C, 1)
    assert H.betti == 1 and len(H.reps) == 1
    z = H.reps[0]
    assert C.d(z).is_zero()
    assert H.reduce(z) == [1]
    assert H.reduce(Fraction(3, 2) * z) == [Fraction(3, 2)]
    H0 = homology(C, 0)
    assert H0.betti == 0
    assert H0.reduce(QChain(0, {(1,): 1, (0,): -1})) == []


def test_reduce_rejects_non_cycles():
    _, C = circle()
    H = homology(C, 1)
    with pytest.raises(ComplexError):
        H.reduce(QChain(1, {(0, 1): 1}))
    with pytest.raises(ComplexError):
        H.reduce(QChain(0, {(0,): 1}))


def test_bad_complex_rejected():
    basis = {0: ["a"], 1: ["e"], 2: ["f"]}
    with pytest.raises(ComplexError):
        ChainComplexQ(basis, {1: QMatrix.from_dense([[1]]), 2: QMatrix.from_dense([[1]])})
    with pytest.raises(ComplexError):
        ChainComplexQ(basis, {1: QMatrix.from_dense([[1, 1]])})


def test_atoms_to_flags_examples():
    L = builtin("boolean:2")
    a, b = L.atoms
    assert atoms_to_flags(L, (a,)).coeffs == {(a,): 1}
    assert atoms_to_flags(L, (a, b)).coeffs == {(a, L.top): 1, (b, L.top): -1}


def test_atoms_to_flags_repetitions_vanish():
    # three lines in a plane: any two atoms already join to the top
    L = builtin("braid:3")
    assert atoms_to_flags(L, L.atoms).is_zero()


def test_shuffle_examples():
    assert list(shuffles(1, 1)) == [((0, 1), 1), ((1, 0), -1)]
    assert len(list(shuffles(2, 3))) == 10
    L = builtin("boolean:2")
    a, b = L.atoms
    assert shuffle_flag_product(L, (), a, (), b).coeffs == {(a,): 1, (b,): -1}
    assert shuffle_flag_product(L, (), a, (), a).is_zero()


def test_shuffle_three_term_example():
    # A1 < A in a boolean lattice, B an independent atom
    L = builtin("boolean:3")
    x, y, z = L.atoms
    A = L.join(x, y)
    got = shuffle_flag_product(L, (x,), A, (), z).coeffs
    xz, top = L.join(x, z), L.top
    assert got == {(x, A): 1, (x, xz): -1, (z, xz): 1}
    assert len(got) == 3
    assert got.keys() <= set(flags_of(Poset.open_interval(L, L.bottom, top))[1])


def test_flags_are_sorted_and_complete():
    L = builtin("braid:4")
    fl = flags_of(Poset.proper_part(L))
    for p, flags in fl.items():
        assert flags == sorted(flags)
        assert all(len(f) == p + 1 for f in flags)
        assert all(L.lt(f[i], f[i + 1]) for f in flags for i in range(len(f) - 1))


def test_atom_simplices_join_below_top():
    L = builtin("boolean:3")
    for p, simplices in atom_simplices(L).items():
        for s in simplices:
            assert L.join_all(s) != L.top and list(s) == sorted(s, key=L.atoms.index)


@given(lattices(10))
def test_d_squared_on_random_flag_complexes(L):
    C = flag_complex(Poset.proper_part(L), check=False)
    for p in C.boundary:
        if p - 1 in C.boundary:
            assert (C.boundary[p] @ C.boundary[p - 1]).is_zero()


@given(lattices(9))
def test_atoms_to_flags_random(L):
    if L.is_atomic and len(L.atoms) <= 8:
        assert check_atoms_to_flags(L) == []


@pytest.mark.parametrize("name", ["boolean:3", "boolean:4", "braid:4", "kequal:5:3", "kequal:6:3"])
def test_atoms_to_flags_builtins(name):
    L = builtin(name)
    if len(L.atoms) <= 8:
        assert check_atoms_to_flags(L) == []
    else:
        P = Poset.proper_part(L)
        assert reduced_betti(atomic_complex(L)) == reduced_betti(flag_complex(P))


def _all_flag_pairs(L):
    flags = [f for A in L.nonbottom() for fl in flags_of(Poset.open_interval(L, L.bottom, A)).values()
             for f in (g + (A,) for g in fl)]
    return [(a, b) for a in flags for b in flags]


def test_shuffle_leibniz_on_small_submodular_lattices():
    for L in small_lattices(6, slack=1, submodular=True):
        assert check_shuffle_leibniz(L, _all_flag_pairs(L)) == []


def test_shuffle_leibniz_needs_submodular_labels():
    # 0 < a < b < top and 0 < c < top with dims 1, 2, 1, 3: the pair (a, c)
    # joins to the top although dim a + dim c < dim top
    L = LabeledLattice.from_leq_pairs([0, 1, 2, 1, 3], [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)])
    assert not L.is_submodular
    assert check_shuffle_leibniz(L, _all_flag_pairs(L))


def test_shuffle_anticommutativity_small_lattices():
    for L in small_lattices(6, slack=0):
        for T1, T2 in _all_flag_pairs(L):
            FA, A, FB, B = T1[:-1], T1[-1], T2[:-1], T2[-1]
            s = (-1) ** ((len(FA) + 1) * (len(FB) + 1))
            x = shuffle_flag_product(L, FA, A, FB, B)
            y = shuffle_flag_product(L, FB, B, FA, A)
            assert x.coeffs == (s * y).coeffs
