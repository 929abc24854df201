import pytest
from hypothesis import assume, given

from arrangement_cm.chains import QChain, homology
from arrangement_cm.cm import (
    CMComplex,
    cm_complex,
    cm_degree,
    cm_differential,
    cm_element_product,
    cm_product,
    critical_monomials,
    homogeneous_degree,
    independent,
    is_flag,
)
from arrangement_cm.corpus import small_lattices
from arrangement_cm.lattice import LabeledLattice, builtin
from arrangement_cm.verify import (
    associative_triples,
    check_associativity,
    check_commutativity,
    check_d_squared,
    check_leibniz,
    check_transport,
    passed,
    run_suite,
)

from conftest import lattices


def chain3():
    # 0 < a1 < a2 < a3 with dims 1, 2, 3
    return LabeledLattice.from_leq_pairs([0, 1, 2, 3], [(0, 1), (1, 2), (2, 3)])


def test_differential_examples():
    L = chain3()
    assert cm_differential(L, (1,)) == {}
    assert cm_differential(L, (1, 2)) == {(2,): -1}
    assert cm_differential(L, (1, 2, 3)) == {(2, 3): -1, (1, 3): 1}


def test_differential_raises_degree_and_keeps_top():
    L = builtin("braid:4")
    for A in L.nonbottom():
        for T in critical_monomials(L, A):
            for S in cm_differential(L, T):
                assert S[-1] == A and cm_degree(L, S) == cm_degree(L, T) + 1


def test_product_examples():
    L = builtin("boolean:2")
    a, b = L.atoms
    V = L.top
    assert cm_product(L, (a,), (b,)) == {(a, V): 1, (b, V): -1}
    assert cm_product(L, (a,), (a,)) == {}
    # two planes in a 3-space: dims do not add
    P = builtin("kequal:4:3")
    x, y = P.atoms[:2]
    assert not independent(P, x, y)
    assert cm_product(P, (x,), (y,)) == {}


def test_unit():
    L = builtin("boolean:2")
    assert cm_product(L, (), (1, 3)) == {(1, 3): 1}
    assert cm_product(L, (1, 3), ()) == {(1, 3): 1}


def test_degree_formula_and_length_bound():
    for name in ("boolean:3", "braid:4", "kequal:5:3"):
        L = builtin(name)
        for A in L.nonbottom():
            for T in critical_monomials(L, A):
                assert is_flag(L, T)
                assert cm_degree(L, T) == 2 * L.dim(A) - len(T)
                assert len(T) <= L.dim(A)


def test_cm_complex_is_flag_complex_shifted():
    L = builtin("kequal:5:3")
    for A, C in cm_complex(L).items():
        assert all(T[-1] == A for b in C.chain_complex.basis.values() for T in b)
        for p, b in C.chain_complex.basis.items():
            assert all(len(CMComplex.to_flag(T)) == p + 1 for T in b)
            assert C.p_of(C.q_of(p)) == p


def test_homogeneous_degree():
    L = builtin("boolean:2")
    a, b = L.atoms
    x = cm_product(L, (a,), (b,))
    assert homogeneous_degree(L, x) == 2
    with pytest.raises(ValueError):
        homogeneous_degree(L, {(a,): 1, (a, L.top): 1})


def test_torus_product_spans_top_class():
    L = builtin("boolean:2")
    a, b = L.atoms
    x = cm_element_product(L, {(a,): 1}, {(b,): 1})
    C = CMComplex(L, L.top)
    H = homology(C.chain_complex, C.p_of(2))
    assert H.betti == 1
    assert H.reduce(QChain(H.degree, x)) != [0]


def test_dga_axioms_on_all_small_submodular_lattices():
    for L in small_lattices(6, slack=2, submodular=True):
        assert passed(run_suite(L)), L.dims


def test_leibniz_fails_for_non_submodular_labels():
    L = LabeledLattice.from_leq_pairs([0, 1, 2, 1, 3], [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)])
    assert check_leibniz(L, [((1, 2), (3,))])


@given(lattices(9))
def test_dga_axioms_random(L):
    assume(L.is_submodular)
    flags = [()] + [T for A in L.nonbottom() for T in critical_monomials(L, A)]
    pairs = [(a, b) for a in flags for b in flags]
    assert check_d_squared(L, flags) == []
    assert check_leibniz(L, pairs) == []
    assert check_commutativity(L, pairs) == []
    assert check_transport(L, pairs) == []
    by_top = {A: critical_monomials(L, A) for A in L.nonbottom()}
    assert check_associativity(L, associative_triples(L, by_top)) == []


@given(lattices(9))
def test_d_squared_any_labels(L):
    flags = [T for A in L.nonbottom() for T in critical_monomials(L, A)]
    assert check_d_squared(L, flags) == []
