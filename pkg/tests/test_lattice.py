import json
import os
from itertools import permutations

import pytest
from hypothesis import given

from arrangement_cm.lattice import (
    LabeledLattice,
    LatticeError,
    Partition,
    SubspaceArrangement,
    builtin,
    canonical_subspace,
    interval,
    intersection_lattice,
    is_geometric,
    join,
    kequal_arrangement,
    kequal_lattice,
    lattice_from_json,
    load_lattice,
    meet,
    moebius,
    rank_of_subspaces,
    sublattice_AB,
)

from conftest import DATA, lattices


def isomorphic(L1: LabeledLattice, L2: LabeledLattice) -> bool:
    """Brute-force labeled-order isomorphism for small lattices."""
    if L1.n != L2.n or sorted(L1.dims) != sorted(L2.dims):
        return False
    for perm in permutations(range(1, L1.n)):
        f = (0,) + perm
        if all(L1.dims[a] == L2.dims[f[a]] for a in range(L1.n)) and all(
            L1.leq(a, b) == L2.leq(f[a], f[b]) for a in range(L1.n) for b in range(L1.n)
        ):
            return True
    return False


def atom_of(L, block):
    return next(a for a in L.atoms if L.labels[a].nontrivial_blocks == (tuple(block),))


# -- construction ---------------------------------------------------------------


def test_three_lines_in_plane():
    L = intersection_lattice(SubspaceArrangement.from_rows(2, [[[1, 0]], [[0, 1]], [[1, 1]]]))
    assert L.n == 5 and len(L.atoms) == 3
    assert [L.dim(a) for a in L.atoms] == [1, 1, 1] and L.dim(L.top) == 2


def test_single_subspace():
    L = intersection_lattice(SubspaceArrangement.from_rows(2, [[[1, 2]]]))
    assert L.n == 2 and L.dims == (0, 1)


def test_zero_subspace_rejected():
    with pytest.raises(LatticeError):
        SubspaceArrangement.from_rows(2, [[[0, 0]]])


def test_duplicate_generators_deduplicated():
    arr = SubspaceArrangement.from_rows(2, [[[1, 0]], [[2, 0]], [[0, 1]]])
    assert len(arr.subspaces) == 2


def test_canonical_form_is_rref():
    assert canonical_subspace([[2, 4], [1, 3]], 2) == ((1, 0), (0, 1))


def test_kequal_4_3_from_subspaces():
    L = intersection_lattice(kequal_arrangement(4, 3))
    assert len(L.atoms) == 4 and all(L.dim(a) == 2 for a in L.atoms) and L.dim(L.top) == 3
    assert isomorphic(L, kequal_lattice(4, 3))


@pytest.mark.parametrize("n,k", [(3, 2), (4, 2), (4, 3), (5, 3), (5, 4), (6, 3), (6, 4)])
def test_kequal_matches_intersection_lattice(n, k):
    K = kequal_lattice(n, k)
    L = intersection_lattice(kequal_arrangement(n, k))
    assert K.n == L.n
    where = {lab: i for i, lab in enumerate(L.labels)}
    f = []
    for p in K.labels:
        rows = []
        for b in p.nontrivial_blocks:
            for j in b[1:]:
                r = [0] * n
                r[b[0] - 1], r[j - 1] = 1, -1
                rows.append(r)
        f.append(where[canonical_subspace(rows, n) if rows else ()])
    assert sorted(f) == list(range(L.n))
    assert all(K.dim(a) == L.dim(f[a]) for a in range(K.n))
    assert all(K.leq(a, b) == L.leq(f[a], f[b]) for a in range(K.n) for b in range(K.n))


def test_kequal_sizes():
    L = kequal_lattice(4, 3)
    assert L.n == 6 and len(L.atoms) == 4
    assert all(L.dim(a) == 2 for a in L.atoms) and L.dim(L.top) == 3
    L = kequal_lattice(6, 3)
    assert L.n == 53
    by_blocks = {}
    for a in L.nonbottom():
        blocks = L.labels[a].nontrivial_blocks
        key = len(blocks[0]) if len(blocks) == 1 else "two"
        by_blocks[key] = by_blocks.get(key, 0) + 1
    assert by_blocks == {3: 20, 4: 15, 5: 6, 6: 1, "two": 10}


def test_kequal_2_is_partition_lattice():
    assert [kequal_lattice(n, 2).n for n in (2, 3, 4, 5)] == [2, 5, 15, 52]


def test_kequal_parameter_errors():
    with pytest.raises(LatticeError):
        kequal_lattice(3, 4)
    with pytest.raises(LatticeError):
        kequal_lattice(4, 1)


def test_partition_validation():
    with pytest.raises(LatticeError):
        Partition(3, ((1, 2), (2, 3)))
    p = Partition.of(5, [[1, 2, 3]])
    assert p.nontrivial_blocks == ((1, 2, 3),) and p.dim == 2 and str(p) == "123"


# -- queries ------------------------------------------------------------------


def test_join_meet_examples():
    L = kequal_lattice(4, 3)
    a, b = atom_of(L, (1, 2, 3)), atom_of(L, (1, 2, 4))
    assert join(L, a, a) == a
    assert join(L, a, b) == L.top
    assert meet(L, a, b) == L.bottom
    assert join(L, L.bottom, a) == a


def test_interval_examples():
    L = kequal_lattice(4, 3)
    assert interval(L, L.bottom, L.top) == L
    I = interval(L, L.bottom, L.atoms[0])
    assert I.n == 2
    with pytest.raises(LatticeError):
        interval(L, L.atoms[0], L.atoms[1])


def test_interval_above_an_atom_of_pi63():
    # the partitions coarser than {123}: the merged block may absorb any of
    # 4, 5, 6, while blocks avoiding it must be trivial or have size >= 3.
    # That is the variant with one distinguished point, not the plain 4-point
    # k-equal lattice.
    L = kequal_lattice(6, 3)
    I = interval(L, atom_of(L, (1, 2, 3)), L.top)
    assert I.n == 9
    assert not isomorphic(I, kequal_lattice(4, 3))
    shifted = LabeledLattice([d - I.dims[0] for d in I.dims], I.up)
    assert isomorphic(shifted, kequal_lattice(4, 3, 1))


def test_sublattice_examples():
    L = kequal_lattice(6, 3)
    a, b = atom_of(L, (1, 2, 3)), atom_of(L, (4, 5, 6))
    S = sublattice_AB(L, a, b)
    assert S.n == 4 and sorted(S.parent) == sorted([L.bottom, a, b, L.join(a, b)])
    assert sublattice_AB(L, a, a).n == 2
    B = builtin("boolean:2")
    assert sublattice_AB(B, B.atoms[0], B.atoms[1]).n == 4
    with pytest.raises(LatticeError):
        sublattice_AB(L, L.bottom, a)


def test_is_geometric():
    B = builtin("boolean:3")
    ok, rk = is_geometric(B)
    assert ok and all(rk[a] == len(B.atoms_below(a)) for a in range(B.n))
    assert is_geometric(kequal_lattice(6, 3))[0] is False
    P = kequal_lattice(4, 2)
    ok, rk = is_geometric(P)
    assert ok and all(rk[a] == 4 - len(P.labels[a].blocks) for a in range(P.n))


def test_moebius_examples():
    L = builtin("braid:3")
    assert moebius(L, 1, 1) == 1
    assert moebius(builtin("oneline"), 0, 1) == -1
    assert moebius(L, L.bottom, L.top) == 2
    with pytest.raises(LatticeError):
        moebius(L, L.top, L.bottom)


def test_nonmonotone_labels_rejected():
    with pytest.raises(LatticeError):
        LabeledLattice.from_leq_pairs([0, 2, 1, 2], [(0, 1), (0, 2), (1, 3), (2, 3)])


def test_non_lattice_rejected():
    # two maximal elements have no join
    with pytest.raises(LatticeError):
        LabeledLattice.from_leq_pairs([0, 1, 1], [(0, 1), (0, 2)])
    # bowtie: two minimal upper bounds
    with pytest.raises(LatticeError):
        LabeledLattice.from_leq_pairs(
            [0, 1, 1, 2, 2, 3], [(1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (4, 5)]
        )


# -- JSON --------------------------------------------------------------------


def test_json_shapes(tmp_path):
    L = load_lattice(os.path.join(DATA, "one_line.json"))
    assert L.dims == (0, 1)
    T = load_lattice(os.path.join(DATA, "torus2.json"))
    assert T.dims == (0, 1, 1, 2) and len(T.atoms) == 2
    p = tmp_path / "x.json"
    p.write_text(json.dumps({"ambient_dim": 2, "subspaces": [[["1/2", "1"]], [["0", "3"]]]}))
    assert load_lattice(str(p)).n == 4


@pytest.mark.parametrize(
    "obj",
    [
        {},
        {"lattice": {"dims": []}},
        {"lattice": {"dims": [1, 2], "leq_pairs": [[0, 1]]}},
        {"lattice": {"dims": [0, -1]}},
        {"lattice": {"dims": [0, 1], "leq_pairs": [[0, 5]]}},
        {"ambient_dim": "2", "subspaces": []},
        {"ambient_dim": 2, "subspaces": [[["x", "1"]]]},
        {"ambient_dim": 2, "subspaces": [[["1"]]]},
    ],
)
def test_bad_json_rejected(obj):
    with pytest.raises(LatticeError):
        lattice_from_json(obj)


def test_invalid_json_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(LatticeError):
        load_lattice(str(p))


@pytest.mark.parametrize("name", ["oneline", "boolean:3", "braid:4", "kequal:5:3", "kequal:5:3:2"])
def test_json_roundtrip(name):
    L = builtin(name)
    M = lattice_from_json(json.loads(json.dumps(L.to_json())))
    assert M.dims == L.dims and M.up == L.up


def test_unknown_builtin():
    for name in ("torus", "boolean:x", "kequal:5"):
        with pytest.raises(LatticeError):
            builtin(name)


# -- properties ----------------------------------------------------------------


def _check_join_meet(L):
    for a in range(L.n):
        for b in range(L.n):
            ub = [c for c in range(L.n) if L.leq(a, c) and L.leq(b, c)]
            least = [c for c in ub if all(L.leq(c, d) for d in ub)]
            assert least == [L.join(a, b)]
            lb = [c for c in range(L.n) if L.leq(c, a) and L.leq(c, b)]
            greatest = [c for c in lb if all(L.leq(d, c) for d in lb)]
            assert greatest == [L.meet(a, b)]


@given(lattices(10))
def test_join_closure_random(L):
    _check_join_meet(L)
    assert all(L.dim(a) < L.dim(b) for a in range(L.n) for b in range(L.n) if L.lt(a, b))


@pytest.mark.parametrize("name", ["boolean:3", "braid:4", "kequal:5:3", "kequal:6:3:1"])
def test_join_closure_builtins(name):
    _check_join_meet(builtin(name))


@pytest.mark.parametrize(
    "arr",
    [SubspaceArrangement.from_rows(3, [[[1, 0, 0]], [[0, 1, 0]], [[0, 0, 1]], [[1, 1, 1]]]),
     kequal_arrangement(4, 2), kequal_arrangement(5, 3)],
)
def test_dimension_of_join_is_rank_of_stacked_matrices(arr):
    L = intersection_lattice(arr)
    for a in range(L.n):
        for b in range(L.n):
            assert L.dim(L.join(a, b)) == rank_of_subspaces(L, [a, b])


@given(lattices(10))
def test_interval_transitivity(L):
    for a in range(L.n):
        for b in L.above(a):
            I = interval(L, a, b)
            for x in range(I.n):
                for y in range(I.n):
                    if I.leq(x, y):
                        J = interval(I, x, y)
                        K = interval(L, I.parent[x], I.parent[y])
                        # parent maps compose back to L
                        assert J.parent == K.parent
                        assert J.dims == K.dims and J.up == K.up
