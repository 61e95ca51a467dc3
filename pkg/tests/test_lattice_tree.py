import itertools

import numpy as np
import pytest

from projgasket.lattice_tree import (
    Basis, ConvergenceError, E_C, E_T, NAMED_BASES, NodeCapError, ProjPoint, TreeOverflowError,
    apply_map, barycenter, canonical_basis, child_basis, children_array, compose_psi, edge_section,
    enumerate_tree, fibonacci_indices, fibonacci_section, format_index, int_det, iter_levels,
    level_index, level_indices, nbonacci_constant, nbonacci_terms, node, parse_index, psi_map,
    resolve_basis, section_limit_point, simplex_basis, subtree_prefixes, tree_size)


def test_child_rule_keeps_ei_and_adds_it_elsewhere():
    b = simplex_basis(2)
    c = child_basis(b, 2)
    assert c.vectors == ((1, 1, 2), (0, 1, 1), (0, 1, 2))


def test_child_index_out_of_range():
    with pytest.raises(ValueError):
        child_basis(simplex_basis(2), 4)


@pytest.mark.parametrize("root", [simplex_basis(2), E_C, E_T, NAMED_BASES["n1"]])
def test_determinant_preserved(root):
    d = root.det()
    for _, b in enumerate_tree(root, 4):
        assert b.det() == d


def test_int_det_matches_numpy():
    rng = np.random.default_rng(3)
    for _ in range(50):
        A = rng.integers(-9, 10, size=(4, 4))
        assert int_det(A.tolist()) == round(np.linalg.det(A))


def test_tree_size_and_order():
    nodes = list(enumerate_tree(E_C, 3))
    assert len(nodes) == tree_size(2, 3) == 1 + 3 + 9 + 27
    idx = [i for i, _ in nodes]
    assert idx[:5] == [(), (1,), (2,), (3,), (1, 1)]
    # shallower first, lexicographic within a level
    assert idx == sorted(idx, key=lambda t: (len(t), t))


def test_only_depth_and_prefix():
    lvl = [i for i, _ in enumerate_tree(E_T, 3, only_depth=2)]
    assert len(lvl) == 16 and all(len(i) == 2 for i in lvl)
    sub = [i for i, _ in enumerate_tree(E_T, 3, prefix=(2,))]
    assert sub[0] == (2,) and all(i[0] == 2 for i in sub) and len(sub) == 1 + 4 + 16


def test_cap():
    with pytest.raises(NodeCapError):
        list(enumerate_tree(E_C, 5, cap=10))
    with pytest.raises(NodeCapError):
        list(iter_levels(E_C, 5, cap=10))


def test_iter_levels_matches_enumeration():
    ref = {i: b for i, b in enumerate_tree(E_T, 4)}
    for d, arr in iter_levels(E_T, 4):
        idx = level_indices(3, d)
        for p in range(len(arr)):
            i = tuple(int(x) for x in idx[p])
            assert i == level_index(p, 3, d)
            assert tuple(map(tuple, arr[p].tolist())) == ref[i].vectors


def test_iter_levels_prefix_is_subtree():
    full = dict((d, a) for d, a in iter_levels(E_C, 4))
    for pre in subtree_prefixes(2, 2):
        for d, arr in iter_levels(E_C, 4, prefix=pre):
            # the subtree block sits contiguously inside the full level
            off = (level_indices(2, 2).tolist().index(list(pre))) * 3 ** (d - 2)
            assert np.array_equal(arr, full[d][off:off + len(arr)])


def test_children_array_order():
    arr = children_array(E_C.as_array()[None])
    for i in range(3):
        assert tuple(map(tuple, arr[i].tolist())) == child_basis(E_C, i + 1).vectors


def test_overflow_raises_with_index():
    big = Basis(((2**62, 0, 1), (0, 1, 1), (2**62, 1, 0)))
    with pytest.raises(TreeOverflowError) as exc:
        list(enumerate_tree(big, 3))
    assert exc.value.index
    with pytest.raises(TreeOverflowError):
        list(iter_levels(big, 3))


def test_index_and_basis_round_trip():
    assert parse_index(format_index((1, 3, 2))) == (1, 3, 2)
    assert format_index(()) == ""
    for b in NAMED_BASES.values():
        assert Basis.parse(b.format()) == b
        assert resolve_basis(b.format()) == b
    assert resolve_basis("EC") == E_C


def test_barycenters():
    assert barycenter(E_T) == (1, 1, 1, 4)
    assert barycenter(E_C) == (2, 2, 2)
    assert barycenter(simplex_basis(2)) == (1, 1, 3)


def test_bad_basis():
    with pytest.raises(ValueError):
        Basis(((1, 0), (0, 1, 1)))


def test_projpoint_normalised():
    assert ProjPoint((-2, 4, 0)).coords == (1, -2, 0)
    with pytest.raises(ValueError):
        ProjPoint((0, 0))


@pytest.mark.parametrize("root", [simplex_basis(2), E_C, E_T, canonical_basis(2), NAMED_BASES["n1"]])
def test_psi_maps_root_to_child(root):
    m = len(root)
    for i in range(1, m + 1):
        M = psi_map(root, i)
        child = child_basis(root, i)
        for e, f in zip(root, child):
            assert apply_map(M, e) == ProjPoint(f)


def test_composition_order():
    root = E_C
    for idx in itertools.product(range(1, 4), repeat=3):
        M = compose_psi(root, idx)
        target = node(root, idx)
        for e, f in zip(root, target):
            assert M(e) == ProjPoint(f)


def test_nbonacci():
    assert nbonacci_constant(2) == pytest.approx((1 + 5**0.5) / 2, abs=1e-14)
    assert nbonacci_constant(3) == pytest.approx(1.839286755214161, abs=1e-14)
    assert nbonacci_terms(3, 8) == [0, 0, 1, 1, 2, 4, 7, 13]
    with pytest.raises(ValueError):
        nbonacci_constant(1)


def test_fibonacci_section_recurrence():
    for root in (simplex_basis(2), E_C, E_T):
        m = len(root)
        sec = fibonacci_section(root, 1, 1, 20)
        bs = [np.array(barycenter(b)) for _, b in sec]
        for k in range(m + 1, len(bs)):
            assert np.array_equal(bs[k], sum(bs[k - j] for j in range(1, m + 1)))


def test_fibonacci_indices():
    assert fibonacci_indices(2, 2, -1, 5) == (2, 1, 3, 2, 1)
    with pytest.raises(ValueError):
        fibonacci_indices(2, 1, 0, 3)


def test_edge_section_converges_to_vertex():
    sec = edge_section(simplex_basis(2), 1, 200)
    p = section_limit_point([barycenter(b) for _, b in sec])
    assert np.allclose(p, [1, 0], atol=0.02)


def test_section_limit_point_residual():
    sec = fibonacci_section(simplex_basis(2), 2, -1, 4)
    with pytest.raises(ConvergenceError) as exc:
        section_limit_point([barycenter(b) for _, b in sec], tol=1e-6)
    assert exc.value.residual > 1e-6
