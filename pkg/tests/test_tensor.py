import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fi_closure.errors import (
    AxisError,
    DenseSizeError,
    DiagonalEntryError,
    EmbeddingError,
    FormatError,
    IndexRangeError,
    OffDiagonalityError,
)
from fi_closure.linalg import matrix_rank
from fi_closure.poly import Injection
from fi_closure.tensor import (
    DIAGONAL,
    DENSE_CAP_ENV,
    OffDiagTensor,
    RankDecomposition,
    ShiftProfile,
    densify,
    flatten,
    off_diag_from_entries,
    off_diag_minor,
    pad_embed,
    project,
    shift_profile,
)

from oracles import dense_from_terms, distinct, falling, insert, leibniz_det, random_injection_images, random_terms


def decomposition(d, w, terms):
    return RankDecomposition(d, w, terms)


# -- off_diag_from_entries --------------------------------------------------------


def test_single_entry():
    t = off_diag_from_entries(2, 3, {(1, 2): 5})
    assert t.nnz() == 1 and t[(1, 2)] == 5 and t[(2, 1)] == 0


def test_diagonal_key_rejected():
    with pytest.raises(DiagonalEntryError):
        off_diag_from_entries(2, 3, {(1, 1): 5})


def test_range_rejected():
    with pytest.raises(IndexRangeError):
        off_diag_from_entries(2, 3, {(1, 4): 5})


def test_duplicate_key_rejected():
    with pytest.raises(FormatError):
        off_diag_from_entries(2, 3, [((1, 2), 1), ((1, 2), 2)])


def test_wrong_length_rejected():
    with pytest.raises(FormatError):
        off_diag_from_entries(2, 3, {(1, 2, 3): 1})


def test_scalar_tensor():
    t = off_diag_from_entries(0, 3, {(): "7/2"})
    assert t[()] == Fraction(7, 2) and list(t.tuples()) == [()]


def test_order_above_width_is_empty():
    t = OffDiagTensor(3, 2)
    assert list(t.tuples()) == [] and t.is_zero()


def test_strict_mode():
    full = {idx: 1 for idx in itertools.permutations(range(1, 4), 2)}
    assert off_diag_from_entries(2, 3, full, strict=True).nnz() == 6
    del full[(3, 2)]
    with pytest.raises(FormatError):
        off_diag_from_entries(2, 3, full, strict=True)


def test_zeros_are_not_stored():
    t = off_diag_from_entries(2, 3, {(1, 2): 0, (2, 1): "0/5"})
    assert t.is_zero() and t == OffDiagTensor.zero(2, 3)


def test_tensor_json_round_trip():
    rng = random.Random(1)
    for _ in range(20):
        t = project(decomposition(3, 4, random_terms(rng, 3, 4, 2)))
        assert OffDiagTensor.from_json(t.to_json()) == t


def test_restrict_and_relabel_are_inverse_on_permutations():
    rng = random.Random(2)
    for _ in range(20):
        t = project(decomposition(2, 5, random_terms(rng, 2, 5, 2)))
        sigma = Injection(random_injection_images(rng, 5, 5), 5)
        assert t.relabel(sigma).restrict(sigma) == t


# -- project / densify ---------------------------------------------------------------


def test_project_symmetric_square():
    t = project(decomposition(2, 3, [(1, [[1, 2, 3], [1, 2, 3]])]))
    assert t.entries == {(1, 2): 2, (2, 1): 2, (1, 3): 3, (3, 1): 3, (2, 3): 6, (3, 2): 6}


def test_project_empty():
    assert project(decomposition(3, 4, [])) == OffDiagTensor.zero(3, 4)


def test_project_agrees_with_dense_oracle():
    rng = random.Random(3)
    for _ in range(50):
        d, w = rng.randint(1, 3), rng.randint(1, 4)
        terms = random_terms(rng, d, w, rng.randint(0, 3))
        t = decomposition(d, w, terms)
        p = project(t)
        dense = densify(t)
        oracle = dense_from_terms(d, w, terms)
        for idx, value in oracle.items():
            assert dense[tuple(j - 1 for j in idx)] == value
            if distinct(idx):
                assert p[idx] == value


def test_densify_outer():
    out = densify(decomposition(2, 2, [(1, [[1, 2], [1, 2]])]))
    assert out.tolist() == [[1, 2], [2, 4]]


def test_densify_cancellation():
    out = densify(decomposition(2, 3, [(1, [[1, 2, 3], [4, 5, 6]]), (-1, [[1, 2, 3], [4, 5, 6]])]))
    assert not out.any()


def test_densify_term_order_irrelevant():
    rng = random.Random(4)
    for _ in range(20):
        terms = random_terms(rng, 3, 3, 4)
        shuffled = terms[:]
        rng.shuffle(shuffled)
        assert np.array_equal(densify(decomposition(3, 3, terms)), densify(decomposition(3, 3, shuffled)))


def test_densify_order_zero():
    out = densify(decomposition(0, 3, [(2, []), (3, [])]))
    assert out.shape == () and out[()] == 5


def test_densify_cap(monkeypatch):
    t = decomposition(3, 5, [])
    with pytest.raises(DenseSizeError):
        densify(t, cap=100)
    monkeypatch.setenv(DENSE_CAP_ENV, "10")
    with pytest.raises(DenseSizeError):
        densify(t)
    monkeypatch.setenv(DENSE_CAP_ENV, "1000")
    assert densify(t).shape == (5, 5, 5)


def test_decomposition_json_round_trip():
    rng = random.Random(5)
    t = decomposition(2, 3, random_terms(rng, 2, 3, 3))
    assert RankDecomposition.from_json(t.to_json()) == t


def test_decomposition_shape_checks():
    with pytest.raises(FormatError):
        decomposition(2, 3, [(1, [[1, 2, 3]])])
    with pytest.raises(FormatError):
        decomposition(2, 3, [(1, [[1, 2, 3], [1, 2]])])


# -- flattenings -----------------------------------------------------------------------


def test_flatten_matrix():
    p = off_diag_from_entries(2, 3, {(1, 2): 4, (2, 3): 5})
    view = flatten(p, 2)
    assert view.entry((1,), 2) == 4
    assert flatten(p, 1).entry((1,), 2) == p[(2, 1)] == 0
    assert view.row_labels == ((1,), (2,), (3,))


def test_flatten_order_three():
    p = off_diag_from_entries(3, 3, {(1, 2, 3): 9})
    assert flatten(p, 3).entry((1, 2), 3) == 9
    # axis 2: row label (1, 3) reads positions 1 and 3
    assert flatten(p, 2).entry((1, 3), 2) == 9


def test_flatten_diagonal_marker():
    p = off_diag_from_entries(3, 3, {(1, 2, 3): 9})
    assert flatten(p, 3).entry((1, 2), 1) is DIAGONAL


def test_flatten_axis_range():
    p = OffDiagTensor.zero(2, 3)
    for bad in (0, 3):
        with pytest.raises(AxisError):
            flatten(p, bad)


def test_flatten_dense_source():
    arr = densify(decomposition(3, 3, [(1, [[1, 2, 3], [1, 0, 1], [2, 1, 1]])]))
    view = flatten(arr, 1)
    assert len(view.row_labels) == 9
    assert view.entry((2, 3), 1) == 1 * 0 * 1


# -- minors ------------------------------------------------------------------------------


def test_rank_one_minor_vanishes():
    p = project(decomposition(2, 4, [(1, [[1, 2, 3, 4], [5, 6, 7, 8]])]))
    assert off_diag_minor(p, 2, [(1,), (2,)], [3, 4]) == 0


def test_minor_diagonal_collision():
    p = project(decomposition(2, 4, [(1, [[1, 2, 3, 4], [5, 6, 7, 8]])]))
    with pytest.raises(OffDiagonalityError):
        off_diag_minor(p, 2, [(1,), (2,)], [1, 3])


def test_one_by_one_minor():
    p = off_diag_from_entries(2, 3, {(1, 2): 7})
    assert off_diag_minor(p, 2, [(1,)], [2]) == 7


def test_minor_shape_mismatch():
    p = OffDiagTensor.zero(2, 4)
    with pytest.raises(OffDiagonalityError):
        off_diag_minor(p, 2, [(1,), (2,)], [3])


def test_minor_sign_uses_sorted_labels():
    p = off_diag_from_entries(2, 4, {(1, 3): 1, (2, 4): 1})
    assert off_diag_minor(p, 2, [(2,), (1,)], [4, 3]) == 1


def test_minor_matches_leibniz():
    rng = random.Random(6)
    for _ in range(30):
        p = project(decomposition(3, 5, random_terms(rng, 3, 5, 3)))
        rows = sorted(rng.sample([(1, 2), (1, 3), (2, 3), (2, 1), (3, 1)], 2))
        cols = [4, 5]
        M = [[p[insert(r, c, 3)] for c in cols] for r in rows]
        assert off_diag_minor(p, 3, rows, cols) == leibniz_det(M)


# -- zero padding -------------------------------------------------------------------------


def test_pad_embed_example_full_width():
    t = decomposition(1, 3, [(1, [[0, 0, 3]])])
    padded = pad_embed(t, {1: 1}, 3)
    assert project(padded).entries == {(1, 3): 3}
    assert len(padded) == 1


def test_pad_embed_example_with_support():
    t = decomposition(1, 1, [(1, [[3]])])
    padded = pad_embed(t, {1: 1}, 3, support=[3])
    assert project(padded).entries == {(1, 3): 3}


def test_pad_embed_empty():
    assert len(pad_embed(decomposition(1, 3, []), {2: 1}, 3)) == 0


@pytest.mark.parametrize(
    "fixed, width, support",
    [({3: 1}, 3, None), ({1: 4}, 3, None), ({1: 1}, 4, None), ({1: 1}, 3, [2, 2, 3]), ({1: 1}, 3, [1, 2])],
)
def test_pad_embed_errors(fixed, width, support):
    with pytest.raises(EmbeddingError):
        pad_embed(decomposition(1, 3, [(1, [[1, 2, 3]])]), fixed, width, support=support)


def test_pad_embed_slice_matches_source():
    rng = random.Random(7)
    for _ in range(20):
        d = rng.randint(2, 3)
        w = rng.randint(3, 4)
        k = rng.randint(1, d - 1)
        pinned = sorted(rng.sample(range(1, d + 1), k))
        alpha = [rng.randint(1, w) for _ in pinned]
        m = d - k
        terms = random_terms(rng, m, w, 2)
        padded = densify(pad_embed(decomposition(m, w, terms), dict(zip(pinned, alpha)), w))
        small = densify(decomposition(m, w, terms))
        free = [pos for pos in range(1, d + 1) if pos not in pinned]
        for idx in itertools.product(range(1, w + 1), repeat=d):
            on_slice = all(idx[pos - 1] == a for pos, a in zip(pinned, alpha))
            value = padded[tuple(j - 1 for j in idx)]
            if on_slice:
                assert value == small[tuple(idx[pos - 1] - 1 for pos in free)]
            else:
                assert value == 0


def test_slices_reassemble_the_tensor():
    """Summing every (pinned positions, value) slice over a partition of [w]
    into S and T, plus the all-T block, reproduces the off-diagonal tensor."""
    rng = random.Random(8)
    d, w = 3, 5
    S, T = [1, 2], [3, 4, 5]
    p = project(decomposition(d, w, random_terms(rng, d, w, 3)))
    total = RankDecomposition(d, w)
    for m in range(d + 1):
        for free in itertools.combinations(range(1, d + 1), m):
            pinned = [pos for pos in range(1, d + 1) if pos not in free]
            for alpha in itertools.permutations(S, d - m):
                fixed = dict(zip(pinned, alpha))
                # dense slice over T written as a sum of indicator terms
                terms = []
                for beta in itertools.product(range(1, len(T) + 1), repeat=m):
                    idx = [0] * d
                    for pos, a in fixed.items():
                        idx[pos - 1] = a
                    for pos, b in zip(free, beta):
                        idx[pos - 1] = T[b - 1]
                    if not distinct(idx) or not p[tuple(idx)]:
                        continue
                    vecs = [[int(k == b) for k in range(1, len(T) + 1)] for b in beta]
                    terms.append((p[tuple(idx)], vecs))
                total = total + pad_embed(decomposition(m, len(T), terms), fixed, w, support=T)
    assert project(total) == p


# -- shifting --------------------------------------------------------------------------------


def test_shift_profile_examples():
    assert shift_profile(2, 1).counts == (0, 2, 1)
    assert shift_profile(1, 1).counts == (1, 1)
    for d in range(5):
        assert shift_profile(d, 0).counts == (0,) * d + (1,)


def test_shift_profile_json():
    s = shift_profile(3, 2)
    assert s.to_json() == {"d": 3, "m": 2, "counts": [0, 6, 6, 1]}
    assert ShiftProfile.from_json(s.to_json()) == s


def _brute_shift_counts(d, m):
    """Distinct-value d-tuples over T0 = {-1..-m} sorted by how many
    positions are left free for the complement."""
    counts = [0] * (d + 1)
    shift = list(range(-m, 0))
    for positions in range(d + 1):
        for free in itertools.combinations(range(d), positions):
            pinned = d - positions
            counts[positions] += sum(1 for _ in itertools.permutations(shift, pinned))
    counts[d] = 1
    return tuple(counts)


@pytest.mark.parametrize("d", range(5))
@pytest.mark.parametrize("m", range(4))
def test_shift_profile_counts_and_identity(d, m):
    counts = shift_profile(d, m).counts
    assert counts == _brute_shift_counts(d, m)
    for t in range(6):
        assert sum(k * falling(t, e) for e, k in enumerate(counts)) == falling(t + m, d)


# -- properties -------------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 3), st.randoms(use_true_random=False))
def test_flattening_rank_at_most_term_count(d, w, count, rnd):
    terms = random_terms(rnd, d, w, count)
    arr = densify(decomposition(d, w, terms))
    for i in range(1, d + 1):
        assert matrix_rank(flatten(arr, i).matrix()) <= count


def test_project_is_equivariant():
    rng = random.Random(9)
    for _ in range(30):
        d, w = rng.randint(1, 3), rng.randint(2, 5)
        terms = random_terms(rng, d, w, 2)
        sigma = Injection(random_injection_images(rng, w, w), w)
        moved = []
        for c, vecs in terms:
            new = []
            for v in vecs:
                u = [0] * w
                for j, x in enumerate(v, start=1):
                    u[sigma(j) - 1] = x
                new.append(u)
            moved.append((c, new))
        assert project(decomposition(d, w, moved)) == project(decomposition(d, w, terms)).relabel(sigma)
