import numpy as np
import pytest

from hamlearn.domain import HFunction, b1, distinct_concepts, h_assignment
from hamlearn.nogo import (
    LearningMatrix,
    classify_translate,
    complementary_rows_sign,
    is_hadamard,
    is_hadamard_spectral,
    learning_matrix,
    scan_all_h,
)
from hamlearn.sweep import objective

MINUS = np.array([1.0, -1.0]) / np.sqrt(2.0)


def translates(n):
    return {tuple(b1(d + s) for d in range(n + 1)) for s in range(4)}


def test_learning_matrix_examples():
    assert np.all(learning_matrix(HFunction.constant(3), 3).entries == 1)
    L = learning_matrix(HFunction.b1(2), 2)
    assert L.entries.shape == (4, 4)
    assert is_hadamard(L)


@pytest.mark.parametrize("n", range(1, 7))
def test_learning_matrix_symmetric_for_every_h(n):
    for k in range(1 << (n + 1)):
        L = learning_matrix(HFunction.from_index(k, n), n).entries
        assert np.array_equal(L, L.T)


def test_learning_matrix_limits():
    with pytest.raises(ValueError):
        learning_matrix(HFunction.b1(13), 13)
    with pytest.raises(ValueError):
        learning_matrix(HFunction.b1(3), 4)


def test_is_hadamard_examples():
    assert not is_hadamard(np.ones((4, 4), dtype=int))
    assert is_hadamard(learning_matrix(HFunction.b1(4), 4))
    assert not is_hadamard(learning_matrix(HFunction.b1(3), 3))
    assert is_hadamard(np.ones((1, 1)))


def test_is_hadamard_input_errors():
    with pytest.raises(ValueError):
        is_hadamard(np.array([[1, 0], [1, 1]]))
    with pytest.raises(ValueError):
        is_hadamard(np.ones((2, 3)))


@pytest.mark.parametrize("n", range(1, 9))
def test_spectral_test_agrees_with_dense(n):
    for k in range(1 << (n + 1)):
        h = HFunction.from_index(k, n)
        assert is_hadamard_spectral(h) == is_hadamard(learning_matrix(h, n))


def test_classify_translate_examples():
    assert classify_translate(HFunction.b1(5)) == 0
    shifted = HFunction(tuple(1 - b1(d) for d in range(6)))
    assert classify_translate(shifted) == 2
    for n in (2, 3, 6):
        assert classify_translate(HFunction.constant(n, 0)) is None
        assert classify_translate(HFunction.constant(n, 1)) is None


@pytest.mark.parametrize("n", [2, 4, 6])
def test_even_scans_find_exactly_the_translates(n):
    rep = scan_all_h(n)
    assert rep.scanned == 1 << (n + 1)
    assert {h.values for h in rep.passing_h} == translates(n)
    assert sorted(rep.classifications) == [0, 1, 2, 3]


@pytest.mark.parametrize("n", [3, 5, 7])
def test_odd_scans_find_nothing(n):
    assert scan_all_h(n).passing_h == []


def test_scan_separates_non_distinct_classes():
    rep = scan_all_h(5)
    assert all(distinct_concepts(h, 5) < 32 for h in rep.non_distinct)
    # b1 itself halves the class at n = 5
    assert HFunction.b1(5) in rep.non_distinct


def test_scan_report_dict():
    d = scan_all_h(2).to_dict()
    assert d["n"] == 2 and d["scanned"] == 8
    assert {p["h"] for p in d["passing"]} == {"001", "011", "110", "100"}


def test_scan_limit():
    with pytest.raises(ValueError):
        scan_all_h(13)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_hadamard_iff_probability_one(n):
    for k in range(1 << (n + 1)):
        h = HFunction.from_index(k, n)
        hadamard = distinct_concepts(h, n) == 1 << n and is_hadamard(learning_matrix(h, n))
        p = objective(n, h_assignment(h), MINUS)
        assert (abs(p - 1.0) <= 1e-9) == hadamard


@pytest.mark.parametrize("n", [3, 5, 7])
def test_complementary_rows_agree_up_to_sign(n):
    for s in range(4):
        h = HFunction(tuple(b1(d + s) for d in range(n + 1)))
        L = learning_matrix(h, n)
        signs = {complementary_rows_sign(L, x) for x in range(L.N)}
        assert None not in signs and len(signs) == 1


def test_passing_columns_at_half_distance():
    for n in (2, 4, 6):
        for h in scan_all_h(n).passing_h:
            L = learning_matrix(h, n).entries.astype(int)
            N = L.shape[0]
            diff = (N - L.T @ L) // 2
            off = diff[~np.eye(N, dtype=bool)]
            assert np.all(off == N // 2)


def test_learning_matrix_type_carries_h():
    h = HFunction.b1(3)
    L = learning_matrix(h, 3)
    assert isinstance(L, LearningMatrix) and L.h == h and L.N == 8
