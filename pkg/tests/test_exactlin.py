"""Exact linear algebra over F_p and Q.

Oracles: brute-force enumeration of F_p^n for small p, sympy for Q.
"""
import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from qpmutation import exactlin as el
from qpmutation.errors import ContainmentViolation, NotWellDefined

F3, F5, F7 = el.PrimeField(3), el.PrimeField(5), el.PrimeField(7)
QQ = el.RationalField()


def small_matrices(p, max_rows=3, max_cols=3):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c),
                               min_size=r, max_size=r)))


def brute_kernel(p, A):
    """All vectors x in F_p^n with A x = 0."""
    A = np.array(A, dtype=np.int64)
    n = A.shape[1]
    return {x for x in itertools.product(range(p), repeat=n) if not ((A @ np.array(x)) % p).any()}


def span_set(p, B):
    """All F_p-combinations of the columns of B."""
    B = np.array(B, dtype=np.int64)
    n, d = B.shape
    if d == 0:
        return {(0,) * n}
    return {tuple(int(v) for v in (B @ np.array(c, dtype=np.int64)) % p)
            for c in itertools.product(range(p), repeat=d)}


# ---------------------------------------------------------------- fields


def test_prime_field_rejects_composite():
    with pytest.raises(ValueError):
        el.PrimeField(4)


def test_parse_field():
    assert el.parse_field("fp:7") == F7
    assert el.parse_field("fp").p == 32003
    assert isinstance(el.parse_field("rational"), el.RationalField)
    with pytest.raises(ValueError):
        el.parse_field("gf:9")


def test_inverse_in_fp():
    for x in range(1, 7):
        assert F7.mul(x, F7.inv(x)) == 1
    with pytest.raises(ZeroDivisionError):
        F7.inv(0)


def test_rational_parsing():
    assert QQ("3/4") == Fraction(3, 4)
    assert QQ.format(Fraction(-1, 2)) == "-1/2"


# ---------------------------------------------------------------- column_spaces


def test_zero_map_spaces():
    K, I, C = el.column_spaces(F7, F7.zeros(2, 2))
    assert K == el.Subspace.full(F7, 2)
    assert I.dim == 0
    assert C.shape == (2, 2)


def test_identity_spaces():
    K, I, _ = el.column_spaces(F7, el.eye(F7, 2))
    assert K.dim == 0
    assert I == el.Subspace.full(F7, 2)


def test_ones_matrix_over_f3():
    A = F3.array([[1, 1], [1, 1]])
    K, I, C = el.column_spaces(F3, A)
    assert K == el.Subspace(F3, 2, F3.array([[1], [2]]))
    assert I == el.Subspace(F3, 2, F3.array([[1], [1]]))
    # oracle
    assert span_set(3, K.basis) == brute_kernel(3, [[1, 1], [1, 1]])
    assert (I + el.Subspace(F3, 2, C)) == el.Subspace.full(F3, 2)


@given(small_matrices(3))
def test_kernel_matches_enumeration(rows):
    A = F3.array(rows)
    K = el.kernel(F3, A)
    assert span_set(3, K.basis) == brute_kernel(3, rows)


@given(small_matrices(5))
def test_rank_nullity(rows):
    A = F5.array(rows)
    assert el.rank(F5, A) + el.kernel(F5, A).dim == A.shape[1]
    assert el.rank(F5, A) == el.rank(F5, A.T.copy())


@given(small_matrices(5))
def test_image_matches_enumeration(rows):
    A = F5.array(rows)
    assert span_set(5, el.image(F5, A).basis) == span_set(5, rows)


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=1, max_size=3))
def test_rational_rank_matches_sympy(rows):
    A = QQ.array(rows)
    assert el.rank(QQ, A) == sympy.Matrix(rows).rank()
    assert el.kernel(QQ, A).dim == len(sympy.Matrix(rows).nullspace())


@given(small_matrices(7), st.randoms(use_true_random=False))
def test_canonical_basis_is_basis_independent(rows, rnd):
    # the echelon basis only depends on the subspace
    A = F7.array(rows)
    rng = np.random.default_rng(rnd.randint(0, 2**32 - 1))
    g = el.random_invertible(F7, rng, A.shape[1])
    assert np.array_equal(el.Subspace(F7, A.shape[0], A).basis,
                          el.Subspace(F7, A.shape[0], el.matmul(F7, A, g)).basis)


def test_solve_and_inverse():
    A = F7.array([[1, 2], [3, 4]])
    Ai = el.inverse(F7, A)
    assert np.array_equal(el.matmul(F7, A, Ai), el.eye(F7, 2))
    x = el.solve(F7, A, F7.array([[1], [0]]))
    assert np.array_equal(el.matmul(F7, A, x), F7.array([[1], [0]]))
    assert el.solve(F7, F7.array([[1, 1], [1, 1]]), F7.array([[1], [0]])) is None


def test_subspace_algebra():
    e1 = el.Subspace(F5, 3, F5.array([[1], [0], [0]]))
    e2 = el.Subspace(F5, 3, F5.array([[0], [1], [0]]))
    plane = e1 + e2
    assert plane.dim == 2
    assert e1 <= plane and not plane <= e1
    assert (plane.intersect(el.Subspace(F5, 3, F5.array([[1], [1], [1]])))).dim == 0
    assert plane.intersect(el.Subspace(F5, 3, F5.array([[1], [1], [0]]))).dim == 1


def test_preimage():
    A = F5.array([[1, 0, 0], [0, 0, 0]])
    W = el.Subspace.zero(F5, 2)
    assert el.preimage(F5, A, W) == el.kernel(F5, A)


# ---------------------------------------------------------------- charts


def test_chart_full_over_zero():
    ch = el.make_chart(F5, el.Subspace.full(F5, 3))
    assert np.array_equal(ch.section, el.eye(F5, 3))
    assert np.array_equal(ch.retraction, el.eye(F5, 3))


def test_chart_sub_equals_quot():
    S = el.Subspace(F5, 3, F5.array([[1], [2], [0]]))
    ch = el.make_chart(F5, S, S)
    assert ch.dim == 0
    assert ch.section.shape == (3, 0)


def test_chart_e1e2_mod_e1():
    sub = el.Subspace(F5, 3, F5.array([[1, 0], [0, 1], [0, 0]]))
    quot = el.Subspace(F5, 3, F5.array([[1], [0], [0]]))
    ch = el.make_chart(F5, sub, quot)
    assert ch.dim == 1
    assert np.array_equal(ch.section, F5.array([[0], [1], [0]]))
    # proj reads the e2 coordinate on sub
    assert np.array_equal(ch.sub_projection(), F5.array([[0, 1]]))


def test_chart_containment_required():
    a = el.Subspace(F5, 2, F5.array([[1], [0]]))
    b = el.Subspace(F5, 2, F5.array([[0], [1]]))
    with pytest.raises(ContainmentViolation):
        el.make_chart(F5, a, b)


@given(small_matrices(7, 4, 4), st.integers(0, 2**31))
def test_chart_axioms(rows, seed):
    """proj . section = id, proj kills quot_by, retraction is identity on sub."""
    A = F7.array(rows)
    n = A.shape[0]
    sub = el.image(F7, A)
    quot = el.image(F7, A[:, :1])
    rng = np.random.default_rng(seed)
    for ch in (el.make_chart(F7, sub, quot), el.make_chart(F7, sub, quot, rng=rng)):
        assert np.array_equal(el.matmul(F7, ch.proj, ch.section), el.eye(F7, ch.dim))
        assert el.is_zero(el.matmul(F7, ch.proj, quot.basis))
        assert el.is_zero(el.matmul(F7, ch.proj, ch.complement))
        assert np.array_equal(el.matmul(F7, ch.retraction, sub.basis), el.eye(F7, sub.dim))
        assert el.is_zero(el.matmul(F7, ch.retraction, ch.complement))
        assert sub.contains(ch.section)
        assert ch.dim == sub.dim - quot.dim
        assert (sub + el.Subspace(F7, n, ch.complement)).dim == n


def test_induced_identity():
    sub = el.Subspace(F7, 3, F7.array([[1, 0], [0, 1], [0, 0]]))
    ch = el.make_chart(F7, sub)
    assert np.array_equal(el.induced_map(F7, el.eye(F7, 3), ch, ch), el.eye(F7, 2))


def test_induced_vanishes_into_quot():
    sub = el.Subspace.full(F7, 2)
    quot = el.Subspace(F7, 2, F7.array([[1], [0]]))
    ch = el.make_chart(F7, sub, quot)
    A = F7.array([[0, 3], [0, 0]])  # lands in span e1
    assert el.is_zero(el.induced_map(F7, A, ch, ch))


def test_induced_nilpotent_jordan():
    ch = el.make_chart(F7, el.Subspace.full(F7, 2))
    A = F7.array([[0, 1], [0, 0]])
    assert np.array_equal(el.induced_map(F7, A, ch, ch), A)


def test_induced_not_well_defined():
    sub = el.Subspace(F7, 2, F7.array([[1], [0]]))
    ch = el.make_chart(F7, sub)
    with pytest.raises(NotWellDefined):
        el.induced_map(F7, F7.array([[0, 0], [1, 0]]), ch, ch)
