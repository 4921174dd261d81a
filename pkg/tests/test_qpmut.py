"""Premutation, splitting and mutation of quivers with potential."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import F32003, three_cycle_qp
from qpmutation import exactlin as el
from qpmutation.errors import DegreeOverflow, TwoCycleAtK
from qpmutation.harness import InstanceSpec, closed_walks, gen_qp
from qpmutation.potential import Potential, apply_equivalence, cyclically_equal
from qpmutation.qpmut import (MINUS, PLUS, QP, mutate, mutate_minus, mutate_plus, premutate_minus,
                              premutate_plus, split)
from qpmutation.quiver import Quiver, mutate_quiver

F = F32003


def arrows_of(Q):
    return {(a.id, a.tail, a.head) for a in Q.arrows}


def terms(qp):
    return dict(qp.potential.terms)


def line_qp():
    return QP.make(Quiver.from_arrows(["1", "2"], [("a", "1", "2")]), F)


def kronecker_qp():
    return QP.make(Quiver.from_arrows(["1", "2"], [("a1", "1", "2"), ("a2", "1", "2")]), F)


# ---------------------------------------------------------------- premutation


def test_premutate_no_composable_pairs():
    P = premutate_plus(line_qp(), "2")
    assert arrows_of(P.quiver) == {("a*", "2", "1")}
    assert not P.potential
    assert not premutate_minus(line_qp(), "2").potential


def test_premutate_three_cycle_plus():
    P = premutate_plus(three_cycle_qp(), "2")
    expected = Potential.from_terms(P.quiver, F, [(1, ("c", "[ba]")), (1, ("[ba]", "a*", "b*"))])
    assert cyclically_equal(P.potential, expected)


def test_premutate_three_cycle_minus():
    P = premutate_minus(three_cycle_qp(), "2")
    expected = Potential.from_terms(P.quiver, F, [(1, ("c", "[ba]")), (-1, ("[ba]", "a*", "b*"))])
    assert cyclically_equal(P.potential, expected)


def test_premutate_kronecker():
    assert not premutate_plus(kronecker_qp(), "2").potential


def test_premutate_no_in_arrows_keeps_potential():
    # vertex 1 has no in-arrows, so nothing is added
    qp = QP.make(Quiver.from_arrows(["1", "2", "3"], [("a", "1", "2"), ("b", "2", "3"), ("c", "3", "2")]),
                 F, [(3, ("c", "b"))])
    assert terms(premutate_minus(qp, "1")) == terms(qp)


def test_two_cycle_at_k_rejected():
    qp = QP.make(Quiver.from_arrows(["1", "2"], [("a", "1", "2"), ("b", "2", "1")]), F)
    with pytest.raises(TwoCycleAtK):
        premutate_plus(qp, "1")


# ---------------------------------------------------------------- split


def test_split_of_reduced_qp():
    sr = split(three_cycle_qp())
    assert not sr.trivial_part.potential
    assert sr.phi.is_identity()
    assert sr.reduced_part == three_cycle_qp()


def test_split_three_cycle_premutation():
    sr = split(premutate_plus(three_cycle_qp(), "2"))
    assert arrows_of(sr.reduced_part.quiver) == {("a*", "2", "1"), ("b*", "3", "2")}
    assert not sr.reduced_part.potential
    assert terms(sr.trivial_part) == {("[ba]", "c"): 1}
    assert sr.phi.images["c"] == {("c",): 1, ("a*", "b*"): F.p - 1}
    assert all(sr.phi.images[a] == {(a,): 1} for a in ("[ba]", "a*", "b*"))
    assert sr.certify()


def geometric_qp(c, D=8):
    Q = Quiver.from_arrows(["1", "2", "3"], [("u", "1", "2"), ("v", "2", "1"), ("p", "1", "3"),
                                             ("q", "3", "1")])
    return QP.make(Q, F, [(1, ("v", "u")), (c, ("v", "u", "q", "p")), (1, ("q", "p", "q", "p"))], D)


@pytest.mark.parametrize("c", [1, 2, 5])
def test_split_with_higher_correction(c):
    """vu + c vuqp + qpqp: v u (1 + c qp) is a square after u -> u (1 + c qp)^{-1}.

    Oracle: u -> sum_i (-c)^i u (qp)^i truncated at degree D; the reduced part is qpqp.
    """
    D = 8
    sr = split(geometric_qp(c, D))
    expected = {("u",) + ("q", "p") * i: F((-c) ** i) for i in range(4)}
    assert sr.phi.images["u"] == expected
    assert arrows_of(sr.reduced_part.quiver) == {("p", "1", "3"), ("q", "3", "1")}
    assert terms(sr.reduced_part) == {("p", "q", "p", "q"): 1}
    assert sr.certify()


def test_split_strict_truncation():
    # with a tight bound the geometric series leaves a nonzero tail
    with pytest.raises(DegreeOverflow):
        split(geometric_qp(1, 4), strict=True)
    assert split(geometric_qp(1, 4)).certify()


@st.composite
def qps_with_two_cycles(draw):
    seed = draw(st.integers(0, 2**31))
    rng = np.random.default_rng(seed)
    Q = Quiver.from_arrows(["1", "2", "3"], [("x1", "1", "2"), ("y1", "2", "1"), ("x2", "1", "2"),
                                             ("y2", "2", "1"), ("z", "2", "3"), ("w", "3", "1")])
    cycles = closed_walks(Q, 2, 4)
    chosen = [c for c in cycles if rng.random() < 0.5]
    return QP.make(Q, F, [(F.random_scalar(rng), c) for c in chosen], 6)


def quadratic_rank(qp):
    """Rank of the quadratic part as a bilinear pairing between opposite arrows."""
    Q = qp.quiver
    total = 0
    done = set()
    for a in Q.arrows:
        key = frozenset((a.tail, a.head))
        if key in done:
            continue
        done.add(key)
        fwd = [x.id for x in Q.arrows_between(a.tail, a.head)]
        bwd = [x.id for x in Q.arrows_between(a.head, a.tail)]
        M = F.zeros(len(fwd), len(bwd))
        for p, c in qp.potential.terms:
            if len(p) == 2:
                for i, f in enumerate(fwd):
                    for j, b in enumerate(bwd):
                        if set(p) == {f, b}:
                            M[i, j] = c
        total += el.rank(F, M)
    return total


@given(qps_with_two_cycles())
def test_split_properties(qp):
    sr = split(qp)
    assert len(sr.pairs) == quadratic_rank(qp)
    assert sr.reduced_part.is_reduced()
    removed = {a for pair in sr.pairs for a in pair}
    assert set(sr.reduced_part.quiver.arrow_ids) == set(qp.quiver.arrow_ids) - removed
    # trivial part is exactly sum of u_i v_i
    assert {frozenset(p) for p, c in sr.trivial_part.potential.terms} == {frozenset(p) for p in sr.pairs}
    # independent recomputation of the certificate
    image = apply_equivalence(sr.phi, qp.potential)
    total = Potential.from_element(qp.quiver, F, {**sr.trivial_part.potential.as_dict,
                                                  **sr.reduced_part.potential.as_dict}, qp.degree_bound)
    assert cyclically_equal(image, total)


# ---------------------------------------------------------------- mutation


def test_mutate_three_cycle():
    for d in (PLUS, MINUS):
        red, sr = mutate(three_cycle_qp(), "2", d)
        assert arrows_of(red.quiver) == {("a*", "2", "1"), ("b*", "3", "2")}
        assert not red.potential
    _, sr = mutate_minus(three_cycle_qp(), "2")
    assert sr.phi.images["c"] == {("c",): 1, ("a*", "b*"): 1}


def test_mutate_line():
    red, _ = mutate_plus(line_qp(), "2")
    assert arrows_of(red.quiver) == {("a*", "2", "1")}
    assert not red.potential


def test_qp_json_round_trip():
    qp = three_cycle_qp()
    assert QP.from_json(qp.to_json(), F) == qp


@given(st.integers(0, 2**31))
def test_reduced_quiver_versus_quiver_mutation(seed):
    """The split removes at most as many 2-cycles as the combinatorial mutation."""
    rng = np.random.default_rng(seed)
    qp = gen_qp(rng, InstanceSpec(seed=seed), F)
    for k in qp.quiver.vertices[:2]:
        red, sr = mutate_plus(qp, k)
        assert sr.certify()
        assert red.is_reduced()
        assert len(red.quiver.arrows) >= len(mutate_quiver(qp.quiver, k).arrows)
