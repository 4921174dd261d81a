"""Representations, Hom spaces, simple summands and isomorphism testing.

Oracle: brute-force enumeration of all families of matrices over F_3 (or F_2)
for tiny dimension vectors.
"""
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import F32003, running_rep, three_cycle_qp
from qpmutation import exactlin as el
from qpmutation.errors import NotAMorphism, NotNilpotent, QpMismatch, RelationViolated
from qpmutation.harness import InstanceSpec, gen_instance, gen_representation
from qpmutation.qpmut import QP
from qpmutation.quiver import Quiver
from qpmutation.repcat import (RepMorphism, Representation, base_change, check_representation,
                               direct_sum, find_isomorphism, hom_basis, hom_dim, identity,
                               is_isomorphic, is_simple_free, nilpotency_index, quotient_hom,
                               random_morphism, simple, split_off_simple, zero_morphism, zero_rep)

F = F32003
F2, F3 = el.PrimeField(2), el.PrimeField(3)


def all_matrices(Fp, r, c):
    for entries in itertools.product(range(Fp.p), repeat=r * c):
        yield np.array(entries, dtype=np.int64).reshape(r, c)


def brute_hom(M, N):
    """Every family (f_v) commuting with the arrows, by enumeration."""
    Fp, Q = M.field, M.quiver
    vs = list(Q.vertices)
    choices = [list(all_matrices(Fp, N.dims[v], M.dims[v])) for v in vs]
    out = []
    for fam in itertools.product(*choices):
        f = dict(zip(vs, fam))
        if all(np.array_equal(el.matmul(Fp, f[a.head], M.action[a.id]),
                              el.matmul(Fp, N.action[a.id], f[a.tail])) for a in Q.arrows):
            out.append(f)
    return out


def tiny_reps(Fp, qp, max_dim=1):
    """All representations of ``qp`` with dims <= max_dim over a tiny field."""
    Q = qp.quiver
    for dims in itertools.product(range(max_dim + 1), repeat=len(Q.vertices)):
        d = dict(zip(Q.vertices, dims))
        for fam in itertools.product(*[list(all_matrices(Fp, d[a.head], d[a.tail])) for a in Q.arrows]):
            R = Representation(qp, d, dict(zip(Q.arrow_ids, fam)), check=False)
            try:
                check_representation(R)
            except (RelationViolated, NotNilpotent):
                continue
            yield R


# ---------------------------------------------------------------- relations


def test_zero_rep_is_valid():
    check_representation(zero_rep(three_cycle_qp()))


def test_running_example_is_valid():
    M = running_rep()
    for a in "abc":
        assert el.is_zero(M.relation_matrix(a))


def test_relation_violated_on_c():
    with pytest.raises(RelationViolated) as exc:
        running_rep(a=1, b=1)
    assert exc.value.arrow == "c"


def test_not_nilpotent():
    qp = QP.make(three_cycle_qp().quiver, F)
    with pytest.raises(NotNilpotent):
        Representation(qp, {"1": 1, "2": 1, "3": 1}, {"a": [[1]], "b": [[1]], "c": [[1]]})


def test_nilpotency_index():
    assert nilpotency_index(running_rep()) == 2
    assert nilpotency_index(zero_rep(three_cycle_qp())) == 0


def test_json_round_trip():
    M = running_rep()
    assert Representation.from_json(M.qp, M.to_json()).same_data(M)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        Representation(three_cycle_qp(), {"1": 1, "2": 2}, {"a": [[1]]})


# ---------------------------------------------------------------- Hom


def test_identity_is_endomorphism():
    M = running_rep()
    assert identity(M).is_morphism()
    assert hom_dim(M, M) >= 1


def test_hom_between_distinct_simples():
    qp = three_cycle_qp()
    assert hom_basis(simple(qp, "1"), simple(qp, "2")) == []


def test_running_example_endomorphisms():
    # f_2 a = a f_1 forces f_1 = f_2; f_3 is free (b = c = 0)
    assert hom_dim(running_rep(), running_rep()) == 2


def test_not_a_morphism():
    M = running_rep()
    with pytest.raises(NotAMorphism):
        RepMorphism(M, M, {"1": [[1]], "2": [[0]], "3": [[0]]})


def test_hom_matches_brute_force_over_f3():
    qp = three_cycle_qp(F3)
    reps = list(tiny_reps(F3, qp))
    rng = np.random.default_rng(0)
    pairs = [(reps[i], reps[j]) for i, j in rng.integers(0, len(reps), size=(40, 2))]
    for M, N in pairs:
        assert 3 ** hom_dim(M, N) == len(brute_hom(M, N))


@given(st.integers(0, 2**31))
def test_hom_basis_is_a_basis(seed):
    inst = gen_instance(InstanceSpec(seed=seed, max_dim=3, num_vertices=4, num_arrows=5))
    basis = hom_basis(inst.M, inst.N)
    assert all(f.is_morphism() for f in basis)
    if basis:
        vecs = np.stack([np.concatenate([f.maps[v].ravel() for v in inst.qp.quiver.vertices])
                         for f in basis], axis=1)
        assert el.rank(F, vecs) == len(basis)


# ---------------------------------------------------------------- quotient Hom


def test_quotient_hom_of_simple():
    S = simple(three_cycle_qp(), "2")
    qh = quotient_hom(S, S, "2")
    assert (len(qh.full_hom), len(qh.confined), qh.quotient_dim) == (1, 1, 0)


def test_quotient_hom_zero_at_k():
    qp = three_cycle_qp()
    M = Representation(qp, {"1": 1, "3": 1}, {})
    qh = quotient_hom(M, M, "2")
    assert len(qh.confined) == 0 and qh.quotient_dim == len(qh.full_hom) == 2


def test_quotient_hom_running_example():
    qh = quotient_hom(running_rep(), running_rep(), "2")
    # nothing nonzero is supported at 2 alone: f_2 = f_1
    assert qh.quotient_dim == 2


def test_confined_morphisms_vanish_off_k():
    inst = gen_instance(InstanceSpec(seed=5))
    for f in hom_basis(inst.M, inst.N, confined_at=inst.k):
        assert f.is_confined(inst.k)


# ---------------------------------------------------------------- simple summands


def test_split_off_simple_of_simple():
    s = split_off_simple(simple(three_cycle_qp(), "2"), "2")
    assert s.multiplicity == 1 and s.core.total_dim == 0


def test_split_off_simple_beta_injective():
    M = Representation(three_cycle_qp(), {"2": 1, "3": 1}, {"b": [[1]]})
    s = split_off_simple(M, "2")
    assert s.multiplicity == 0 and s.core.same_data(M)


def test_split_off_simple_multiplicity_two():
    M = Representation(three_cycle_qp(), {"2": 2}, {})
    assert split_off_simple(M, "2").multiplicity == 2


@given(st.integers(0, 2**31))
def test_split_off_simple_decomposes(seed):
    rng = np.random.default_rng(seed)
    qp = three_cycle_qp()
    R = gen_representation(qp, rng, 3)
    k = str(int(rng.integers(1, 4)))
    s = split_off_simple(R, k)
    assert is_simple_free(s.core, k)
    check_representation(s.core)
    assert s.core.dims[k] + s.multiplicity == R.dims[k]
    # core + S_k^m is isomorphic to R
    assert is_isomorphic(direct_sum(s.core, simple(qp, k, s.multiplicity)).rep, R, seed=seed)
    assert s.projection.compose(s.inclusion) == identity(s.core)


# ---------------------------------------------------------------- isomorphism


def test_isomorphic_to_itself():
    assert is_isomorphic(running_rep(), running_rep())


def test_dims_mismatch():
    qp = three_cycle_qp()
    assert not is_isomorphic(simple(qp, "1"), simple(qp, "2"))


def test_diagonal_twist_is_isomorphic():
    M = running_rep()
    g = {"1": F.array([[2]]), "2": F.array([[5]]), "3": F.array([[7]])}
    N = base_change(M, g)
    assert not N.same_data(M)
    assert is_isomorphic(M, N)
    assert find_isomorphism(M, N).is_isomorphism()


def test_non_isomorphic_same_dims():
    assert not is_isomorphic(running_rep(), running_rep(a=0))


def test_different_qps_rejected():
    with pytest.raises(QpMismatch):
        is_isomorphic(running_rep(), Representation(QP.make(three_cycle_qp().quiver, F), {}, {}))


def test_isomorphism_matches_brute_force_over_f2():
    """Exhaustive search over F_2 decides isomorphism; compare with enumerating GL."""
    Q = Quiver.from_arrows(["1", "2"], [("a", "1", "2"), ("b", "1", "2")])
    qp = QP.make(Q, F2)
    reps = [R for R in tiny_reps(F2, qp, max_dim=2) if R.dims == {"1": 1, "2": 2}]
    for M, N in itertools.combinations(reps[:10], 2):
        brute = any(el.is_invertible(F2, f["1"]) and el.is_invertible(F2, f["2"])
                    for f in brute_hom(M, N))
        assert is_isomorphic(M, N) == brute


@given(st.integers(0, 2**31))
def test_random_base_change_is_isomorphic(seed):
    rng = np.random.default_rng(seed)
    inst = gen_instance(InstanceSpec(seed=seed, max_dim=3))
    M = inst.M
    g = {v: el.random_invertible(F, rng, d) for v, d in M.dims.items()}
    assert is_isomorphic(M, base_change(M, g), seed=seed)


def test_morphism_algebra():
    M = running_rep()
    rng = np.random.default_rng(1)
    f, g = random_morphism(M, M, rng), random_morphism(M, M, rng)
    assert (f + g - g) == f
    assert (f - f).is_zero()
    assert f.compose(identity(M)) == f
    assert zero_morphism(M, M).is_zero()
    assert RepMorphism.from_json(M, M, f.to_json()) == f
