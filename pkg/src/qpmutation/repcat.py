"""Nilpotent representations of a QP, their morphisms and Hom spaces."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from . import exactlin as el
from .errors import (Inconclusive, NotAMorphism, NotNilpotent, QpMismatch, RelationViolated,
                     UnknownArrow, UnknownVertex)
from .potential import cyclic_derivative, evaluate_element
from .qpmut import QP

ISO_RANDOM_TRIES = 64
ISO_EXHAUSTIVE_LIMIT = 100_000


class Representation:
    """Vector spaces ``F^dims[v]`` with one matrix per arrow (``head x tail``)."""

    def __init__(self, qp: QP, dims: Mapping, action: Mapping[str, object], check: bool = True):
        Q, F = qp.quiver, qp.field
        self.qp = qp
        self.dims: Dict[str, int] = {}
        for v, d in dims.items():
            v = str(v)
            if v not in Q.vertices:
                raise UnknownVertex(f"dimension given for unknown vertex {v!r}")
            if int(d) < 0:
                raise ValueError(f"negative dimension at {v}")
            self.dims[v] = int(d)
        for v in Q.vertices:
            self.dims.setdefault(v, 0)
        extra = set(action) - set(Q.arrow_ids)
        if extra:
            raise UnknownArrow(f"action given for unknown arrows {sorted(extra)}")
        self.action: Dict[str, np.ndarray] = {}
        for a in Q.arrows:
            shape = (self.dims[a.head], self.dims[a.tail])
            m = action.get(a.id)
            if m is None or np.size(m) == 0:
                m = F.zeros(*shape) if m is None or shape[0] * shape[1] == 0 else F.array(m)
            else:
                m = F.array(m)
            if m.shape != shape:
                raise ValueError(f"arrow {a.id} needs a {shape[0]}x{shape[1]} matrix, got {m.shape}")
            m.flags.writeable = False
            self.action[a.id] = m
        if check:
            check_representation(self)

    @property
    def field(self):
        return self.qp.field

    @property
    def quiver(self):
        return self.qp.quiver

    def dim(self, v) -> int:
        return self.dims[str(v)]

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def dim_vector(self) -> Tuple[int, ...]:
        return tuple(self.dims[v] for v in self.quiver.vertices)

    def evaluate(self, x, src, dst) -> np.ndarray:
        """Matrix of a path-algebra element running from ``src`` to ``dst``."""
        return evaluate_element(self.field, self.action, x, self.dims[str(dst)], self.dims[str(src)])

    def relation_matrix(self, a: str) -> np.ndarray:
        arrow = self.quiver.arrow(a)
        return self.evaluate(cyclic_derivative(self.qp.potential, a), arrow.head, arrow.tail)

    def same_data(self, other: "Representation") -> bool:
        return (self.qp == other.qp and self.dims == other.dims
                and all(np.array_equal(self.action[a], other.action[a]) for a in self.action))

    def with_qp(self, qp: QP, check: bool = True) -> "Representation":
        return Representation(qp, self.dims, self.action, check=check)

    def __repr__(self):
        return f"Representation(dims={self.dim_vector()})"

    def to_json(self) -> dict:
        F = self.field
        return {"dims": {v: self.dims[v] for v in self.quiver.vertices},
                "action": {a: [[F.to_json(x) if F.is_finite else F.format(x) for x in row]
                                for row in m.tolist()] for a, m in self.action.items()}}

    @classmethod
    def from_json(cls, qp: QP, data: dict, check: bool = True) -> "Representation":
        dims = data.get("dims", {})
        action = {}
        for a, rows in data.get("action", {}).items():
            arrow = qp.quiver.arrow(a)
            shape = (int(dims.get(arrow.head, 0)), int(dims.get(arrow.tail, 0)))
            action[a] = qp.field.array(rows if np.size(rows) else np.zeros(shape, dtype=np.int64), shape)
        return cls(qp, dims, action, check=check)


def nilpotency_index(M: Representation) -> Optional[int]:
    """Least ``n`` with every path of length ``n`` acting as zero, or None."""
    F, Q = M.field, M.quiver
    layer = {v: el.eye(F, M.dims[v]) for v in Q.vertices}
    for n in range(M.total_dim + 1):
        if all(layer[v].shape[1] == 0 for v in Q.vertices):
            return n
        nxt = {v: [] for v in Q.vertices}
        for a in Q.arrows:
            if layer[a.tail].shape[1]:
                nxt[a.head].append(el.matmul(F, M.action[a.id], layer[a.tail]))
        layer = {}
        for v in Q.vertices:
            span = np.concatenate(nxt[v], axis=1) if nxt[v] else F.zeros(M.dims[v], 0)
            layer[v] = el.canonical_basis(F, span)[0]
    return None


def check_representation(M: Representation) -> None:
    for a in M.quiver.arrow_ids:
        R = M.relation_matrix(a)
        nz = np.argwhere(R != 0)
        if len(nz):
            raise RelationViolated(a, tuple(int(i) for i in nz[0]))
    if nilpotency_index(M) is None:
        raise NotNilpotent("some path of length sum(dims) acts nontrivially")


def is_representation(M: Representation) -> bool:
    try:
        check_representation(M)
    except (RelationViolated, NotNilpotent):
        return False
    return True


def zero_rep(qp: QP) -> Representation:
    return Representation(qp, {}, {})


def simple(qp: QP, k, multiplicity: int = 1) -> Representation:
    return Representation(qp, {str(k): multiplicity}, {})


# ---------------------------------------------------------------------------
# morphisms


class RepMorphism:
    """A family of matrices ``maps[v]: source_v -> target_v``."""

    def __init__(self, source: Representation, target: Representation,
                 maps: Mapping, check: bool = True):
        if source.qp != target.qp:
            raise QpMismatch("morphism between representations of different QPs")
        F = source.field
        self.source, self.target = source, target
        self.maps: Dict[str, np.ndarray] = {}
        for v in source.quiver.vertices:
            shape = (target.dims[v], source.dims[v])
            m = maps.get(v)
            m = F.zeros(*shape) if m is None else F.array(m).reshape(shape)
            self.maps[v] = m
        if check:
            bad = self.defect()
            if bad is not None:
                raise NotAMorphism(f"intertwining fails at arrow {bad}")

    @property
    def field(self):
        return self.source.field

    def defect(self) -> Optional[str]:
        """First arrow where ``f_h M_a = N_a f_t`` fails, if any."""
        F = self.field
        for a in self.source.quiver.arrows:
            lhs = el.matmul(F, self.maps[a.head], self.source.action[a.id])
            rhs = el.matmul(F, self.target.action[a.id], self.maps[a.tail])
            if not np.array_equal(lhs, rhs):
                return a.id
        return None

    def is_morphism(self) -> bool:
        return self.defect() is None

    def compose(self, inner: "RepMorphism") -> "RepMorphism":
        """``self ∘ inner``."""
        F = self.field
        return RepMorphism(inner.source, self.target,
                           {v: el.matmul(F, self.maps[v], inner.maps[v]) for v in self.maps},
                           check=False)

    def __add__(self, other: "RepMorphism") -> "RepMorphism":
        F = self.field
        return RepMorphism(self.source, self.target,
                           {v: el.add(F, self.maps[v], other.maps[v]) for v in self.maps}, check=False)

    def __sub__(self, other: "RepMorphism") -> "RepMorphism":
        F = self.field
        return RepMorphism(self.source, self.target,
                           {v: el.sub(F, self.maps[v], other.maps[v]) for v in self.maps}, check=False)

    def scale(self, s) -> "RepMorphism":
        F = self.field
        return RepMorphism(self.source, self.target,
                           {v: el.scale(F, m, s) for v, m in self.maps.items()}, check=False)

    def is_zero(self) -> bool:
        return all(el.is_zero(m) for m in self.maps.values())

    def is_confined(self, k) -> bool:
        k = str(k)
        return all(el.is_zero(m) for v, m in self.maps.items() if v != k)

    def is_isomorphism(self) -> bool:
        return all(m.shape[0] == m.shape[1] and el.is_invertible(self.field, m)
                   for m in self.maps.values())

    def __eq__(self, other):
        if not isinstance(other, RepMorphism):
            return NotImplemented
        return all(np.array_equal(self.maps[v], other.maps[v]) for v in self.maps)

    def to_json(self) -> dict:
        F = self.field
        return {"maps": {v: [[F.to_json(x) if F.is_finite else F.format(x) for x in row]
                              for row in m.tolist()] for v, m in self.maps.items()}}

    @classmethod
    def from_json(cls, source, target, data: dict, check: bool = True) -> "RepMorphism":
        F = source.field
        maps = {}
        for v, rows in data.get("maps", {}).items():
            shape = (target.dims[str(v)], source.dims[str(v)])
            maps[str(v)] = F.array(rows if np.size(rows) else np.zeros(shape, dtype=np.int64), shape)
        return cls(source, target, maps, check=check)


def identity(M: Representation) -> RepMorphism:
    return RepMorphism(M, M, {v: el.eye(M.field, d) for v, d in M.dims.items()}, check=False)


def zero_morphism(M: Representation, N: Representation) -> RepMorphism:
    return RepMorphism(M, N, {}, check=False)


# ---------------------------------------------------------------------------
# Hom spaces


def _hom_system(M: Representation, N: Representation, confined_at=None):
    """Linear system whose kernel is Hom(M, N) with row-major vectorized maps."""
    if M.qp != N.qp:
        raise QpMismatch("representations of different QPs")
    F, Q = M.field, M.quiver
    offsets, n = {}, 0
    for v in Q.vertices:
        offsets[v] = n
        n += N.dims[v] * M.dims[v]
    blocks = []
    for a in Q.arrows:
        h, t = a.head, a.tail
        rows = N.dims[h] * M.dims[t]
        if rows == 0:
            continue
        B = F.zeros(rows, n)
        # vec(f_h M_a) = (I ⊗ M_a^T) vec(f_h); vec(N_a f_t) = (N_a ⊗ I) vec(f_t)
        lh = el.kron(F, el.eye(F, N.dims[h]), np.ascontiguousarray(M.action[a.id].T))
        rt = el.kron(F, N.action[a.id], el.eye(F, M.dims[t]))
        B[:, offsets[h]:offsets[h] + lh.shape[1]] = lh
        B[:, offsets[t]:offsets[t] + rt.shape[1]] = F.reduce(B[:, offsets[t]:offsets[t] + rt.shape[1]] - rt)
        blocks.append(B)
    if confined_at is not None:
        k = str(confined_at)
        for v in Q.vertices:
            size = N.dims[v] * M.dims[v]
            if v == k or size == 0:
                continue
            B = F.zeros(size, n)
            B[:, offsets[v]:offsets[v] + size] = el.eye(F, size)
            blocks.append(B)
    A = np.concatenate(blocks, axis=0) if blocks else F.zeros(0, n)
    return A, offsets, n


def _vector_to_morphism(M, N, offsets, vec) -> RepMorphism:
    maps = {}
    for v, off in offsets.items():
        r, c = N.dims[v], M.dims[v]
        maps[v] = np.ascontiguousarray(vec[off:off + r * c].reshape(r, c))
    return RepMorphism(M, N, maps, check=False)


def hom_basis(M: Representation, N: Representation, confined_at=None) -> List[RepMorphism]:
    """Basis of Hom(M, N) in canonical echelon order."""
    A, offsets, n = _hom_system(M, N, confined_at)
    F = M.field
    K = el.kernel_basis(F, A) if A.shape[0] else el.eye(F, n)
    K = el.Subspace(F, n, K).basis
    return [_vector_to_morphism(M, N, offsets, K[:, i]) for i in range(K.shape[1])]


def hom_dim(M: Representation, N: Representation, confined_at=None) -> int:
    A, _, n = _hom_system(M, N, confined_at)
    return n - el.rank(M.field, A)


@dataclass(frozen=True, eq=False)
class QuotientHom:
    full_hom: Tuple[RepMorphism, ...]
    confined: Tuple[RepMorphism, ...]
    k: str

    @property
    def quotient_dim(self) -> int:
        return len(self.full_hom) - len(self.confined)


def quotient_hom(M: Representation, N: Representation, k) -> QuotientHom:
    k = M.quiver.check_vertex(k)
    return QuotientHom(tuple(hom_basis(M, N)), tuple(hom_basis(M, N, confined_at=k)), k)


def random_morphism(M: Representation, N: Representation, rng: np.random.Generator,
                    basis: Optional[List[RepMorphism]] = None) -> RepMorphism:
    F = M.field
    basis = hom_basis(M, N) if basis is None else basis
    f = zero_morphism(M, N)
    for g in basis:
        f = f + g.scale(F.random_scalar(rng))
    return f


def _combine(F, M, N, basis, coeffs) -> RepMorphism:
    f = zero_morphism(M, N)
    for g, c in zip(basis, coeffs):
        if c:
            f = f + g.scale(c)
    return f


def is_isomorphic(M: Representation, N: Representation, seed: int = 0,
                  tries: int = ISO_RANDOM_TRIES) -> bool:
    """Randomized search for an invertible morphism, exhaustive over small fields.

    A found isomorphism is always genuine. Over large fields the probability
    of missing one after ``tries`` samples is negligible; over tiny fields where
    neither sampling nor exhaustive search is conclusive, raises Inconclusive.
    """
    if M.qp != N.qp:
        raise QpMismatch("representations of different QPs")
    if M.dims != N.dims:
        return False
    if M.total_dim == 0:
        return True
    F = M.field
    basis = hom_basis(M, N)
    if not basis:
        return False
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        f = _combine(F, M, N, basis, [F.random_scalar(rng) for _ in basis])
        if f.is_isomorphism():
            return True
    if not F.is_finite:
        return False
    q, h = F.size, len(basis)
    if q ** h <= ISO_EXHAUSTIVE_LIMIT:
        for idx in np.ndindex(*([q] * h)):
            if _combine(F, M, N, basis, [int(c) for c in idx]).is_isomorphism():
                return True
        return False
    # a nonzero determinant polynomial of degree <= total_dim vanishes on at
    # most total_dim/q of the space, so many misses mean no isomorphism
    if q > 4 * M.total_dim:
        return False
    raise Inconclusive(f"no isomorphism found over F_{q} after {tries} tries")


def find_isomorphism(M: Representation, N: Representation, seed: int = 0,
                     tries: int = ISO_RANDOM_TRIES) -> Optional[RepMorphism]:
    if M.dims != N.dims:
        return None
    F = M.field
    basis = hom_basis(M, N)
    if M.total_dim == 0:
        return zero_morphism(M, N)
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        f = _combine(F, M, N, basis, [F.random_scalar(rng) for _ in basis])
        if f.is_isomorphism():
            return f
    return None


# ---------------------------------------------------------------------------
# constructions


def base_change(M: Representation, g: Mapping[str, np.ndarray], check: bool = True) -> Representation:
    """``g M g^{-1}``: the representation transported along invertible ``g``."""
    F, Q = M.field, M.quiver
    gs = {v: g.get(v, el.eye(F, M.dims[v])) for v in Q.vertices}
    ginv = {v: el.inverse(F, m) for v, m in gs.items()}
    act = {a.id: el.mats_mul(F, gs[a.head], M.action[a.id], ginv[a.tail]) for a in Q.arrows}
    return Representation(M.qp, M.dims, act, check=check)


@dataclass(frozen=True, eq=False)
class DirectSum:
    rep: Representation
    inclusions: Tuple[RepMorphism, RepMorphism]
    projections: Tuple[RepMorphism, RepMorphism]


def direct_sum(M: Representation, N: Representation) -> DirectSum:
    if M.qp != N.qp:
        raise QpMismatch("representations of different QPs")
    F, Q = M.field, M.quiver
    dims = {v: M.dims[v] + N.dims[v] for v in Q.vertices}
    act = {a.id: el.block_diag(F, [M.action[a.id], N.action[a.id]]) for a in Q.arrows}
    S = Representation(M.qp, dims, act, check=False)
    iM, iN, pM, pN = {}, {}, {}, {}
    for v in Q.vertices:
        I = el.eye(F, dims[v])
        m = M.dims[v]
        iM[v], iN[v] = I[:, :m], I[:, m:]
        pM[v], pN[v] = I[:m, :], I[m:, :]
    return DirectSum(S, (RepMorphism(M, S, iM), RepMorphism(N, S, iN)),
                     (RepMorphism(S, M, pM), RepMorphism(S, N, pN)))


def alpha_beta(M: Representation, k) -> Tuple[np.ndarray, np.ndarray]:
    """``alpha = (a_1 ... a_s)`` and ``beta = (b_1; ...; b_t)`` at ``k``."""
    F, Q = M.field, M.quiver
    k = Q.check_vertex(k)
    ins, outs = Q.in_arrows(k), Q.out_arrows(k)
    alpha = el.hstack(F, [M.action[a.id] for a in ins], M.dims[k])
    beta = el.vstack(F, [M.action[b.id] for b in outs], M.dims[k])
    return alpha, beta


@dataclass(frozen=True, eq=False)
class SimpleSplitting:
    core: Representation
    multiplicity: int
    inclusion: RepMorphism   # core -> M
    projection: RepMorphism  # M -> core
    simple_inclusion: np.ndarray   # S_k^m -> M_k
    simple_projection: np.ndarray  # M_k -> S_k^m


def split_off_simple(M: Representation, k) -> SimpleSplitting:
    """Write ``M = core ⊕ S_k^m`` with ``ker beta ⊆ im alpha`` on the core."""
    F, Q = M.field, M.quiver
    k = Q.check_vertex(k)
    n = M.dims[k]
    alpha, beta = alpha_beta(M, k)
    kb, ia = el.kernel(F, beta), el.image(F, alpha)
    common = kb.intersect(ia)
    W_basis = _complement_within(F, common, kb)
    U_sub = ia + el.Subspace(F, n, W_basis)
    E = U_sub.complement_basis()
    U_basis = np.concatenate([ia.basis, E], axis=1) if n else F.zeros(0, 0)
    m = W_basis.shape[1]
    P = np.concatenate([U_basis, W_basis], axis=1) if n else F.zeros(0, 0)
    Pinv = el.inverse(F, P)
    u = U_basis.shape[1]
    U_proj, W_proj = Pinv[:u, :], Pinv[u:, :]
    act = {}
    for a in Q.arrows:
        A = M.action[a.id]
        if a.head == k:
            A = el.matmul(F, U_proj, A)
        if a.tail == k:
            A = el.matmul(F, A, U_basis)
        act[a.id] = A
    dims = dict(M.dims)
    dims[k] = u
    core = Representation(M.qp, dims, act, check=False)
    inc = {v: el.eye(F, M.dims[v]) for v in Q.vertices}
    pro = dict(inc)
    inc[k], pro[k] = U_basis, U_proj
    return SimpleSplitting(core, m, RepMorphism(core, M, inc), RepMorphism(M, core, pro),
                           W_basis, W_proj)


def _complement_within(F, small: el.Subspace, big: el.Subspace) -> np.ndarray:
    """Columns of ``big``'s basis completing a basis of ``small`` to one of ``big``."""
    cols = []
    current = small
    for i in range(big.dim):
        v = big.basis[:, i:i + 1]
        if not current.contains(v):
            cols.append(v)
            current = current + el.Subspace(F, big.ambient_dim, v)
    return np.concatenate(cols, axis=1) if cols else F.zeros(big.ambient_dim, 0)


def is_simple_free(M: Representation, k) -> bool:
    alpha, beta = alpha_beta(M, k)
    F = M.field
    return el.kernel(F, beta) <= el.image(F, alpha)
