"""Mutation of representations: local triangle, premutation, reduction."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from . import exactlin as el
from .errors import DegreeOverflow, PreconditionViolated, RelationViolated
from .potential import second_derivative
from .qpmut import MINUS, PLUS, SplitResult, _sign, mutate, premutate
from .quiver import Quiver, composite, star
from .repcat import Representation, alpha_beta, nilpotency_index


@dataclass(frozen=True, eq=False)
class LocalTriangle:
    """``M_in --alpha--> M_k --beta--> M_out --gamma--> M_in`` at vertex ``k``."""

    k: str
    in_arrows: tuple
    out_arrows: tuple
    in_dims: tuple
    out_dims: tuple
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    @property
    def n_in(self) -> int:
        return sum(self.in_dims)

    @property
    def n_out(self) -> int:
        return sum(self.out_dims)


def local_triangle(M: Representation, k) -> LocalTriangle:
    F, Q = M.field, M.quiver
    k = Q.check_vertex(k)
    ins, outs = Q.in_arrows(k), Q.out_arrows(k)
    alpha, beta = alpha_beta(M, k)
    in_dims = tuple(M.dims[a.tail] for a in ins)
    out_dims = tuple(M.dims[b.head] for b in outs)
    rows = []
    for a in ins:
        row = [M.evaluate(second_derivative(M.qp.potential, b.id, a.id), b.head, a.tail)
               for b in outs]
        rows.append(el.hstack(F, row, M.dims[a.tail]))
    gamma = el.vstack(F, rows, sum(out_dims))
    return LocalTriangle(k, tuple(a.id for a in ins), tuple(b.id for b in outs),
                         in_dims, out_dims, alpha, beta, gamma)


@dataclass(frozen=True, eq=False)
class SplittingChoice:
    """Charts for the three summands of the new space at ``k``.

    ``c1`` is ``ker gamma / im beta`` inside ``M_out``; its complement fixes
    the retraction ``rho``. ``c2`` is ``im gamma`` and ``c3`` is
    ``ker alpha / im gamma`` inside ``M_in``; the section of ``c3`` is ``sigma``.
    """

    c1: el.SubquotientChart
    c2: el.SubquotientChart
    c3: el.SubquotientChart

    def rho(self) -> np.ndarray:
        """``M_out -> ker gamma`` in the canonical basis of ``ker gamma``."""
        return self.c1.retraction

    def sigma(self) -> np.ndarray:
        return self.c3.section

    def to_json(self, F) -> dict:
        def mat(m):
            return [[F.to_json(x) if F.is_finite else F.format(x) for x in row] for row in m.tolist()]
        return {name: {"section": mat(c.section), "complement": mat(c.complement),
                       "proj": mat(c.proj)}
                for name, c in (("ker_gamma_mod_im_beta", self.c1), ("im_gamma", self.c2),
                                ("ker_alpha_mod_im_gamma", self.c3))}


def splitting_choice(M: Representation, T: LocalTriangle,
                     rng: Optional[np.random.Generator] = None) -> SplittingChoice:
    F = M.field
    ker_g, im_g = el.kernel(F, T.gamma), el.image(F, T.gamma)
    im_b, ker_a = el.image(F, T.beta), el.kernel(F, T.alpha)
    if not ker_g.contains(im_b.basis):
        raise PreconditionViolated("gamma beta != 0: im beta is not inside ker gamma")
    if not ker_a.contains(im_g.basis):
        raise PreconditionViolated("alpha gamma != 0: im gamma is not inside ker alpha")
    return SplittingChoice(el.make_chart(F, ker_g, im_b, rng=rng),
                           el.make_chart(F, im_g, None, rng=rng),
                           el.make_chart(F, ker_a, im_g, rng=rng))


@dataclass(frozen=True, eq=False)
class MutatedRep:
    rep: Representation
    source: Representation
    triangle: LocalTriangle
    choice: SplittingChoice
    sign: str

    @property
    def block_dims(self):
        return self.choice.c1.dim, self.choice.c2.dim, self.choice.c3.dim


def premutate_rep(M: Representation, k, direction: str = PLUS,
                  choice: Optional[SplittingChoice] = None,
                  rng: Optional[np.random.Generator] = None,
                  check: bool = True) -> MutatedRep:
    """The premutation at ``k``: a representation of the premutated QP."""
    F, Q = M.field, M.quiver
    k = Q.check_vertex(k)
    s = _sign(direction)
    qp_new = premutate(M.qp, k, direction)
    T = local_triangle(M, k)
    if choice is None:
        choice = splitting_choice(M, T, rng)
    c1, c2, c3 = choice.c1, choice.c2, choice.c3
    d1, d2, d3 = c1.dim, c2.dim, c3.dim
    n_out = T.n_out
    # new alpha: M_out -> Mbar_k, new beta: Mbar_k -> M_in
    new_alpha = el.vstack(F, [c1.proj, el.matmul(F, c2.proj, T.gamma), F.zeros(d3, n_out)], n_out)
    if s > 0:
        new_alpha = el.neg(F, new_alpha)
    new_beta = el.hstack(F, [F.zeros(T.n_in, d1), c2.section, c3.section], T.n_in)
    act: Dict[str, np.ndarray] = {}
    for a in Q.arrows:
        if a.head != k and a.tail != k:
            act[a.id] = M.action[a.id]
    for a in Q.in_arrows(k):
        for b in Q.out_arrows(k):
            act[composite(b.id, a.id)] = el.matmul(F, M.action[b.id], M.action[a.id])
    off = 0
    for p, a in enumerate(T.in_arrows):
        act[star(a)] = new_beta[off:off + T.in_dims[p], :]
        off += T.in_dims[p]
    off = 0
    for q, b in enumerate(T.out_arrows):
        act[star(b)] = new_alpha[:, off:off + T.out_dims[q]]
        off += T.out_dims[q]
    dims = dict(M.dims)
    dims[k] = d1 + d2 + d3
    rep = Representation(qp_new, dims, act, check=check)
    return MutatedRep(rep, M, T, choice, PLUS if s > 0 else MINUS)


def reduce_rep(mr, sr: SplitResult, check: bool = True) -> Representation:
    """Transport along the splitting and keep the reduced arrows.

    Each reduced arrow acts by the inverse splitting equivalence evaluated
    on the premutated representation; trivial arrows must then act by zero.
    """
    barM = mr.rep if isinstance(mr, MutatedRep) else mr
    if barM.qp != sr.source:
        raise PreconditionViolated("split result does not belong to this representation's QP")
    D = sr.source.degree_bound
    nil = nilpotency_index(barM)
    if nil is None or nil > D + 1:
        raise DegreeOverflow(f"nilpotency index {nil} exceeds degree bound {D} + 1")
    inv = sr.phi.inverse()
    Q = barM.quiver
    act = {}
    for a in Q.arrows:
        m = barM.evaluate(inv.images[a.id], a.tail, a.head)
        act[a.id] = m
    for u, v in sr.pairs:
        for x in (u, v):
            if not el.is_zero(act[x]):
                raise RelationViolated(x, tuple(int(i) for i in np.argwhere(act[x] != 0)[0]),
                                       f"trivial arrow {x} acts nontrivially after transport")
    red = sr.reduced_part
    return Representation(red, barM.dims, {a: act[a] for a in red.quiver.arrow_ids}, check=check)


@dataclass(frozen=True, eq=False)
class RepMutation:
    rep: Representation
    premutation: MutatedRep
    split: SplitResult


def mutate_rep_data(M: Representation, k, direction: str = PLUS,
                    choice: Optional[SplittingChoice] = None,
                    rng: Optional[np.random.Generator] = None,
                    strict: bool = False) -> RepMutation:
    pre = premutate_rep(M, k, direction, choice=choice, rng=rng)
    _, sr = mutate(M.qp, k, direction, strict=strict)
    return RepMutation(reduce_rep(pre, sr), pre, sr)


def mutate_rep(M: Representation, k, direction: str = PLUS,
               choice: Optional[SplittingChoice] = None,
               rng: Optional[np.random.Generator] = None,
               strict: bool = False) -> Representation:
    return mutate_rep_data(M, k, direction, choice, rng, strict).rep


def sign_twist(M: Representation, k, arrows=None) -> Representation:
    """Negate the arrows leaving ``k`` (or the given arrows)."""
    F = M.field
    k = M.quiver.check_vertex(k)
    chosen = set(arrows) if arrows is not None else {b.id for b in M.quiver.out_arrows(k)}
    act = {a: (el.neg(F, m) if a in chosen else m) for a, m in M.action.items()}
    return Representation(M.qp, M.dims, act, check=False)


def double_premutation_restricted(M: Representation, k, first: str = PLUS, second: str = PLUS,
                                  rng: Optional[np.random.Generator] = None) -> Representation:
    """Premutate twice and read the result on the original arrows.

    ``a**`` and ``b**`` are identified with ``a`` and ``b``; composites are
    dropped. The result carries ``M``'s QP without re-checking relations.
    """
    k = str(k)
    once = premutate_rep(M, k, first, rng=rng).rep
    twice = premutate_rep(once, k, second, rng=rng).rep
    Q = M.quiver
    act = {}
    for a in Q.arrows:
        name = star(star(a.id)) if k in (a.head, a.tail) else a.id
        act[a.id] = twice.action[name]
    return Representation(M.qp, twice.dims, act, check=False)


def involution_witness(M: Representation, k) -> Representation:
    """``sign_twist`` of the restricted double premutation; isomorphic to ``M``
    when ``M`` has no summand ``S_k``."""
    return sign_twist(double_premutation_restricted(M, k), k)


def check_star_order(Q: Quiver, k) -> None:
    """Sorting by id must commute with adding ``*`` so block orders agree."""
    k = str(k)
    for group in (Q.in_arrows(k), Q.out_arrows(k)):
        ids = [a.id for a in group]
        if sorted(star(i) for i in ids) != [star(i) for i in ids]:
            raise PreconditionViolated(f"arrow ids {ids} do not sort compatibly with '*'")
