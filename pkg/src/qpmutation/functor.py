"""Mutation on morphisms and the explicit quasi-inverse.

Coordinates: every subquotient is handled through a chart, so all maps below
are plain matrices between chart coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import exactlin as el
from .errors import ContainmentViolation, NotAMorphism, NotWellDefined, PreconditionViolated
from .qpmut import MINUS, PLUS
from .quiver import star
from .repcat import RepMorphism, Representation, alpha_beta
from .repmut import (LocalTriangle, MutatedRep, RepMutation, local_triangle, mutate_rep_data,
                     premutate_rep)


def _block_rows(F, blocks, row_dims, col_dims) -> np.ndarray:
    rows = [el.hstack(F, [blocks[r][c] if blocks[r][c] is not None else F.zeros(row_dims[r], col_dims[c])
                          for c in range(len(col_dims))], row_dims[r])
            for r in range(len(row_dims))]
    return el.vstack(F, rows, sum(col_dims))


# ---------------------------------------------------------------------------
# the auxiliary maps around coker(beta) and ker(alpha)


@dataclass(frozen=True, eq=False)
class ExactaData:
    triangle: LocalTriangle
    c1: el.SubquotientChart   # ker gamma / im beta
    c2: el.SubquotientChart   # im gamma
    c3: el.SubquotientChart   # ker alpha / im gamma
    coker: el.SubquotientChart   # M_out / im beta
    ker_alpha: el.SubquotientChart
    i_t: np.ndarray
    rho_t: np.ndarray
    gamma_t: np.ndarray
    j: np.ndarray
    iota: np.ndarray
    sigma: np.ndarray
    pi: np.ndarray
    eps: np.ndarray

    def identities(self) -> Tuple[bool, bool]:
        F = self.c1.field
        n_ck, n_ka = self.coker.dim, self.ker_alpha.dim
        first = el.add(F, el.matmul(F, self.i_t, self.rho_t), el.matmul(F, self.j, self.gamma_t))
        second = el.add(F, el.matmul(F, self.iota, self.eps), el.matmul(F, self.sigma, self.pi))
        return (np.array_equal(first, el.eye(F, n_ck)), np.array_equal(second, el.eye(F, n_ka)))


def exacta_data(mr: MutatedRep) -> ExactaData:
    """Auxiliary maps for the premutation data ``mr`` (its triangle and charts)."""
    T, ch = mr.triangle, mr.choice
    F = ch.c1.field
    c1, c2, c3 = ch.c1, ch.c2, ch.c3
    im_b = el.image(F, T.beta)
    ck = el.make_chart(F, el.Subspace.full(F, T.n_out), im_b)
    ka = el.make_chart(F, el.kernel(F, T.alpha))
    i_t = el.matmul(F, ck.proj, c1.section)
    rho_t = el.matmul(F, c1.proj, ck.section)
    gamma_t = el.mats_mul(F, c2.proj, T.gamma, ck.section)
    D1 = c1.complement
    g_on_d1 = el.mats_mul(F, c2.proj, T.gamma, D1)
    j = el.mats_mul(F, ck.proj, D1, el.inverse(F, g_on_d1))
    iota = el.matmul(F, ka.proj, c2.section)
    sigma = el.matmul(F, ka.proj, c3.section)
    pi = el.matmul(F, c3.proj, ka.section)
    strip = el.sub(F, el.eye(F, T.n_in), el.matmul(F, c3.section, c3.proj))
    eps = el.mats_mul(F, c2.proj, strip, ka.section)
    data = ExactaData(T, c1, c2, c3, ck, ka, i_t, rho_t, gamma_t, j, iota, sigma, pi, eps)
    if not all(data.identities()):
        raise PreconditionViolated("splitting identities fail; is the representation valid?")
    return data


# ---------------------------------------------------------------------------
# mutation of morphisms


def _f_in_out(f: RepMorphism, T: LocalTriangle):
    F = f.field
    Q = f.source.quiver
    f_in = el.block_diag(F, [f.maps[Q.tail(a)] for a in T.in_arrows])
    f_out = el.block_diag(F, [f.maps[Q.head(b)] for b in T.out_arrows])
    if f_in.shape == (0, 0):
        f_in = F.zeros(0, 0)
    if f_out.shape == (0, 0):
        f_out = F.zeros(0, 0)
    return f_in, f_out


def premutation_block(f: RepMorphism, EM: ExactaData, EN: ExactaData) -> np.ndarray:
    """The 3x3 block matrix of the premutated morphism at ``k``."""
    F = f.field
    f_in, f_out = _f_in_out(f, EM.triangle)
    # the central squares: f_out maps im beta_M into im beta_N and ker alpha_M into ker alpha_N
    try:
        f_bar = el.induced_map(F, f_out, EM.coker, EN.coker)
        f_ker = el.induced_map(F, f_in, EM.ker_alpha, EN.ker_alpha)
    except NotWellDefined as exc:
        raise NotAMorphism(f"f does not induce maps on coker beta / ker alpha: {exc}") from None
    mm = el.mats_mul
    blocks = [
        [mm(F, EN.rho_t, f_bar, EM.i_t), mm(F, EN.rho_t, f_bar, EM.j), None],
        [mm(F, EN.gamma_t, f_bar, EM.i_t), mm(F, EN.eps, f_ker, EM.iota), mm(F, EN.eps, f_ker, EM.sigma)],
        [None, mm(F, EN.pi, f_ker, EM.iota), mm(F, EN.pi, f_ker, EM.sigma)],
    ]
    rows = (EN.c1.dim, EN.c2.dim, EN.c3.dim)
    cols = (EM.c1.dim, EM.c2.dim, EM.c3.dim)
    return _block_rows(F, blocks, rows, cols)


def premutate_morphism(f: RepMorphism, mrM: MutatedRep, mrN: MutatedRep,
                       check: bool = True) -> RepMorphism:
    """``f`` carried to the premutated representations; ``f_j`` unchanged off ``k``."""
    k = mrM.triangle.k
    maps = dict(f.maps)
    maps[k] = premutation_block(f, exacta_data(mrM), exacta_data(mrN))
    return RepMorphism(mrM.rep, mrN.rep, maps, check=check)


def mu_morphism(f: RepMorphism, k, direction: str = PLUS,
                mutM: Optional[RepMutation] = None, mutN: Optional[RepMutation] = None,
                check: bool = True) -> RepMorphism:
    """``mu_k(f)`` between the mutated (reduced) representations."""
    k = str(k)
    mutM = mutM or mutate_rep_data(f.source, k, direction)
    mutN = mutN or mutate_rep_data(f.target, k, direction)
    block = premutation_block(f, exacta_data(mutM.premutation), exacta_data(mutN.premutation))
    maps = dict(f.maps)
    maps[k] = block
    return RepMorphism(mutM.rep, mutN.rep, maps, check=check)


def mu_plus_morphism(f: RepMorphism, k, mutM=None, mutN=None, check: bool = True) -> RepMorphism:
    return mu_morphism(f, k, PLUS, mutM, mutN, check)


def mu_minus_morphism(f: RepMorphism, k, mutM=None, mutN=None, check: bool = True) -> RepMorphism:
    return mu_morphism(f, k, MINUS, mutM, mutN, check)


# ---------------------------------------------------------------------------
# the identification of mu^- mu^+ (M) with a representation on the old arrows


def _chart_or_fail(F, sub, quot=None):
    try:
        return el.make_chart(F, sub, quot)
    except ContainmentViolation:
        raise PreconditionViolated("ker beta is not inside im alpha: split off S_k first") from None


@dataclass(frozen=True, eq=False)
class PrimeIdentification:
    """``M' = mu^- mu^+ (M)`` written on ``ker beta ⊕ im alpha/ker beta ⊕ M_k/im alpha``."""

    source: Representation
    k: str
    first: MutatedRep    # plus premutation of M
    second: MutatedRep   # minus premutation of the first
    ker_beta: el.SubquotientChart
    im_alpha_mod: el.SubquotientChart
    coker_alpha: el.SubquotientChart
    alpha_t: np.ndarray
    beta_t: np.ndarray
    beta_h: np.ndarray
    transport: np.ndarray     # ident coordinates -> coordinates of the double premutation
    rep: Representation       # M' on the quiver of M

    @property
    def block_dims(self):
        return self.ker_beta.dim, self.im_alpha_mod.dim, self.coker_alpha.dim

    def alpha_prime(self) -> np.ndarray:
        return alpha_beta(self.rep, self.k)[0]

    def beta_prime(self) -> np.ndarray:
        return alpha_beta(self.rep, self.k)[1]

    def formula_alpha_prime(self) -> np.ndarray:
        """``(alpha rho_bar; pi alpha; 0)`` computed directly from M's data."""
        F = self.source.field
        alpha, _ = alpha_beta(self.source, self.k)
        c1 = self.second.choice.c1
        rho_bar = el.matmul(F, c1.section, c1.proj)
        top = el.mats_mul(F, self.ker_beta.proj, alpha, rho_bar)
        mid = el.matmul(F, self.im_alpha_mod.proj, alpha)
        return el.vstack(F, [top, mid, F.zeros(self.coker_alpha.dim, alpha.shape[1])], alpha.shape[1])

    def formula_beta_prime(self) -> np.ndarray:
        F = self.source.field
        ch = self.second.choice
        n_out = ch.c2.ambient_dim
        return el.hstack(F, [F.zeros(n_out, self.ker_beta.dim),
                             el.matmul(F, ch.c2.section, self.beta_t),
                             el.matmul(F, ch.c3.section, self.beta_h)], n_out)

    def induced_ranks_ok(self) -> bool:
        F = self.source.field
        return all(m.shape[0] == m.shape[1] and el.is_invertible(F, m)
                   for m in (self.alpha_t, self.beta_t, self.beta_h))

    def rel_alpha(self) -> dict:
        """The six subspace identities relating the triangles of M and its premutation."""
        F = self.source.field
        alpha, beta = alpha_beta(self.source, self.k)
        d1, d2, d3 = self.first.block_dims
        n = d1 + d2 + d3
        ba = el.matmul(F, beta, alpha)

        def coords(idx):
            return el.Subspace(F, n, el.eye(F, n)[:, idx])

        # triangle of the premutation at k: in-arrows b*, out-arrows a*
        bar = local_triangle(self.first.rep, self.k)
        return {
            "ker alpha_bar = im beta": el.kernel(F, bar.alpha) == el.image(F, beta),
            "im alpha_bar = first two summands": el.image(F, bar.alpha) == coords(list(range(d1 + d2))),
            "ker beta_bar = first summand": el.kernel(F, bar.beta) == coords(list(range(d1))),
            "im beta_bar = ker alpha": el.image(F, bar.beta) == el.kernel(F, alpha),
            "ker gamma_bar = ker beta alpha": el.kernel(F, bar.gamma) == el.kernel(F, ba),
            "im gamma_bar = im beta alpha": el.image(F, bar.gamma) == el.image(F, ba),
        }


def prime_identification(M: Representation, k, check: bool = True) -> PrimeIdentification:
    F, Q = M.field, M.quiver
    k = Q.check_vertex(k)
    first = premutate_rep(M, k, PLUS)
    second = premutate_rep(first.rep, k, MINUS)
    alpha, beta = alpha_beta(M, k)
    n = M.dims[k]
    kb, ia = el.kernel(F, beta), el.image(F, alpha)
    Kb = _chart_or_fail(F, kb)
    Ia = _chart_or_fail(F, ia, kb)
    Qa = _chart_or_fail(F, el.Subspace.full(F, n), ia)
    ch = second.choice
    alpha_t = el.mats_mul(F, Kb.proj, alpha, ch.c1.section)
    beta_t = el.mats_mul(F, ch.c2.proj, beta, Ia.section)
    beta_h = el.mats_mul(F, ch.c3.proj, beta, Qa.section)
    for name, m in (("alpha~", alpha_t), ("beta~", beta_t), ("beta^", beta_h)):
        if m.shape[0] != m.shape[1] or not el.is_invertible(F, m):
            raise PreconditionViolated(f"induced map {name} is not an isomorphism")
    T = el.block_diag(F, [el.inverse(F, alpha_t), beta_t, beta_h])
    Tinv = el.inverse(F, T)
    twice = second.rep
    act = {}
    for a in Q.arrows:
        if a.head == k:
            act[a.id] = el.matmul(F, Tinv, twice.action[star(star(a.id))])
        elif a.tail == k:
            act[a.id] = el.matmul(F, twice.action[star(star(a.id))], T)
        else:
            act[a.id] = M.action[a.id]
    rep = Representation(M.qp, M.dims, act, check=check)
    return PrimeIdentification(M, k, first, second, Kb, Ia, Qa, alpha_t, beta_t, beta_h, T, rep)


def quasi_inverse_morphism(f: RepMorphism, idM: PrimeIdentification, idN: PrimeIdentification,
                           check: bool = True) -> RepMorphism:
    """``f' = mu^- mu^+ (f)`` as a morphism ``M' -> N'``."""
    F = f.field
    k = idM.k
    g = premutate_morphism(f, idM.first, idN.first, check=check)
    h = premutate_morphism(g, idM.second, idN.second, check=check)
    maps = dict(f.maps)
    maps[k] = el.mats_mul(F, el.inverse(F, idN.transport), h.maps[k], idM.transport)
    return RepMorphism(idM.rep, idN.rep, maps, check=check)


# ---------------------------------------------------------------------------
# the natural isomorphism psi


@dataclass(frozen=True, eq=False)
class PsiWitness:
    ident: PrimeIdentification
    sigma1: np.ndarray   # im alpha / ker beta -> M_k
    sigma2: np.ndarray   # M_k / im alpha -> M_k
    psi_k: np.ndarray    # M'_k -> M_k

    def morphism(self) -> RepMorphism:
        """``psi_M : M' -> M`` (identity away from ``k``)."""
        M = self.ident.source
        maps = {v: el.eye(M.field, d) for v, d in M.dims.items()}
        maps[self.ident.k] = self.psi_k
        return RepMorphism(self.ident.rep, M, maps, check=False)

    def conditions(self) -> dict:
        F = self.ident.source.field
        alpha, beta = alpha_beta(self.ident.source, self.ident.k)
        ap, bp = self.ident.alpha_prime(), self.ident.beta_prime()
        return {
            "psi invertible": el.is_invertible(F, self.psi_k),
            "psi alpha' = alpha": np.array_equal(el.matmul(F, self.psi_k, ap), alpha),
            "beta psi = beta'": np.array_equal(el.matmul(F, beta, self.psi_k), bp),
        }

    def section_conditions(self) -> dict:
        F = self.ident.source.field
        ident = self.ident
        alpha, beta = alpha_beta(ident.source, ident.k)
        n = ident.source.dims[ident.k]
        c1, c3 = ident.second.choice.c1, ident.second.choice.c3
        ker_rho_bar = el.matmul(F, alpha, c1.complement)
        return {
            "im sigma1 = alpha(ker rho_bar)":
                el.Subspace(F, n, self.sigma1) == el.Subspace(F, n, ker_rho_bar),
            "im beta sigma2 = im sigma_bar":
                el.Subspace(F, beta.shape[0], el.matmul(F, beta, self.sigma2))
                == el.Subspace(F, beta.shape[0], c3.section),
        }


def psi(M: Representation, k, ident: Optional[PrimeIdentification] = None) -> PsiWitness:
    """``psi_{k,M} = (iota, iota sigma1, iota sigma2)`` on ``M'_k``."""
    F = M.field
    k = M.quiver.check_vertex(k)
    ident = ident or prime_identification(M, k)
    alpha, beta = alpha_beta(M, k)
    n = M.dims[k]
    c1, c3 = ident.second.choice.c1, ident.second.choice.c3
    Ia, Qa = ident.im_alpha_mod, ident.coker_alpha
    a_d1 = el.matmul(F, alpha, c1.complement)
    sigma1 = el.matmul(F, a_d1, el.inverse(F, el.matmul(F, Ia.proj, a_d1)))
    ba = el.matmul(F, beta, alpha)
    cols = []
    for i in range(Qa.dim):
        y = Qa.section[:, i:i + 1]
        by = el.matmul(F, beta, y)
        z = el.sub(F, by, el.mats_mul(F, c3.section, c3.proj, by))
        w = el.solve(F, ba, z)
        if w is None:
            raise PreconditionViolated("beta y - sigma_bar[beta y] is not in im beta alpha")
        cols.append(el.sub(F, y, el.matmul(F, alpha, w)))
    sigma2 = el.hstack(F, cols, n)
    psi_k = el.hstack(F, [ident.ker_beta.section, sigma1, sigma2], n)
    return PsiWitness(ident, sigma1, sigma2, psi_k)


def naturality_defect(f: RepMorphism, psiM: PsiWitness, psiN: PsiWitness,
                      f_prime: Optional[RepMorphism] = None) -> RepMorphism:
    """``f psi_M - psi_N f'`` as a map ``M' -> N``."""
    f_prime = f_prime or quasi_inverse_morphism(f, psiM.ident, psiN.ident)
    left = f.compose(psiM.morphism())
    right = psiN.morphism().compose(f_prime)
    return left - right

