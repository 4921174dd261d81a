"""Quivers with potential: premutation, splitting and mutation."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

from . import exactlin as el
from .errors import DegreeOverflow, NotSplittable, QuiverMismatch
from .potential import (DEFAULT_DEGREE_BOUND, Path, Potential, RightEquivalence,
                        apply_equivalence, elem_add_into)
from .quiver import Quiver, composite, premutate_quiver, star, validate_mutable

PLUS, MINUS = "plus", "minus"


def _sign(direction: str) -> int:
    if direction in (PLUS, "+", 1):
        return 1
    if direction in (MINUS, "-", -1):
        return -1
    raise ValueError(f"unknown direction {direction!r}")


@dataclass(frozen=True)
class QP:
    quiver: Quiver
    potential: Potential

    def __post_init__(self):
        if self.potential.quiver != self.quiver:
            raise QuiverMismatch("potential lives on a different quiver")

    @classmethod
    def make(cls, quiver: Quiver, field, terms=(), degree_bound: int = DEFAULT_DEGREE_BOUND) -> "QP":
        return cls(quiver, Potential.from_terms(quiver, field, terms, degree_bound))

    @property
    def field(self):
        return self.potential.field

    @property
    def degree_bound(self) -> int:
        return self.potential.degree_bound

    def is_reduced(self) -> bool:
        return not self.potential.degree_part(2)

    def is_trivial(self) -> bool:
        S2 = self.potential.degree_part(2)
        if S2 != self.potential:
            return False
        used = [a for p, _ in S2.terms for a in p]
        return sorted(used) == sorted(self.quiver.arrow_ids)

    def to_json(self) -> dict:
        return {"quiver": self.quiver.to_json(), "potential": self.potential.to_json()}

    @classmethod
    def from_json(cls, data: dict, field, degree_bound=None) -> "QP":
        Q = Quiver.from_json(data["quiver"])
        return cls(Q, Potential.from_json(Q, field, data.get("potential", {}), degree_bound))


# ---------------------------------------------------------------------------
# premutation


def bracket_term(Q: Quiver, k: str, cycle: Path) -> Path:
    """Replace every factor ``b a`` through ``k`` by the composite ``[ba]``."""
    n = len(cycle)
    ins = {a.id for a in Q.in_arrows(k)}
    start = next(i for i in range(n) if cycle[i] not in ins)
    t = cycle[start:] + cycle[:start]
    out: List[str] = []
    for x in t:
        if x in ins:
            out[-1] = composite(out[-1], x)
        else:
            out.append(x)
    return tuple(out)


def premutate(qp: QP, k, direction: str = PLUS) -> QP:
    """``[S] ± sum [ba] a* b*`` on the premutated quiver."""
    Q = qp.quiver
    validate_mutable(Q, k)
    k = str(k)
    sign = _sign(direction)
    F = qp.field
    D = qp.degree_bound
    P = premutate_quiver(Q, k)
    terms = [(c, bracket_term(Q, k, p)) for p, c in qp.potential.terms]
    cubic = [(F(sign), (composite(b.id, a.id), star(a.id), star(b.id)))
             for a in Q.in_arrows(k) for b in Q.out_arrows(k)]
    if cubic and D < 3:
        raise DegreeOverflow(f"cubic terms exceed degree bound {D}")
    return QP(P, Potential.from_terms(P, F, terms + cubic, D))


def premutate_plus(qp: QP, k) -> QP:
    return premutate(qp, k, PLUS)


def premutate_minus(qp: QP, k) -> QP:
    return premutate(qp, k, MINUS)


# ---------------------------------------------------------------------------
# splitting


@dataclass(frozen=True, eq=False)
class SplitResult:
    """``phi`` is a right-equivalence of the input quiver with
    ``phi(S) = S_triv + S_red`` up to cyclic equivalence."""

    source: QP
    trivial_part: QP
    reduced_part: QP
    phi: RightEquivalence
    pairs: Tuple[Tuple[str, str], ...]

    @property
    def phi_r(self) -> RightEquivalence:
        """Action data for the reduced arrows, expressed in the input arrows."""
        return self.phi.inverse().restrict(self.reduced_part.quiver.arrow_ids)

    def certify(self) -> bool:
        lhs = apply_equivalence(self.phi, self.source.potential)
        S_t = self.trivial_part.potential.on_quiver(self.source.quiver)
        S_r = self.reduced_part.potential.on_quiver(self.source.quiver)
        return lhs.terms == (S_t + S_r).terms

    def to_json(self) -> dict:
        return {"trivial_part": self.trivial_part.to_json(),
                "reduced_part": self.reduced_part.to_json(),
                "pairs": [list(p) for p in self.pairs],
                "phi": self.phi.to_json()}


def _quadratic_normalization(qp: QP):
    """Linear right-equivalence bringing the degree-2 part to ``sum u_l v_l``."""
    Q, F = qp.quiver, qp.field
    order = {v: n for n, v in enumerate(Q.vertices)}
    S2 = qp.potential.degree_part(2).as_dict
    images: Dict[str, Dict[Path, object]] = {}
    pairs: List[Tuple[str, str]] = []
    vertex_pairs = sorted({tuple(sorted((Q.tail(p[0]), Q.head(p[0])), key=order.__getitem__))
                           for p in S2}, key=lambda ij: (order[ij[0]], order[ij[1]]))
    for i, j in vertex_pairs:
        rows = [a.id for a in Q.arrows_between(i, j)]
        cols = [a.id for a in Q.arrows_between(j, i)]
        C = F.zeros(len(rows), len(cols))
        for r, x in enumerate(rows):
            for c, y in enumerate(cols):
                C[r, c] = S2.get(min((x, y), (y, x)), F.zero())
        _, Cp = el.rref(F, C)
        _, Rp = el.rref(F, C.T)
        Rp, Cp = list(Rp), list(Cp)
        nonR = [r for r in range(len(rows)) if r not in Rp]
        nonC = [c for c in range(len(cols)) if c not in Cp]
        G = C[Rp][:, Cp]
        Ginv = el.inverse(F, G)
        L = el.matmul(F, C[nonR][:, Cp], Ginv)
        H = C[Rp][:, nonC]
        one = F.one()
        for l, r in enumerate(Rp):
            img = {(rows[r],): one}
            for m, rr in enumerate(nonR):
                if L[m, l]:
                    elem_add_into(F, img, {(rows[rr],): F.neg(L[m, l])})
            images[rows[r]] = img
        # y_Cp -> G^{-1} (y_Cp - H y_nonCp)
        for l, c in enumerate(Cp):
            img: Dict[Path, object] = {}
            for m, cc in enumerate(Cp):
                if Ginv[l, m]:
                    elem_add_into(F, img, {(cols[cc],): Ginv[l, m]})
            for m in range(len(Cp)):
                if not Ginv[l, m]:
                    continue
                for n, cn in enumerate(nonC):
                    if H[m, n]:
                        elem_add_into(F, img, {(cols[cn],): F.neg(F.mul(Ginv[l, m], H[m, n]))})
            images[cols[c]] = img
        pairs.extend((rows[r], cols[c]) for r, c in zip(Rp, Cp))
    phi = RightEquivalence(Q, Q, F, images, qp.degree_bound)
    return phi, pairs


def split(qp: QP, strict: bool = False) -> SplitResult:
    """Constructive splitting into a trivial and a reduced part.

    After a linear change of arrows the quadratic part is ``sum u_l v_l``.
    Each round collects the terms meeting a trivial arrow, rotated to start
    at their first trivial arrow: ``u_l R`` feeds ``v_l -> v_l - R`` and
    ``v_l R`` feeds ``u_l -> u_l - R``. The lowest degree of such terms rises
    every round, so at most ``D`` rounds are needed.
    """
    Q, F, D = qp.quiver, qp.field, qp.degree_bound
    phi, pairs = _quadratic_normalization(qp)
    S = apply_equivalence(phi, qp.potential, strict=strict)
    trivial = {}
    for l, (u, v) in enumerate(pairs):
        trivial[u] = (l, "u")
        trivial[v] = (l, "v")
    quad = {min((u, v), (v, u)) for u, v in pairs}
    for _ in range(D + 1):
        A: Dict[int, Dict[Path, object]] = {}
        B: Dict[int, Dict[Path, object]] = {}
        for p, c in S.terms:
            if p in quad:
                continue
            pos = next((i for i, a in enumerate(p) if a in trivial), None)
            if pos is None:
                continue
            t = p[pos:] + p[:pos]
            l, kind = trivial[t[0]]
            target = A if kind == "u" else B
            elem_add_into(F, target.setdefault(l, {}), {t[1:]: c})
        if not A and not B:
            break
        images = {}
        minus = F.neg(F.one())
        for l, R in A.items():
            v = pairs[l][1]
            images[v] = elem_add_into(F, {(v,): F.one()}, R, minus)
        for l, R in B.items():
            u = pairs[l][0]
            images[u] = elem_add_into(F, {(u,): F.one()}, R, minus)
        step = RightEquivalence(Q, Q, F, images, D, check=False)
        S = apply_equivalence(step, S, strict=strict)
        phi = step.compose(phi)
    else:
        raise NotSplittable(f"mixed terms survive {D + 1} rounds")
    triv_ids = [a for uv in pairs for a in uv]
    Q_triv = Q.subquiver(triv_ids)
    Q_red = Q.without(triv_ids)
    S_t = {p: c for p, c in S.terms if p in quad}
    S_r = {p: c for p, c in S.terms if p not in quad}
    for p in S_r:
        if len(p) == 2:
            raise NotSplittable(f"degree-2 term {''.join(p)} left after normalization")
    triv = QP(Q_triv, Potential._from_canonical(Q_triv, F, S_t, D))
    red = QP(Q_red, Potential._from_canonical(Q_red, F, S_r, D))
    result = SplitResult(qp, triv, red, phi, tuple(pairs))
    if not result.certify():
        raise NotSplittable("splitting certificate failed")
    return result


# ---------------------------------------------------------------------------
# mutation


@lru_cache(maxsize=256)
def _mutate_cached(qp: QP, k: str, direction: str, strict: bool):
    pre = premutate(qp, k, direction)
    sr = split(pre, strict=strict)
    return sr.reduced_part, sr


def mutate(qp: QP, k, direction: str = PLUS, strict: bool = False) -> Tuple[QP, SplitResult]:
    return _mutate_cached(qp, str(k), PLUS if _sign(direction) > 0 else MINUS, strict)


def mutate_plus(qp: QP, k, strict: bool = False) -> Tuple[QP, SplitResult]:
    return mutate(qp, k, PLUS, strict)


def mutate_minus(qp: QP, k, strict: bool = False) -> Tuple[QP, SplitResult]:
    return mutate(qp, k, MINUS, strict)
