"""Degree-truncated potentials, cyclic derivatives and right-equivalences.

Paths are tuples of arrow ids written in composition order: ``("c", "b", "a")``
is the path ``cba`` in which ``a`` acts first. Elements of the truncated
complete path algebra are dicts from paths to nonzero field scalars; all
products discard paths longer than the degree bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import exactlin as el
from .errors import (ArrowsNotComposableAtK, DegreeOverflow, NotACycle, QuiverMismatch,
                     UnknownArrow)
from .quiver import Quiver

Path = Tuple[str, ...]
Element = Dict[Path, object]

DEFAULT_DEGREE_BOUND = 12


# ---------------------------------------------------------------------------
# elements of the path algebra


def elem_add_into(F, acc: Element, x: Mapping[Path, object], coeff=None) -> Element:
    for p, c in x.items():
        if coeff is not None:
            c = F.mul(c, coeff)
        v = F.add(acc.get(p, F.zero()), c)
        if v:
            acc[p] = v
        else:
            acc.pop(p, None)
    return acc


def elem_scale(F, x: Mapping[Path, object], s) -> Element:
    out = {}
    for p, c in x.items():
        v = F.mul(c, s)
        if v:
            out[p] = v
    return out


def elem_sub(F, x, y) -> Element:
    return elem_add_into(F, dict(x), y, F.neg(F.one()))


def elem_mul(F, x: Mapping[Path, object], y: Mapping[Path, object], bound: Optional[int]) -> Element:
    """Product ``x * y`` (``y`` acts first), dropping paths longer than ``bound``."""
    out: Element = {}
    for p, cp in x.items():
        for q, cq in y.items():
            if bound is not None and len(p) + len(q) > bound:
                continue
            r = p + q
            v = F.add(out.get(r, F.zero()), F.mul(cp, cq))
            if v:
                out[r] = v
            else:
                out.pop(r, None)
    return out


def elem_degree_part(x: Mapping[Path, object], d: int) -> Element:
    return {p: c for p, c in x.items() if len(p) == d}


def format_element(F, x: Mapping[Path, object]) -> str:
    if not x:
        return "0"
    parts = []
    for p, c in sorted(x.items()):
        word = "".join(p) if p else "e"
        parts.append(f"{F.format(c)}*{word}")
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# cycles


def is_cycle(Q: Quiver, path: Sequence[str]) -> bool:
    if not path:
        return False
    try:
        if not Q.is_path(path):
            return False
        start, end = Q.path_ends(path)
    except UnknownArrow:
        return False
    return start == end


def rotations(path: Sequence[str]) -> List[Path]:
    t = tuple(path)
    return [t[i:] + t[:i] for i in range(len(t))]


def normalize_cycle(Q: Quiver, path: Sequence[str]) -> Path:
    """Lexicographically least rotation of a cycle."""
    if not is_cycle(Q, path):
        raise NotACycle(f"{''.join(path)} is not a cycle")
    return min(rotations(path))


def _canonical(path: Path) -> Path:
    return min(rotations(path))


# ---------------------------------------------------------------------------
# potentials


@dataclass(frozen=True)
class Potential:
    """A finite combination of cycles, one canonical rotation per cyclic class."""

    quiver: Quiver
    field: object
    terms: Tuple[Tuple[Path, object], ...]
    degree_bound: int = DEFAULT_DEGREE_BOUND

    @classmethod
    def from_terms(cls, quiver: Quiver, field, terms: Iterable[Tuple[object, Sequence[str]]],
                   degree_bound: int = DEFAULT_DEGREE_BOUND, truncate: bool = False) -> "Potential":
        acc: Element = {}
        for coeff, cycle in terms:
            cycle = tuple(cycle)
            if len(cycle) > degree_bound:
                if truncate:
                    continue
                raise DegreeOverflow(f"term {''.join(cycle)} exceeds degree bound {degree_bound}")
            key = normalize_cycle(quiver, cycle)
            elem_add_into(field, acc, {key: field(coeff)})
        return cls._from_canonical(quiver, field, acc, degree_bound)

    @classmethod
    def _from_canonical(cls, quiver, field, acc: Mapping[Path, object], degree_bound) -> "Potential":
        items = tuple(sorted((p, c) for p, c in acc.items() if c))
        return cls(quiver, field, items, degree_bound)

    @classmethod
    def zero(cls, quiver: Quiver, field, degree_bound: int = DEFAULT_DEGREE_BOUND) -> "Potential":
        return cls(quiver, field, (), degree_bound)

    @classmethod
    def from_element(cls, quiver, field, x: Mapping[Path, object], degree_bound,
                     strict: bool = False) -> "Potential":
        """Cyclically normalize an element whose paths are all cycles."""
        acc: Element = {}
        over: Element = {}
        for p, c in x.items():
            if not p:
                raise NotACycle("empty path in a potential")
            key = _canonical(p)
            target = acc if len(p) <= degree_bound else over
            elem_add_into(field, target, {key: c})
        if strict and over:
            raise DegreeOverflow(f"nonzero terms beyond degree {degree_bound}: "
                                 f"{format_element(field, over)}")
        return cls._from_canonical(quiver, field, acc, degree_bound)

    @property
    def as_dict(self) -> Dict[Path, object]:
        return dict(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def _check_compatible(self, other: "Potential"):
        if self.quiver != other.quiver or self.degree_bound != other.degree_bound:
            raise QuiverMismatch("potentials live on different quivers or degree bounds")

    def __add__(self, other: "Potential") -> "Potential":
        self._check_compatible(other)
        acc = elem_add_into(self.field, self.as_dict, other.as_dict)
        return Potential._from_canonical(self.quiver, self.field, acc, self.degree_bound)

    def __sub__(self, other: "Potential") -> "Potential":
        return self + other.scale(self.field.neg(self.field.one()))

    def __neg__(self):
        return self.scale(self.field.neg(self.field.one()))

    def scale(self, s) -> "Potential":
        return Potential._from_canonical(self.quiver, self.field,
                                         elem_scale(self.field, self.as_dict, self.field(s)),
                                         self.degree_bound)

    def degree_part(self, d: int) -> "Potential":
        return Potential(self.quiver, self.field,
                         tuple((p, c) for p, c in self.terms if len(p) == d), self.degree_bound)

    def on_quiver(self, quiver: Quiver) -> "Potential":
        """The same terms viewed on another quiver containing all their arrows."""
        for p, _ in self.terms:
            for a in p:
                quiver.arrow(a)
        return Potential(quiver, self.field, self.terms, self.degree_bound)

    def with_degree_bound(self, D: int) -> "Potential":
        return Potential.from_terms(self.quiver, self.field,
                                    ((c, p) for p, c in self.terms), D)

    def max_degree(self) -> int:
        return max((len(p) for p, _ in self.terms), default=0)

    def arrows_used(self) -> set:
        return {a for p, _ in self.terms for a in p}

    def __str__(self):
        return format_element(self.field, self.as_dict)

    def to_json(self) -> dict:
        return {"degree_bound": self.degree_bound,
                "terms": [{"coeff": self.field.format(c), "cycle": list(p)} for p, c in self.terms]}

    @classmethod
    def from_json(cls, quiver: Quiver, field, data: dict, degree_bound: Optional[int] = None):
        D = degree_bound if degree_bound is not None else data.get("degree_bound", DEFAULT_DEGREE_BOUND)
        return cls.from_terms(quiver, field,
                              ((t["coeff"], t["cycle"]) for t in data.get("terms", [])), D)


def cyclically_equal(S: Potential, W: Potential) -> bool:
    S._check_compatible(W)
    return S.terms == W.terms


def cyclic_derivative(S: Potential, a: str) -> Element:
    """Sum over occurrences of ``a``: the rest of the cycle read from just after ``a``."""
    S.quiver.arrow(a)
    F = S.field
    out: Element = {}
    for t, c in S.terms:
        for i, x in enumerate(t):
            if x == a:
                elem_add_into(F, out, {t[i + 1:] + t[:i]: c})
    return out


def second_derivative(S: Potential, b: str, a: str) -> Element:
    """Derivative with respect to the length-2 factor ``b a`` (``a`` acts first).

    The resulting paths run from ``h(b)`` to ``t(a)``; a term equal to ``ba``
    contributes the empty path.
    """
    Q = S.quiver
    if Q.arrow(a).head != Q.arrow(b).tail:
        raise ArrowsNotComposableAtK(f"{b} does not follow {a}")
    F = S.field
    out: Element = {}
    for t, c in S.terms:
        n = len(t)
        for j in range(n):
            if t[j] == b and t[(j + 1) % n] == a:
                rest = tuple(t[(j + 2 + m) % n] for m in range(n - 2))
                elem_add_into(F, out, {rest: c})
    return out


# ---------------------------------------------------------------------------
# right-equivalences


class RightEquivalence:
    """An algebra map fixing vertices, given by the images of the arrows.

    ``images[a]`` is an element of the truncated path algebra of ``target``
    parallel to ``a``. Arrows of ``source`` without an explicit image must also
    be arrows of ``target`` and are sent to themselves.
    """

    def __init__(self, source: Quiver, target: Quiver, field,
                 images: Mapping[str, Mapping[Path, object]],
                 degree_bound: int = DEFAULT_DEGREE_BOUND, check: bool = True):
        if source.vertices != target.vertices:
            raise QuiverMismatch("right-equivalence must fix the vertex set")
        self.source = source
        self.target = target
        self.field = field
        self.degree_bound = degree_bound
        imgs = {}
        for a in source.arrows:
            if a.id in images:
                x = {tuple(p): field(c) for p, c in images[a.id].items()}
                imgs[a.id] = {p: c for p, c in x.items() if c and len(p) <= degree_bound}
            else:
                target.arrow(a.id)
                imgs[a.id] = {(a.id,): field.one()}
        extra = set(images) - set(source.arrow_ids)
        if extra:
            raise UnknownArrow(f"images given for unknown arrows {sorted(extra)}")
        self.images: Dict[str, Element] = imgs
        self._inverse: Optional[RightEquivalence] = None
        if check:
            self._validate()

    def _validate(self):
        T = self.target
        for a in self.source.arrows:
            for p in self.images[a.id]:
                if not p:
                    raise ValueError(f"image of {a.id} has a constant term")
                if not T.is_path(p) or T.path_ends(p) != (a.tail, a.head):
                    raise ValueError(f"image of {a.id} contains non-parallel path {''.join(p)}")
        L = self.linear_matrices()
        for (i, j), (rows, cols, M) in L.items():
            if len(rows) != len(cols) or el.rank(self.field, M) != len(rows):
                raise ValueError(f"linear part between {i} and {j} is not invertible")

    @classmethod
    def identity(cls, Q: Quiver, field, degree_bound: int = DEFAULT_DEGREE_BOUND) -> "RightEquivalence":
        return cls(Q, Q, field, {}, degree_bound)

    def __eq__(self, other):
        if not isinstance(other, RightEquivalence):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.images == other.images)

    def __repr__(self):
        moved = {a: x for a, x in self.images.items() if x != {(a,): self.field.one()}}
        body = ", ".join(f"{a} -> {format_element(self.field, x)}" for a, x in sorted(moved.items()))
        return f"RightEquivalence({body or 'identity'})"

    def is_identity(self) -> bool:
        one = self.field.one()
        return all(x == {(a,): one} for a, x in self.images.items())

    def linear_matrices(self):
        """Degree-1 coefficient matrices grouped by (tail, head)."""
        F = self.field
        groups = {}
        for a in self.source.arrows:
            groups.setdefault((a.tail, a.head), [[], []])[0].append(a.id)
        for b in self.target.arrows:
            groups.setdefault((b.tail, b.head), [[], []])[1].append(b.id)
        out = {}
        for key, (rows, cols) in groups.items():
            M = F.zeros(len(rows), len(cols))
            index = {c: n for n, c in enumerate(cols)}
            for r, a in enumerate(rows):
                for p, c in self.images[a].items():
                    if len(p) == 1:
                        M[r, index[p[0]]] = c
            out[key] = (rows, cols, M)
        return out

    def apply(self, x: Mapping[Path, object], bound: Optional[int] = None) -> Element:
        """Image of an element; ``bound`` defaults to the degree bound."""
        F = self.field
        D = self.degree_bound if bound is None else bound
        out: Element = {}
        for p, c in x.items():
            partial: Element = {(): c}
            n = len(p)
            for i, a in enumerate(p):
                remaining = n - i - 1
                # every remaining factor contributes degree >= 1
                partial = elem_mul(F, partial, self.images[a], D - remaining)
                if not partial:
                    break
            elem_add_into(F, out, partial)
        return out

    def compose(self, inner: "RightEquivalence") -> "RightEquivalence":
        """``self ∘ inner``: apply ``inner`` first, then ``self``."""
        if inner.target != self.source:
            raise QuiverMismatch("cannot compose: quivers do not match")
        D = min(self.degree_bound, inner.degree_bound)
        imgs = {a: self.apply(x, D) for a, x in inner.images.items()}
        return RightEquivalence(inner.source, self.target, self.field, imgs, D, check=False)

    def inverse(self) -> "RightEquivalence":
        if self._inverse is None:
            self._inverse = self._compute_inverse()
            self._inverse._inverse = self
        return self._inverse

    def _compute_inverse(self) -> "RightEquivalence":
        F = self.field
        D = self.degree_bound
        # invert the linear part
        lin_inv = {}
        for (i, j), (rows, cols, M) in self.linear_matrices().items():
            if not rows:
                continue
            Minv = el.inverse(F, M)
            # source arrow a = sum_b M[a, b] b  =>  b = sum_a Minv[b, a] a
            for ci, b in enumerate(cols):
                lin_inv[b] = {(a,): Minv[ci, ri] for ri, a in enumerate(rows) if Minv[ci, ri]}
        L_inv = RightEquivalence(self.target, self.source, F, lin_inv, D, check=False)
        chi = L_inv.compose(self)  # unitriangular on the source
        # psi(a) = a - psi(chi(a) - a), iterated to the degree bound
        higher = {a: elem_sub(F, x, {(a,): F.one()}) for a, x in chi.images.items()}
        psi = RightEquivalence.identity(self.source, F, D)
        for _ in range(D):
            imgs = {a: elem_sub(F, {(a,): F.one()}, psi.apply(h)) for a, h in higher.items()}
            nxt = RightEquivalence(self.source, self.source, F, imgs, D, check=False)
            if nxt.images == psi.images:
                break
            psi = nxt
        return psi.compose(L_inv)

    def restrict(self, arrow_ids: Iterable[str]) -> "RightEquivalence":
        """Restriction to the subquiver of ``source`` on the given arrows."""
        keep = list(arrow_ids)
        sub = self.source.subquiver(keep)
        return RightEquivalence(sub, self.target, self.field,
                                {a: self.images[a] for a in keep}, self.degree_bound, check=False)

    def to_json(self) -> list:
        F = self.field
        return [{"arrow": a,
                 "image": [{"coeff": F.format(c), "path": list(p)} for p, c in sorted(x.items())]}
                for a, x in self.images.items()]


def apply_equivalence(phi: RightEquivalence, S: Potential, strict: bool = False) -> Potential:
    """Substitute the images of ``phi`` into ``S`` and renormalize cyclically.

    Terms beyond the degree bound are discarded; with ``strict`` a nonzero
    discarded part raises :class:`DegreeOverflow`.
    """
    if S.quiver != phi.source:
        raise QuiverMismatch("potential does not live on the source quiver")
    D = S.degree_bound
    if strict:
        longest = max((max(len(p) for p in x) for x in phi.images.values() if x), default=1)
        full = phi.apply(S.as_dict, bound=D * longest)
        return Potential.from_element(phi.target, S.field, full, D, strict=True)
    return Potential.from_element(phi.target, S.field, phi.apply(S.as_dict, bound=D), D)


def evaluate_element(F, actions: Mapping[str, np.ndarray], x: Mapping[Path, object],
                     rows: int, cols: int) -> np.ndarray:
    """Matrix of an element acting through the given arrow matrices."""
    out = F.zeros(rows, cols)
    for p, c in x.items():
        if not p:
            if rows != cols:
                raise ValueError("empty path between spaces of different dimension")
            m = el.eye(F, rows)
        else:
            m = actions[p[0]]
            for a in p[1:]:
                m = el.matmul(F, m, actions[a])
        out = F.reduce(out + m * c)
    return out
