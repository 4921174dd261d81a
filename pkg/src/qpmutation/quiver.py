"""Quivers and quiver mutation."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

from .errors import (LoopPresent, NotTwoCycle, OverlappingPairs, TwoCycleAtK,
                     UnknownArrow, UnknownVertex)


@dataclass(frozen=True)
class Arrow:
    id: str
    tail: str
    head: str

    def __str__(self):
        return f"{self.id}:{self.tail}->{self.head}"


def star(arrow_id: str) -> str:
    return arrow_id + "*"


def composite(b: str, a: str) -> str:
    """Name of the composite arrow standing for ``b`` after ``a``."""
    return f"[{b}{a}]"


@dataclass(frozen=True)
class Quiver:
    """A finite loop-free quiver. Vertex and arrow order is part of the value."""

    vertices: Tuple[str, ...]
    arrows: Tuple[Arrow, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        seen = set()
        vs = set(self.vertices)
        for a in self.arrows:
            if a.id in seen:
                raise ValueError(f"duplicate arrow id {a.id!r}")
            seen.add(a.id)
            for v in (a.tail, a.head):
                if v not in vs:
                    raise UnknownVertex(f"arrow {a.id} uses undeclared vertex {v!r}")
            if a.tail == a.head:
                raise LoopPresent(f"arrow {a.id} is a loop at {a.tail}")
        object.__setattr__(self, "_by_id", {a.id: a for a in self.arrows})

    @classmethod
    def from_arrows(cls, vertices: Iterable, arrows: Iterable[Tuple[str, object, object]]) -> "Quiver":
        return cls(tuple(str(v) for v in vertices),
                   tuple(Arrow(str(i), str(t), str(h)) for i, t, h in arrows))

    # lookup
    def arrow(self, arrow_id: str) -> Arrow:
        try:
            return self._by_id[arrow_id]
        except KeyError:
            raise UnknownArrow(f"unknown arrow {arrow_id!r}") from None

    def has_arrow(self, arrow_id: str) -> bool:
        return arrow_id in self._by_id

    @property
    def arrow_ids(self) -> Tuple[str, ...]:
        return tuple(a.id for a in self.arrows)

    def tail(self, arrow_id: str) -> str:
        return self.arrow(arrow_id).tail

    def head(self, arrow_id: str) -> str:
        return self.arrow(arrow_id).head

    def check_vertex(self, v) -> str:
        v = str(v)
        if v not in self.vertices:
            raise UnknownVertex(f"unknown vertex {v!r}")
        return v

    def in_arrows(self, k) -> List[Arrow]:
        """Arrows with head ``k``, sorted by id."""
        return sorted((a for a in self.arrows if a.head == k), key=lambda a: a.id)

    def out_arrows(self, k) -> List[Arrow]:
        """Arrows with tail ``k``, sorted by id."""
        return sorted((a for a in self.arrows if a.tail == k), key=lambda a: a.id)

    def arrows_between(self, i, j) -> List[Arrow]:
        return sorted((a for a in self.arrows if a.tail == i and a.head == j), key=lambda a: a.id)

    def subquiver(self, arrow_ids: Iterable[str]) -> "Quiver":
        keep = set(arrow_ids)
        return Quiver(self.vertices, tuple(a for a in self.arrows if a.id in keep))

    def without(self, arrow_ids: Iterable[str]) -> "Quiver":
        drop = set(arrow_ids)
        return Quiver(self.vertices, tuple(a for a in self.arrows if a.id not in drop))

    def is_path(self, path: Sequence[str]) -> bool:
        """Composability of ``path`` written right-to-left (last factor acts first)."""
        for left, right in zip(path, path[1:]):
            if self.arrow(right).head != self.arrow(left).tail:
                return False
        return True

    def path_ends(self, path: Sequence[str]) -> Tuple[str, str]:
        """(start, end) vertices of a nonempty path."""
        return self.arrow(path[-1]).tail, self.arrow(path[0]).head

    def edge_multiset(self) -> Counter:
        return Counter((a.tail, a.head) for a in self.arrows)

    def two_cycles(self) -> List[Tuple[str, str]]:
        """All (x, y) with x:i->j, y:j->i and i before j in vertex order."""
        out = []
        order = {v: n for n, v in enumerate(self.vertices)}
        for x in self.arrows:
            if order[x.tail] < order[x.head]:
                for y in self.arrows_between(x.head, x.tail):
                    out.append((x.id, y.id))
        return out

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices),
                "arrows": [{"id": a.id, "tail": a.tail, "head": a.head} for a in self.arrows]}

    @classmethod
    def from_json(cls, data: dict) -> "Quiver":
        return cls.from_arrows(data["vertices"],
                               ((a["id"], a["tail"], a["head"]) for a in data["arrows"]))


def validate_mutable(Q: Quiver, k) -> None:
    k = Q.check_vertex(k)
    for a in Q.arrows:
        if a.tail == a.head:
            raise LoopPresent(f"loop {a.id}")
    for a in Q.in_arrows(k):
        if Q.arrows_between(k, a.tail):
            raise TwoCycleAtK(f"2-cycle through {k} via {a.id}")


def premutate_quiver(Q: Quiver, k) -> Quiver:
    """First two steps of mutation at ``k``: composites, then reversal."""
    validate_mutable(Q, k)
    k = str(k)
    ins, outs = Q.in_arrows(k), Q.out_arrows(k)
    kept = [a for a in Q.arrows if a.head != k and a.tail != k]
    comps = [Arrow(composite(b.id, a.id), a.tail, b.head) for a in ins for b in outs]
    a_star = [Arrow(star(a.id), k, a.tail) for a in ins]
    b_star = [Arrow(star(b.id), b.head, k) for b in outs]
    new = kept + comps + a_star + b_star
    if len({a.id for a in new}) != len(new):
        raise ValueError("premutation produced colliding arrow ids; rename arrows")
    return Quiver(Q.vertices, tuple(new))


def remove_two_cycles(Q: Quiver, pairs: Sequence[Tuple[str, str]]) -> Quiver:
    used = set()
    for x, y in pairs:
        ax, ay = Q.arrow(x), Q.arrow(y)
        if not (ax.head == ay.tail and ay.head == ax.tail):
            raise NotTwoCycle(f"{x}, {y} do not form a 2-cycle")
        if x in used or y in used or x == y:
            raise OverlappingPairs(f"arrow reused in {x}, {y}")
        used.update((x, y))
    return Q.without(used)


def canonical_two_cycle_collection(Q: Quiver) -> List[Tuple[str, str]]:
    """Lexicographically first maximal disjoint collection of 2-cycles."""
    pairs = []
    order = {v: n for n, v in enumerate(Q.vertices)}
    done = set()
    for a in sorted(Q.arrows, key=lambda a: a.id):
        i, j = sorted((a.tail, a.head), key=order.__getitem__)
        if (i, j) in done:
            continue
        done.add((i, j))
        forward, backward = Q.arrows_between(i, j), Q.arrows_between(j, i)
        pairs.extend((x.id, y.id) if x.id < y.id else (y.id, x.id)
                     for x, y in zip(forward, backward))
    return sorted(pairs)


def mutate_quiver(Q: Quiver, k) -> Quiver:
    pre = premutate_quiver(Q, k)
    return remove_two_cycles(pre, canonical_two_cycle_collection(pre))


def degree_counts(Q: Quiver, k) -> Tuple[int, int]:
    k = str(k)
    return len(Q.in_arrows(k)), len(Q.out_arrows(k))

