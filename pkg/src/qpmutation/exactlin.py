"""Exact fields and dense linear algebra over them.

Matrices are plain 2-d numpy arrays. Over a prime field F_p the entries are
canonical residues in ``[0, p)`` (``int64`` for moderate p, Python ints for
large p); over the rationals they are :class:`fractions.Fraction` objects in
an ``object`` array. Every routine takes the field explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ContainmentViolation, NotWellDefined

DEFAULT_PRIME = 32003
_INT64_LIMIT = 1 << 24  # keeps products and short dot-sums inside int64


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p."""

    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def dtype(self):
        return np.int64 if self.p < _INT64_LIMIT else object

    @property
    def name(self) -> str:
        return f"fp:{self.p}"

    @property
    def is_finite(self) -> bool:
        return True

    @property
    def size(self) -> int:
        return self.p

    # scalars
    def __call__(self, x) -> int:
        if isinstance(x, str):
            x = Fraction(x.strip())
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in F_{self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1

    def add(self, x, y):
        return (x + y) % self.p

    def sub(self, x, y):
        return (x - y) % self.p

    def mul(self, x, y):
        return (x * y) % self.p

    def neg(self, x):
        return (-x) % self.p

    def inv(self, x):
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def to_json(self, x):
        return int(x)

    def format(self, x) -> str:
        return str(int(x))

    def random_scalar(self, rng: np.random.Generator, nonzero: bool = False) -> int:
        lo = 1 if nonzero else 0
        return int(rng.integers(lo, self.p))

    # arrays
    def reduce(self, a: np.ndarray) -> np.ndarray:
        return a % self.p

    def array(self, data, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
        if isinstance(data, np.ndarray) and data.dtype != object and self.dtype is np.int64:
            out = data.astype(np.int64) % self.p
        else:
            raw = np.asarray(data, dtype=object)
            out = np.empty(raw.shape, dtype=self.dtype)
            flat_in, flat_out = raw.reshape(-1), out.reshape(-1)
            for i, v in enumerate(flat_in):
                flat_out[i] = self(v)
        if shape is not None:
            out = out.reshape(shape)
        return out

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        if self.dtype is np.int64:
            return np.zeros((rows, cols), dtype=np.int64)
        out = np.empty((rows, cols), dtype=object)
        out.fill(0)
        return out

    def random(self, rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
        vals = rng.integers(0, self.p, size=(rows, cols))
        return self.array(vals)


@dataclass(frozen=True)
class RationalField:
    """The rational numbers, with exact :class:`Fraction` entries."""

    random_bound: int = dc_field(default=1000, compare=False)

    dtype = object

    @property
    def name(self) -> str:
        return "rational"

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def size(self):
        return None

    def __call__(self, x) -> Fraction:
        if isinstance(x, str):
            return Fraction(x.strip())
        if isinstance(x, (np.integer,)):
            return Fraction(int(x))
        return Fraction(x)

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(x)

    def to_json(self, x):
        return str(Fraction(x))

    def format(self, x) -> str:
        return str(Fraction(x))

    def random_scalar(self, rng: np.random.Generator, nonzero: bool = False) -> Fraction:
        while True:
            v = Fraction(int(rng.integers(-self.random_bound, self.random_bound + 1)))
            if v or not nonzero:
                return v

    def reduce(self, a: np.ndarray) -> np.ndarray:
        return a

    def array(self, data, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
        raw = np.asarray(data, dtype=object)
        out = np.empty(raw.shape, dtype=object)
        flat_in, flat_out = raw.reshape(-1), out.reshape(-1)
        for i, v in enumerate(flat_in):
            flat_out[i] = self(v)
        if shape is not None:
            out = out.reshape(shape)
        return out

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        out = np.empty((rows, cols), dtype=object)
        out.fill(Fraction(0))
        return out

    def random(self, rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
        vals = rng.integers(-self.random_bound, self.random_bound + 1, size=(rows, cols))
        return self.array(vals)


def parse_field(spec: str):
    """Parse ``"fp:P"``, ``"fp"`` or ``"rational"``."""
    spec = spec.strip().lower()
    if spec in ("rational", "q", "qq"):
        return RationalField()
    if spec == "fp":
        return PrimeField()
    if spec.startswith("fp:"):
        return PrimeField(int(spec[3:]))
    raise ValueError(f"unknown field {spec!r}; expected 'fp:P' or 'rational'")


# ---------------------------------------------------------------------------
# matrix kernels


def eye(F, n: int) -> np.ndarray:
    out = F.zeros(n, n)
    for i in range(n):
        out[i, i] = F.one()
    return out


def matmul(F, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
    if A.shape[1] == 0 or A.shape[0] == 0 or B.shape[1] == 0:
        return F.zeros(A.shape[0], B.shape[1])
    return F.reduce(A @ B)


def mats_mul(F, *mats: np.ndarray) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = matmul(F, out, m)
    return out


def add(F, A, B):
    return F.reduce(A + B)


def sub(F, A, B):
    return F.reduce(A - B)


def neg(F, A):
    return F.reduce(-A)


def scale(F, A, s):
    return F.reduce(A * s)


def is_zero(A: np.ndarray) -> bool:
    return not np.any(A != 0)


def hstack(F, mats: Sequence[np.ndarray], rows: int) -> np.ndarray:
    mats = [m for m in mats]
    if not mats:
        return F.zeros(rows, 0)
    return np.concatenate(mats, axis=1) if len(mats) > 1 else mats[0].copy()


def vstack(F, mats: Sequence[np.ndarray], cols: int) -> np.ndarray:
    mats = [m for m in mats]
    if not mats:
        return F.zeros(0, cols)
    return np.concatenate(mats, axis=0) if len(mats) > 1 else mats[0].copy()


def block_diag(F, mats: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = F.zeros(rows, cols)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def kron(F, A, B):
    if 0 in A.shape or 0 in B.shape:
        return F.zeros(A.shape[0] * B.shape[0], A.shape[1] * B.shape[1])
    return F.reduce(np.kron(A, B))


def rref(F, A: np.ndarray) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    R = np.array(A, dtype=F.dtype, copy=True)
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c] != 0)
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] = F.reduce(R[r] * F.inv(R[r, c]))
        others = np.flatnonzero(R[:, c] != 0)
        others = others[others != r]
        if others.size:
            R[others] = F.reduce(R[others] - np.outer(R[others, c], R[r]))
        pivots.append(c)
        r += 1
    return R, tuple(pivots)


def rank(F, A: np.ndarray) -> int:
    if 0 in A.shape:
        return 0
    return len(rref(F, A)[1])


def kernel_basis(F, A: np.ndarray) -> np.ndarray:
    """Columns spanning ``{v : A v = 0}`` (not yet canonical)."""
    rows, cols = A.shape
    R, piv = rref(F, A) if rows else (A, ())
    free = [c for c in range(cols) if c not in piv]
    K = F.zeros(cols, len(free))
    for j, f in enumerate(free):
        K[f, j] = F.one()
        for i, pc in enumerate(piv):
            K[pc, j] = F.neg(R[i, f])
    return K


def solve(F, A: np.ndarray, B: np.ndarray) -> Optional[np.ndarray]:
    """One solution X of ``A X = B`` (free variables set to zero), or None."""
    rows, cols = A.shape
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    if rows == 0:
        return F.zeros(cols, B.shape[1])
    R, piv = rref(F, np.concatenate([A, B], axis=1))
    if any(p >= cols for p in piv):
        return None
    X = F.zeros(cols, B.shape[1])
    for i, pc in enumerate(piv):
        X[pc] = R[i, cols:]
    return X


def inverse(F, A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    if n == 0:
        return F.zeros(0, 0)
    R, piv = rref(F, np.concatenate([A, eye(F, n)], axis=1))
    if piv[:n] != tuple(range(n)):
        raise ZeroDivisionError("singular matrix")
    return R[:, n:]


def is_invertible(F, A: np.ndarray) -> bool:
    return A.shape[0] == A.shape[1] and rank(F, A) == A.shape[0]


def random_invertible(F, rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        A = F.random(rng, n, n)
        if is_invertible(F, A):
            return A


# ---------------------------------------------------------------------------
# subspaces


def canonical_basis(F, V: np.ndarray) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """Reduced column echelon basis of the column span of V, plus pivot rows."""
    n = V.shape[0]
    if V.shape[1] == 0 or n == 0:
        return F.zeros(n, 0), ()
    R, piv = rref(F, V.T)
    return np.ascontiguousarray(R[: len(piv)].T), piv


class Subspace:
    """A subspace of F^n held by its canonical reduced column echelon basis.

    Two subspaces are equal exactly when their bases are equal entrywise.
    """

    __slots__ = ("field", "ambient_dim", "basis", "pivots")

    def __init__(self, field, ambient_dim: int, spanning: Optional[np.ndarray] = None):
        self.field = field
        self.ambient_dim = ambient_dim
        if spanning is None:
            spanning = field.zeros(ambient_dim, 0)
        if spanning.shape[0] != ambient_dim:
            raise ValueError("spanning set has the wrong ambient dimension")
        self.basis, self.pivots = canonical_basis(field, spanning)
        self.basis.flags.writeable = False

    @classmethod
    def full(cls, F, n: int) -> "Subspace":
        return cls(F, n, eye(F, n))

    @classmethod
    def zero(cls, F, n: int) -> "Subspace":
        return cls(F, n)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.field == other.field
            and self.basis.shape == other.basis.shape
            and bool(np.all(self.basis == other.basis))
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.pivots))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    def coords(self, V: np.ndarray) -> np.ndarray:
        """Coordinates of the columns of V (which must lie in the subspace)."""
        return V[list(self.pivots), :] if V.ndim == 2 else V[list(self.pivots)]

    def residue(self, V: np.ndarray) -> np.ndarray:
        """V minus its echelon reduction against the basis; zero iff V is inside."""
        if V.ndim == 1:
            V = V.reshape(-1, 1)
        return sub(self.field, V, matmul(self.field, self.basis, self.coords(V)))

    def contains(self, V) -> bool:
        if isinstance(V, Subspace):
            V = V.basis
        return is_zero(self.residue(V))

    def __le__(self, other: "Subspace") -> bool:
        return other.contains(self)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.field, self.ambient_dim,
                        np.concatenate([self.basis, other.basis], axis=1))

    def intersect(self, other: "Subspace") -> "Subspace":
        F = self.field
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(F, self.ambient_dim)
        K = kernel_basis(F, np.concatenate([self.basis, neg(F, other.basis)], axis=1))
        return Subspace(F, self.ambient_dim, matmul(F, self.basis, K[: self.dim]))

    def image_under(self, A: np.ndarray) -> "Subspace":
        return Subspace(self.field, A.shape[0], matmul(self.field, A, self.basis))

    def complement_basis(self) -> np.ndarray:
        """Standard basis vectors at the non-pivot rows: a canonical complement."""
        F = self.field
        free = [i for i in range(self.ambient_dim) if i not in self.pivots]
        C = F.zeros(self.ambient_dim, len(free))
        for j, i in enumerate(free):
            C[i, j] = F.one()
        return C


def kernel(F, A: np.ndarray) -> Subspace:
    return Subspace(F, A.shape[1], kernel_basis(F, A))


def image(F, A: np.ndarray) -> Subspace:
    return Subspace(F, A.shape[0], A)


def column_spaces(F, A: np.ndarray) -> Tuple[Subspace, Subspace, np.ndarray]:
    """Kernel, image and a canonical complement of the image of ``A``."""
    im = image(F, A)
    return kernel(F, A), im, im.complement_basis()


def preimage(F, A: np.ndarray, W: Subspace) -> Subspace:
    """``{v : A v in W}``."""
    # A v in W  <=>  A v - W x = 0 for some x
    n = A.shape[1]
    K = kernel_basis(F, np.concatenate([A, neg(F, W.basis)], axis=1))
    return Subspace(F, n, K[:n])


# ---------------------------------------------------------------------------
# subquotient charts


@dataclass(frozen=True, eq=False)
class SubquotientChart:
    """Coordinates on ``sub / quot_by`` inside F^n.

    ``section`` holds representatives (columns in F^n) of a basis of the
    quotient; ``complement`` is a chosen complement of ``sub`` in F^n. Together
    with a basis of ``quot_by`` they form a basis of F^n, and ``proj`` reads off
    the ``section`` coordinates in that basis. On ``sub``, ``proj`` is the
    canonical projection; ``retraction`` is the projection onto ``sub`` along
    ``complement``, written in the canonical basis of ``sub``.
    """

    field: object
    ambient_dim: int
    sub: Subspace
    quot_by: Subspace
    section: np.ndarray
    complement: np.ndarray
    proj: np.ndarray
    retraction: np.ndarray

    @property
    def dim(self) -> int:
        return self.section.shape[1]

    def inclusion(self) -> np.ndarray:
        """Inclusion of ``sub`` into F^n (canonical basis of ``sub``)."""
        return self.sub.basis

    def sub_projection(self) -> np.ndarray:
        """Projection ``sub -> sub/quot_by`` in the canonical basis of ``sub``."""
        return matmul(self.field, self.proj, self.sub.basis)

    def lift(self, coords: np.ndarray) -> np.ndarray:
        return matmul(self.field, self.section, coords)

    def ambient_retraction(self) -> np.ndarray:
        """Projection F^n -> F^n onto ``sub`` along ``complement``."""
        return matmul(self.field, self.sub.basis, self.retraction)


def make_chart(F, sub: Subspace, quot_by: Optional[Subspace] = None,
               rng: Optional[np.random.Generator] = None) -> SubquotientChart:
    """Build a chart for ``sub / quot_by``.

    Without ``rng`` the chart is the canonical pivot-complement one; with an
    ``rng`` the section and the complement are perturbed at random, which gives
    an independent but equally valid choice.
    """
    n = sub.ambient_dim
    if quot_by is None:
        quot_by = Subspace.zero(F, n)
    if not sub.contains(quot_by):
        raise ContainmentViolation("quotient subspace is not contained in sub")
    Bq = quot_by.basis
    # reduce sub's basis modulo quot_by, keep a canonical basis of what is left
    reduced = quot_by.residue(sub.basis) if quot_by.dim else sub.basis
    C, _ = canonical_basis(F, reduced)
    D = sub.complement_basis()
    if rng is not None:
        if C.shape[1]:
            C = matmul(F, C, random_invertible(F, rng, C.shape[1]))
            if Bq.shape[1]:
                C = add(F, C, matmul(F, Bq, F.random(rng, Bq.shape[1], C.shape[1])))
        if D.shape[1] and sub.dim:
            D = add(F, D, matmul(F, sub.basis, F.random(rng, sub.dim, D.shape[1])))
    P = np.concatenate([Bq, C, D], axis=1) if n else F.zeros(0, 0)
    Pinv = inverse(F, P)
    q, d, s = Bq.shape[1], C.shape[1], sub.dim
    proj = np.ascontiguousarray(Pinv[q:q + d, :])
    onto_sub = matmul(F, P[:, :s], Pinv[:s, :])
    retraction = sub.coords(onto_sub) if s else F.zeros(0, n)
    for m in (C, D, proj, retraction):
        m.flags.writeable = False
    return SubquotientChart(F, n, sub, quot_by, C, D, proj, retraction)


def induced_map(F, A: np.ndarray, src: SubquotientChart, dst: SubquotientChart) -> np.ndarray:
    """Matrix of the map induced by ``A`` from ``src.sub/src.quot_by`` to ``dst``'s."""
    if A.shape != (dst.ambient_dim, src.ambient_dim):
        raise ValueError("matrix shape does not match the charts")
    if not dst.sub.contains(matmul(F, A, src.sub.basis)):
        raise NotWellDefined("A does not map sub into sub")
    if not dst.quot_by.contains(matmul(F, A, src.quot_by.basis)):
        raise NotWellDefined("A does not map quot_by into quot_by")
    return matmul(F, dst.proj, matmul(F, A, src.section))
