"""Random instances and end-to-end certification."""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import exactlin as el
from .errors import GenerationExhausted, QPError
from .functor import (exacta_data, mu_plus_morphism, naturality_defect, prime_identification, psi,
                      quasi_inverse_morphism)
from .potential import DEFAULT_DEGREE_BOUND, Potential, cyclic_derivative
from .qpmut import MINUS, PLUS, QP, mutate
from .quiver import Quiver
from .repcat import (Representation, base_change, check_representation, hom_basis,
                     is_isomorphic, quotient_hom, random_morphism, split_off_simple)
from .repmut import (involution_witness, local_triangle, mutate_rep_data, premutate_rep)


@dataclass(frozen=True)
class InstanceSpec:
    """Upper bounds for a random instance; ``seed`` fixes everything."""

    num_vertices: int = 5
    num_arrows: int = 7
    max_dim: int = 4
    field: str = "fp:32003"
    degree_bound: int = DEFAULT_DEGREE_BOUND
    seed: int = 0
    k: Optional[str] = None
    layers: int = 4

    def __post_init__(self):
        if not 1 <= self.num_vertices <= 6:
            raise ValueError("num_vertices must be in 1..6")
        if not 0 <= self.num_arrows <= 10:
            raise ValueError("num_arrows must be in 0..10")
        if not 0 <= self.max_dim <= 5:
            raise ValueError("max_dim must be in 0..5")
        if self.degree_bound < 3:
            raise ValueError("degree_bound must be at least 3")


# ---------------------------------------------------------------------------
# generation


def gen_quiver(rng: np.random.Generator, n: int, m: int, plant: bool = True) -> Quiver:
    """Random quiver without loops or 2-cycles (parallel arrows allowed).

    With ``plant`` and at least three vertices the first arrows form an
    oriented cycle, so the potential has something to work with.
    """
    verts = [str(i + 1) for i in range(n)]
    arrows = []

    def add(t, h):
        if t != h and not any(a[1] == h and a[2] == t for a in arrows):
            arrows.append((f"a{len(arrows) + 1}", t, h))
            return True
        return False

    if plant and n >= 3 and m >= 3:
        size = int(rng.integers(3, min(n, m, 4) + 1))
        cyc = [verts[i] for i in rng.choice(n, size=size, replace=False)]
        for i in range(size):
            add(cyc[i], cyc[(i + 1) % size])
    while len(arrows) < m and n >= 2:
        for _ in range(20):
            i, j = rng.choice(n, size=2, replace=False)
            if add(verts[i], verts[j]):
                break
        else:
            break
    return Quiver.from_arrows(verts, arrows)


def closed_walks(Q: Quiver, min_len: int, max_len: int) -> List[Tuple[str, ...]]:
    """All cycles of the given lengths, one canonical rotation each."""
    found = set()

    def extend(path, start):
        if len(path) >= min_len and Q.arrow(path[0]).head == start:
            found.add(min(path[i:] + path[:i] for i in range(len(path))))
        if len(path) == max_len:
            return
        # prepend an arrow leaving the current end (paths are written left to right as composition)
        end = Q.arrow(path[0]).head
        for a in Q.out_arrows(end):
            extend((a.id,) + path, start)

    for a in Q.arrows:
        extend((a.id,), a.tail)
    return sorted(found)


def gen_qp(rng: np.random.Generator, spec: InstanceSpec, F) -> QP:
    n = int(rng.integers(2, spec.num_vertices + 1)) if spec.num_vertices >= 2 else 1
    m = int(rng.integers(min(n, spec.num_arrows), spec.num_arrows + 1))
    Q = gen_quiver(rng, n, m)
    cycles = closed_walks(Q, 3, min(5, spec.degree_bound))
    terms = [(F.random_scalar(rng, nonzero=True), c) for i, c in enumerate(cycles)
             if rng.random() < 0.6 or len(cycles) == 1]
    return QP(Q, Potential.from_terms(Q, F, terms, spec.degree_bound))


def gen_representation(qp: QP, rng: np.random.Generator, max_dim: int, layers: int = 4,
                       dims=None) -> Representation:
    """Random nilpotent representation satisfying the relations.

    Basis vectors get Loewy layers and arrows only raise the layer. The part
    of the arrow matrices landing in layer ``t`` enters the relations landing
    in layer ``t`` linearly (everything else lives in lower layers), so the
    relations are solved layer by layer and a random kernel vector is drawn.
    """
    F, Q = qp.field, qp.quiver
    if dims is None:
        dims = {v: int(rng.integers(min(1, max_dim), max_dim + 1)) for v in Q.vertices}
    layer = {v: np.sort(rng.integers(0, layers, size=dims[v])) for v in Q.vertices}
    act = {a.id: F.zeros(dims[a.head], dims[a.tail]) for a in Q.arrows}
    derivs = {a.id: cyclic_derivative(qp.potential, a.id) for a in Q.arrows}
    for t in range(1, layers):
        unknowns = [(a.id, int(r), int(c)) for a in Q.arrows
                    for r in np.flatnonzero(layer[a.head] == t)
                    for c in np.flatnonzero(layer[a.tail] < t)]
        if not unknowns:
            continue
        index = {u: i for i, u in enumerate(unknowns)}
        eqs = []
        for a in Q.arrows:
            # d_a(S) runs from h(a) to t(a); keep its rows in layer t
            rows = np.flatnonzero(layer[a.tail] == t)
            if not len(rows) or not dims[a.head]:
                continue
            eq = {}
            for p, coeff in derivs[a.id].items():
                first = p[0]
                rest = _path_matrix(F, act, p[1:], dims[a.head])
                mids = np.flatnonzero(layer[Q.tail(first)] < t)
                for r in rows:
                    for c in range(dims[a.head]):
                        row = eq.setdefault((int(r), c), {})
                        for mid in mids:
                            if rest[mid, c]:
                                u = index[(first, int(r), int(mid))]
                                row[u] = F.add(row.get(u, 0), F.mul(coeff, rest[mid, c]))
            for row in eq.values():
                if row:
                    line = F.zeros(1, len(unknowns))
                    for u, v in row.items():
                        line[0, u] = v
                    eqs.append(line)
        K = el.kernel_basis(F, np.concatenate(eqs, axis=0)) if eqs else el.eye(F, len(unknowns))
        x = el.matmul(F, K, F.random(rng, K.shape[1], 1))[:, 0]
        for (a, r, c), v in zip(unknowns, x):
            act[a][r, c] = v
    M = Representation(qp, dims, act, check=False)
    g = {v: el.random_invertible(F, rng, d) for v, d in dims.items()}
    return base_change(M, g)


def _path_matrix(F, act, path, n_src):
    """Matrix of a possibly empty path on a space of dimension ``n_src``."""
    if not path:
        return el.eye(F, n_src)
    m = act[path[0]]
    for x in path[1:]:
        m = el.matmul(F, m, act[x])
    return m


def _pick_vertex(rng, Q: Quiver, k=None, potential=None) -> str:
    if k is not None:
        return Q.check_vertex(k)
    on_cycle = {Q.head(a) for p, _ in potential.terms for a in p} if potential is not None else set()
    both = [v for v in Q.vertices if Q.in_arrows(v) and Q.out_arrows(v)]
    pool = [v for v in both if v in on_cycle] or both or list(Q.vertices)
    return pool[int(rng.integers(0, len(pool)))]


@dataclass(frozen=True, eq=False)
class Instance:
    spec: InstanceSpec
    qp: QP
    k: str
    M: Representation
    N: Representation
    split_multiplicities: Tuple[int, int]


def gen_instance(spec: InstanceSpec, split_simple: bool = True, budget: int = 20) -> Instance:
    """A QP, a vertex and two S_k-free representations, all from ``spec.seed``."""
    F = el.parse_field(spec.field)
    rng = np.random.default_rng(spec.seed)
    for _ in range(budget):
        qp = gen_qp(rng, spec, F)
        k = _pick_vertex(rng, qp.quiver, spec.k, qp.potential)
        try:
            reps, mults = [], []
            for _ in range(2):
                R = gen_representation(qp, rng, spec.max_dim, spec.layers)
                if split_simple:
                    s = split_off_simple(R, k)
                    R, m = s.core, s.multiplicity
                else:
                    m = 0
                check_representation(R)
                reps.append(R)
                mults.append(m)
        except QPError:
            continue
        return Instance(spec, qp, k, reps[0], reps[1], tuple(mults))
    raise GenerationExhausted(f"no valid instance for seed {spec.seed} within {budget} tries")


# ---------------------------------------------------------------------------
# certification


@dataclass
class Check:
    name: str
    passed: bool
    witness: Optional[str] = None


@dataclass
class CertReport:
    seed: int
    spec: dict
    k: str
    dims: dict
    checks: List[Check] = field(default_factory=list)
    runtime: float = 0.0
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self, include_runtime: bool = True) -> dict:
        d = {"seed": self.seed, "spec": self.spec, "k": self.k, "dims": self.dims,
             "passed": self.passed, "checks": [asdict(c) for c in self.checks],
             "stats": self.stats}
        if include_runtime:
            d["runtime"] = round(self.runtime, 6)
        return d


class _Recorder:
    def __init__(self, report: CertReport):
        self.report = report

    def run(self, name, fn, requires=()):
        """Run ``fn``; a falsy result, a dict with a False value or an error is a failure.
        If a prerequisite is missing (None) the check is recorded as failed without running."""
        if any(r is None for r in requires):
            self.report.checks.append(Check(name, False, "skipped: a prerequisite check failed"))
            return None
        try:
            out = fn()
        except QPError as exc:
            self.report.checks.append(Check(name, False, f"{type(exc).__name__}: {exc}"))
            return None
        if isinstance(out, dict):
            bad = [k for k, v in out.items() if not v]
            self.report.checks.append(Check(name, not bad, ", ".join(bad) or None))
        elif isinstance(out, tuple):
            ok, witness = out
            self.report.checks.append(Check(name, bool(ok), None if ok else witness))
        else:
            self.report.checks.append(Check(name, bool(out), None if out else "check returned false"))
        return out


CHECK_NAMES = (
    "relations", "triangle zero composites", "premutation relations",
    "split certificate", "choice independence", "involutivity",
    "rel alpha", "exacta identities", "induced isomorphisms", "psi conditions",
    "psi sections", "naturality", "functoriality mod confined", "hom dimension",
)


def certify(qp: QP, M: Representation, k, N: Optional[Representation] = None,
            seed: int = 0, spec: Optional[dict] = None, strict: bool = False) -> CertReport:
    """Run every check on ``M`` (and the pair ``M``, ``N``) at vertex ``k``."""
    t0 = time.perf_counter()
    k = qp.quiver.check_vertex(k)
    N = M if N is None else N
    rng = np.random.default_rng(seed)
    F = qp.field
    report = CertReport(seed, spec or {}, k, {v: M.dims[v] for v in qp.quiver.vertices})
    rec = _Recorder(report)

    def relations():
        check_representation(M)
        check_representation(N)
        return True

    def zero_composites():
        out = {}
        for name, R in (("M", M), ("N", N)):
            T = local_triangle(R, k)
            out[f"{name}: gamma beta = 0"] = el.is_zero(el.matmul(F, T.gamma, T.beta))
            out[f"{name}: alpha gamma = 0"] = el.is_zero(el.matmul(F, T.alpha, T.gamma))
        return out

    rec.run("relations", relations)
    rec.run("triangle zero composites", zero_composites)
    rec.run("premutation relations",
            lambda: {d: premutate_rep(M, k, d, check=True) is not None for d in (PLUS, MINUS)})
    splits = {}

    def split_cert():
        for d in (PLUS, MINUS):
            red, sr = mutate(qp, k, d, strict=strict)
            splits[d] = sr
        return {d: sr.certify() for d, sr in splits.items()}

    rec.run("split certificate", split_cert)
    mutM = mutN = None

    def choice_independence():
        nonlocal mutM
        mutM = mutate_rep_data(M, k, PLUS, strict=strict)
        other = mutate_rep_data(M, k, PLUS, rng=np.random.default_rng(seed + 7919), strict=strict)
        ok = is_isomorphic(mutM.rep, other.rep, seed=seed)
        return ok, "mutations from two splitting choices are not isomorphic"

    rec.run("choice independence", choice_independence)
    rec.run("involutivity",
            lambda: (is_isomorphic(M, involution_witness(M, k), seed=seed),
                     "M is not isomorphic to the twisted double premutation"))
    idM = idN = None

    def rel_alpha():
        nonlocal idM, idN
        idM = prime_identification(M, k)
        idN = prime_identification(N, k) if N is not M else idM
        out = dict(idM.rel_alpha())
        out["alpha' matches formula"] = np.array_equal(idM.alpha_prime(), idM.formula_alpha_prime())
        out["beta' matches formula"] = np.array_equal(idM.beta_prime(), idM.formula_beta_prime())
        return out

    rec.run("rel alpha", rel_alpha)

    def exacta():
        out = {}
        for name, mr in (("first", idM.first), ("second", idM.second)):
            a, b = exacta_data(mr).identities()
            out[f"{name}: coker beta identity"] = a
            out[f"{name}: ker alpha identity"] = b
        return out

    rec.run("exacta identities", exacta, requires=[idM])
    rec.run("induced isomorphisms", lambda: idM.induced_ranks_ok(), requires=[idM])
    wM = wN = None

    def psi_conditions():
        nonlocal wM, wN
        wM = psi(M, k, idM)
        wN = psi(N, k, idN) if N is not M else wM
        out = {}
        for name, w in (("M", wM), ("N", wN)):
            out.update({f"{name}: {c}": v for c, v in w.conditions().items()})
        return out

    rec.run("psi conditions", psi_conditions, requires=[idM])
    rec.run("psi sections", lambda: wM.section_conditions(), requires=[wM])
    basis = hom_basis(M, N)
    f = random_morphism(M, N, rng, basis)
    report.stats["hom_dim"] = len(basis)

    def naturality():
        fp = quasi_inverse_morphism(f, idM, idN)
        d = naturality_defect(f, wM, wN, fp)
        return {"f' is a morphism": fp.is_morphism(), "defect is a morphism": d.is_morphism(),
                "defect confined to k": d.is_confined(k)}

    rec.run("naturality", naturality, requires=[wM])

    def functoriality():
        nonlocal mutN
        mutN = mutate_rep_data(N, k, PLUS, strict=strict) if N is not M else mutM
        g = random_morphism(N, N, rng)
        mf = mu_plus_morphism(f, k, mutM, mutN)
        mg = mu_plus_morphism(g, k, mutN, mutN)
        mgf = mu_plus_morphism(g.compose(f), k, mutM, mutN)
        out = {"mu(g f) - mu(g) mu(f) confined": (mgf - mg.compose(mf)).is_confined(k)}
        conf = hom_basis(M, N, confined_at=k)
        if conf:
            c = random_morphism(M, N, rng, conf)
            out["confined maps to confined"] = mu_plus_morphism(c, k, mutM, mutN).is_confined(k)
        return out

    rec.run("functoriality mod confined", functoriality, requires=[mutM])

    def hom_dimension():
        before = quotient_hom(M, N, k).quotient_dim
        after = quotient_hom(mutM.rep, mutN.rep, k).quotient_dim
        report.stats["quotient_dim"] = [before, after]
        return before == after, f"quotient dims {before} vs {after}"

    rec.run("hom dimension", hom_dimension, requires=[mutM, mutN])
    if mutM is not None:
        report.stats["mu_dims"] = {v: mutM.rep.dims[v] for v in qp.quiver.vertices}
    report.runtime = time.perf_counter() - t0
    return report


def certify_seed(seed: int, spec: Optional[InstanceSpec] = None) -> CertReport:
    spec = InstanceSpec(seed=seed) if spec is None else InstanceSpec(**{**asdict(spec), "seed": seed})
    try:
        inst = gen_instance(spec)
    except GenerationExhausted as exc:
        rep = CertReport(seed, asdict(spec), "", {}, [Check("generation", False, str(exc))])
        return rep
    rep = certify(inst.qp, inst.M, inst.k, inst.N, seed=seed, spec=asdict(spec))
    rep.stats["split_off"] = list(inst.split_multiplicities)
    rep.stats["num_arrows"] = len(inst.qp.quiver.arrows)
    rep.stats["num_terms"] = len(inst.qp.potential)
    return rep
