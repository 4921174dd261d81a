"""Command line interface: ``qpmut <command> [options] [FILE]``.

Exit status: 0 on success, 1 when a check fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from typing import List, Optional

import numpy as np

from . import exactlin as el
from .errors import NotNilpotent, QPError, RelationViolated
from .jsonio import (InputError, dumps, load_json, parse_morphism, parse_qp, parse_quiver,
                     parse_rep)
from .qpmut import mutate
from .quiver import mutate_quiver
from .repcat import check_representation, hom_basis, random_morphism

FIELD_ENV = "QPMUT_FIELD"


def parse_seeds(text: str) -> List[int]:
    seeds: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    if not seeds:
        raise ValueError("empty seed list")
    return seeds


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # the subcommand copy must not reset values given before the subcommand
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--field", default=d(None),
                   help=f"fp:P or rational (default: ${FIELD_ENV} or fp:32003)")
    g.add_argument("--degree-bound", type=int, default=d(None), metavar="D")
    g.add_argument("--seed", type=int, default=d(0))
    g.add_argument("--strict-truncation", action="store_true", default=d(False),
                   help="fail instead of silently dropping nonzero terms beyond D")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    p = argparse.ArgumentParser(prog="qpmut", parents=[_global_flags(suppress=False)],
                                description="Mutation of quivers with potential and their representations.")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        c = sub.add_parser(name, help=help_, parents=[common])
        c.add_argument("input", nargs="?", default="-", help="JSON file (default: stdin)")
        return c

    c = cmd("mutate-quiver", "mutate a quiver")
    c.add_argument("--vertex", required=True)
    c = cmd("mutate-qp", "mutate a quiver with potential")
    c.add_argument("--vertex", required=True)
    c.add_argument("--direction", choices=("plus", "minus"), default="plus")
    c.add_argument("--with-split", action="store_true", help="also emit the splitting data")
    c = cmd("mutate-rep", "mutate a representation")
    c.add_argument("--vertex", required=True)
    c.add_argument("--direction", choices=("plus", "minus"), default="plus")
    c.add_argument("--emit-choice", action="store_true", help="emit the charts used")
    cmd("check", "check that a representation satisfies the relations")
    c = cmd("hom", "basis of Hom(source, target)")
    c.add_argument("--quotient-at", default=None, metavar="K")
    c = cmd("functor", "mutation of morphisms and the quasi-inverse data")
    c.add_argument("--vertex", required=True)
    c.add_argument("--op", choices=("plus", "minus", "psi", "naturality"), required=True)
    v = sub.add_parser("verify", help="certify random instances", parents=[common])
    v.add_argument("--seeds", default="1..100")
    v.add_argument("--report-dir", default=None, help="write reports.jsonl and figures here")
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--num-vertices", type=int, default=5)
    v.add_argument("--num-arrows", type=int, default=7)
    v.add_argument("--max-dim", type=int, default=4)
    return p


def _field(args):
    spec = args.field or os.environ.get(FIELD_ENV) or "fp:32003"
    try:
        return el.parse_field(spec)
    except ValueError as exc:
        raise InputError(f"--field: {exc}") from None


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj) + "\n")


def _rep_doc(data: dict, key: str):
    if key not in data:
        raise InputError(f"missing key {key!r}")
    return data[key]


# ---------------------------------------------------------------------------
# commands


def cmd_mutate_quiver(args) -> int:
    Q = parse_quiver(load_json(args.input))
    _emit(mutate_quiver(Q, args.vertex).to_json())
    return 0


def cmd_mutate_qp(args) -> int:
    F = _field(args)
    qp = parse_qp(load_json(args.input), F, args.degree_bound)
    red, sr = mutate(qp, args.vertex, args.direction, strict=args.strict_truncation)
    out = red.to_json()
    if args.with_split:
        out = {"qp": out, "split": sr.to_json()}
    _emit(out)
    return 0


def cmd_mutate_rep(args) -> int:
    from .repmut import mutate_rep_data
    F = _field(args)
    data = load_json(args.input)
    qp = parse_qp(data, F, args.degree_bound)
    M = parse_rep(qp, _rep_doc(data, "rep"), check=True)
    res = mutate_rep_data(M, args.vertex, args.direction, strict=args.strict_truncation)
    out = {"qp": res.rep.qp.to_json(), "rep": res.rep.to_json()}
    if args.emit_choice:
        out["choice"] = res.premutation.choice.to_json(F)
    _emit(out)
    return 0


def cmd_check(args) -> int:
    F = _field(args)
    data = load_json(args.input)
    qp = parse_qp(data, F, args.degree_bound)
    M = parse_rep(qp, _rep_doc(data, "rep"))
    try:
        check_representation(M)
    except RelationViolated as exc:
        _emit({"valid": False, "error": "RelationViolated", "arrow": exc.arrow,
               "witness": list(exc.witness)})
        return 1
    except NotNilpotent as exc:
        _emit({"valid": False, "error": "NotNilpotent", "message": str(exc)})
        return 1
    _emit({"valid": True})
    return 0


def _pair(data, qp):
    M = parse_rep(qp, _rep_doc(data, "source"), "source", check=True)
    N = parse_rep(qp, data["target"], "target", check=True) if "target" in data else M
    return M, N


def cmd_hom(args) -> int:
    F = _field(args)
    data = load_json(args.input)
    qp = parse_qp(data, F, args.degree_bound)
    M, N = _pair(data, qp)
    basis = hom_basis(M, N)
    out = {"dim": len(basis), "basis": [f.to_json() for f in basis]}
    if args.quotient_at is not None:
        k = qp.quiver.check_vertex(args.quotient_at)
        conf = hom_basis(M, N, confined_at=k)
        out.update({"confined_dim": len(conf), "quotient_dim": len(basis) - len(conf),
                    "confined_basis": [f.to_json() for f in conf]})
    _emit(out)
    return 0


def cmd_functor(args) -> int:
    from .functor import (mu_morphism, naturality_defect, prime_identification, psi,
                          quasi_inverse_morphism)
    F = _field(args)
    data = load_json(args.input)
    qp = parse_qp(data, F, args.degree_bound)
    k = qp.quiver.check_vertex(args.vertex)
    if args.op == "psi":
        M = parse_rep(qp, data.get("rep") or _rep_doc(data, "source"), check=True)
        w = psi(M, k)
        conds = {**w.conditions(), **w.section_conditions()}
        _emit({"psi": w.morphism().to_json(), "m_prime": w.ident.rep.to_json(),
               "block_dims": list(w.ident.block_dims), "conditions": conds})
        return 0 if all(conds.values()) else 1
    M, N = _pair(data, qp)
    if "morphism" in data:
        f = parse_morphism(M, N, data["morphism"])
    else:
        f = random_morphism(M, N, np.random.default_rng(args.seed))
    if args.op in ("plus", "minus"):
        g = mu_morphism(f, k, args.op)
        _emit({"source": g.source.to_json(), "target": g.target.to_json(),
               "qp": g.source.qp.to_json(), "morphism": g.to_json()})
        return 0
    idM = prime_identification(M, k)
    idN = prime_identification(N, k) if N is not M else idM
    wM = psi(M, k, idM)
    wN = psi(N, k, idN) if N is not M else wM
    fp = quasi_inverse_morphism(f, idM, idN)
    d = naturality_defect(f, wM, wN, fp)
    confined = d.is_confined(k)
    _emit({"morphism": f.to_json(), "f_prime": fp.to_json(), "defect": d.to_json(),
           "confined": confined})
    return 0 if confined else 1


def _certify_one(job):
    from .harness import InstanceSpec, certify_seed
    seed, spec = job
    return certify_seed(seed, InstanceSpec(**spec)).to_json()


def cmd_verify(args) -> int:
    from .harness import InstanceSpec
    try:
        seeds = parse_seeds(args.seeds)
    except ValueError as exc:
        raise InputError(f"--seeds: {exc}") from None
    field = _field(args)
    try:
        spec = InstanceSpec(num_vertices=args.num_vertices, num_arrows=args.num_arrows,
                            max_dim=args.max_dim, field=field.name,
                            degree_bound=args.degree_bound or InstanceSpec.degree_bound)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    jobs = [(s, asdict(spec)) for s in seeds]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            reports = list(pool.map(_certify_one, jobs))
    else:
        reports = [_certify_one(j) for j in jobs]
    lines = [dumps(r) for r in reports]
    if args.report_dir:
        from .plots import render
        os.makedirs(args.report_dir, exist_ok=True)
        with open(os.path.join(args.report_dir, "reports.jsonl"), "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        render(reports, args.report_dir)
    for line in lines:
        sys.stdout.write(line + "\n")
    failed = [r["seed"] for r in reports if not r["passed"]]
    sys.stderr.write(f"{len(reports) - len(failed)}/{len(reports)} instances passed\n")
    return 1 if failed else 0


COMMANDS = {
    "mutate-quiver": cmd_mutate_quiver,
    "mutate-qp": cmd_mutate_qp,
    "mutate-rep": cmd_mutate_rep,
    "check": cmd_check,
    "hom": cmd_hom,
    "functor": cmd_functor,
    "verify": cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        sys.stderr.write(f"qpmut: input error: {exc}\n")
        return 2
    except QPError as exc:
        sys.stderr.write(f"qpmut: {type(exc).__name__}: {exc}\n")
        return 1 if isinstance(exc, (RelationViolated, NotNilpotent)) else 2


if __name__ == "__main__":
    sys.exit(main())
