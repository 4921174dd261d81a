"""Reading the JSON documents accepted by the command line."""
from __future__ import annotations

import json
import sys
from typing import Optional

from .errors import QPError
from .potential import Potential
from .qpmut import QP
from .quiver import Quiver
from .repcat import RepMorphism, Representation


class InputError(Exception):
    """Bad user input; the CLI maps it to exit status 2."""


def load_json(path: Optional[str]) -> dict:
    name = "<stdin>" if path in (None, "-") else path
    try:
        text = sys.stdin.read() if path in (None, "-") else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"{name}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{name}: line {exc.lineno} column {exc.colno} (char {exc.pos}): {exc.msg}") from None
    if not isinstance(data, dict):
        raise InputError(f"{name}: top-level value must be an object")
    return data


def _require(data: dict, key: str, where: str):
    if key not in data:
        raise InputError(f"{where}: missing key {key!r}")
    return data[key]


def parse_quiver(data: dict) -> Quiver:
    if "quiver" in data:
        data = data["quiver"]
    try:
        return Quiver.from_json(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"quiver: malformed ({exc})") from None
    except (QPError, ValueError) as exc:
        raise InputError(f"quiver: {exc}") from None


def parse_qp(data: dict, field, degree_bound: Optional[int] = None) -> QP:
    """Accepts ``{"quiver":…, "potential":…}`` or a document wrapping it under ``"qp"``."""
    if "qp" in data:
        data = data["qp"]
    Q = parse_quiver(_require(data, "quiver", "qp"))
    pot = data.get("potential", {"terms": []})
    try:
        return QP(Q, Potential.from_json(Q, field, pot, degree_bound))
    except (KeyError, TypeError) as exc:
        raise InputError(f"potential: malformed ({exc})") from None
    except (QPError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"potential: {exc}") from None


def parse_rep(qp: QP, data: dict, where: str = "rep", check: bool = False) -> Representation:
    try:
        return Representation.from_json(qp, data, check=check)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{where}: malformed ({exc})") from None
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{where}: {exc}") from None
    except QPError as exc:
        if check:
            raise
        raise InputError(f"{where}: {exc}") from None


def parse_morphism(M: Representation, N: Representation, data: dict, check: bool = True) -> RepMorphism:
    try:
        return RepMorphism.from_json(M, N, data, check=check)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"morphism: malformed ({exc})") from None


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=False, separators=(",", ":"))
