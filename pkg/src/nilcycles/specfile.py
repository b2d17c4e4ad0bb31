"""Reading and writing system description files.

A spec file is one JSON document.  It names either an inline system::

    {"system": {"phi": [[0, 1, "1"], [2, 0, "1"]], "psi": [[3, 0, "-2"]]}}

or a builtin family and a parameter point::

    {"family": "cubic_n3", "point": {"eps": "1/10"}}

Symbolic coefficients and parameter values must be exact: integers or
rational strings such as ``"-523/4"``.  Floats and decimal strings are
rejected there.  Numerical options (annulus, tolerances) may be floats.
For ``quintic_z2`` an ``"epsilon"`` list of five rationals may be given in
place of ``"point"``; it is mapped to lambda1..lambda5.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .branch import PlanarSystem
from .families import (
    EPSILON_PARAMS,
    QUINTIC_PARAMS,
    ParametricSystem,
    builtin_family,
    evaluate,
    lambda_from_epsilon,
)
from .series import BiPoly, as_rational

__all__ = ["SpecError", "SystemSpec", "load_spec", "parse_spec", "emit_inline_spec"]


class SpecError(ValueError):
    pass


def _exact(value: Any, where: str) -> Fraction:
    if isinstance(value, float):
        raise SpecError(f"{where}: floats are not allowed in exact fields, use a rational string")
    try:
        return as_rational(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"{where}: {exc}") from None


def _monomials(entries, where: str) -> BiPoly:
    if not isinstance(entries, list):
        raise SpecError(f"{where} must be a list of [i, j, coefficient] entries")
    out = []
    for k, entry in enumerate(entries):
        if not (isinstance(entry, list) and len(entry) == 3):
            raise SpecError(f"{where}[{k}] must be [i, j, coefficient]")
        i, j, c = entry
        if not (isinstance(i, int) and isinstance(j, int)) or i < 0 or j < 0:
            raise SpecError(f"{where}[{k}]: exponents must be nonnegative integers")
        out.append((i, j, _exact(c, f"{where}[{k}]")))
    return BiPoly.from_entries(out)


@dataclass
class SystemSpec:
    """A parsed spec: the exact system plus the family context when there is one."""

    system: PlanarSystem
    family: ParametricSystem | None = None
    point: dict[str, Fraction] = field(default_factory=dict)
    options: dict[str, Any] = field(default_factory=dict)
    schedule_ratio: Fraction | None = None


def parse_spec(doc: dict) -> SystemSpec:
    if not isinstance(doc, dict):
        raise SpecError("spec must be a JSON object")
    options = doc.get("options", {}) or {}
    if not isinstance(options, dict):
        raise SpecError("options must be an object")
    ratio = doc.get("ratio", options.get("ratio"))
    ratio = None if ratio is None else _exact(ratio, "ratio")

    if "system" in doc:
        body = doc["system"]
        if not isinstance(body, dict):
            raise SpecError("system must be an object with phi and psi")
        phi = _monomials(body.get("phi"), "system.phi")
        psi = _monomials(body.get("psi"), "system.psi")
        sys = PlanarSystem(phi, psi)
        sys.check_normal_form()
        return SystemSpec(sys, None, {}, options, ratio)

    if "family" not in doc:
        raise SpecError("spec needs either 'system' or 'family'")
    try:
        family = builtin_family(str(doc["family"]))
    except KeyError as exc:
        raise SpecError(str(exc.args[0])) from None

    if "epsilon" in doc:
        if family.params != QUINTIC_PARAMS:
            raise SpecError("'epsilon' is only meaningful for the quintic family")
        eps = doc["epsilon"]
        if isinstance(eps, dict):
            eps = [eps.get(p, 0) for p in EPSILON_PARAMS]
        if not (isinstance(eps, list) and len(eps) == 5):
            raise SpecError("epsilon must list five rationals")
        eps = [_exact(e, f"epsilon[{k}]") for k, e in enumerate(eps)]
        point = dict(zip(QUINTIC_PARAMS, lambda_from_epsilon(*eps)))
    else:
        raw = doc.get("schedule", doc.get("point", {}))
        if not isinstance(raw, dict):
            raise SpecError("point must be an object of parameter: rational")
        point = {k: _exact(v, f"point.{k}") for k, v in raw.items()}
        unknown = sorted(set(point) - set(family.params))
        if unknown:
            raise SpecError(f"unknown parameter(s) for {family.name}: {', '.join(unknown)}")
    missing = [p for p in family.params if p not in point]
    if missing:
        raise SpecError(f"missing parameter(s) for {family.name}: {', '.join(missing)}")
    sys = evaluate(family, point)
    return SystemSpec(sys, family, point, options, ratio)


def load_spec(path: str | Path) -> SystemSpec:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc})") from None
    return parse_spec(doc)


def emit_inline_spec(sys: PlanarSystem, options: dict | None = None) -> dict:
    """Spec document describing ``sys`` inline, with exact rational strings."""

    def entries(p: BiPoly):
        return [[i, j, str(c)] for (i, j), c in sorted(p.items())]

    doc: dict[str, Any] = {"system": {"phi": entries(sys.phi), "psi": entries(sys.psi)}}
    if options:
        doc["options"] = dict(options)
    return doc
