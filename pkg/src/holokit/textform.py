"""Human-readable relation text, and parsers bringing it back.

Pretty output mirrors the usual way these equations are written:

    (n + 2)*u(n+1) + (-4*n - 2)*u(n) = 0, u(0) = 1
    (16*x^2 - x)*y''(x) + (32*x - 1)*y'(x) + (4)*y(x) = 0, coeffs = [1, 4]
    (x^2)*y^2 + (x - 1)*y + (1) = 0, y(0) = 1

Every coefficient polynomial is parenthesized (signs live inside), terms are
joined by `` + `` in descending shift/derivative/power order, and the tail
carries the data that makes the object self-contained (initial terms, seed).
JSON mode emits the shared schema with deterministic formatting.  Both modes
parse back to equal objects.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .errors import ParseError
from .poly import Poly, rat_from_str, rat_to_str
from .relations import (AlgebraicEquation, DiffEquation, Recurrence,
                        relation_from_json)


def poly_to_text(p: Poly, var: str) -> str:
    """Descending-power rendering like ``-4*n^2 + n - 2``; ``0`` for zero."""
    if p.is_zero():
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if not c:
            continue
        if k == 0:
            mono = rat_to_str(c)
        else:
            v = var if k == 1 else f"{var}^{k}"
            if c == 1:
                mono = v
            elif c == -1:
                mono = f"-{v}"
            else:
                mono = f"{rat_to_str(c)}*{v}"
        if not parts:
            parts.append(mono)
        elif mono.startswith("-"):
            parts.append(f"- {mono[1:]}")
        else:
            parts.append(f"+ {mono}")
    return " ".join(parts)


_MONO_RE = re.compile(
    r"^(?P<coeff>\d+(?:/\d+)?)?(?:(?P<star>\*)?(?P<var>[a-zA-Z]\w*)(?:\^(?P<pow>\d+))?)?$")


def poly_from_text(text: str, var: str) -> Poly:
    text = text.strip()
    if text in ("0", ""):
        return Poly.zero()
    coeffs = {}
    for raw in text.replace(" - ", " + -").split(" + "):
        raw = raw.strip()
        if not raw:
            continue
        sign = 1
        if raw.startswith("-"):
            sign, raw = -1, raw[1:].strip()
        elif raw.startswith("+"):
            raw = raw[1:].strip()
        m = _MONO_RE.match(raw)
        if not m or (m.group("var") is None and m.group("coeff") is None):
            raise ParseError(f"bad monomial {raw!r} in {text!r}")
        if m.group("var") not in (None, var):
            raise ParseError(f"unexpected variable {m.group('var')!r} in {text!r}")
        coeff_text = m.group("coeff")
        coeff = rat_from_str(coeff_text) if coeff_text else Fraction(1)
        power = 0
        if m.group("var"):
            power = int(m.group("pow") or 1)
        coeffs[power] = coeffs.get(power, Fraction(0)) + sign * coeff
    out = [Fraction(0)] * (max(coeffs) + 1)
    for k, c in coeffs.items():
        out[k] = c
    return Poly(out)


def _deriv_name(i: int, var: str) -> str:
    if i == 0:
        return f"y({var})"
    if i <= 2:
        return "y" + "'" * i + f"({var})"
    return f"y^({i})({var})"


def _split_top_level(text: str, sep: str):
    parts = []
    depth = 0
    start = 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif depth == 0 and text.startswith(sep, i):
            parts.append(text[start:i])
            start = i + len(sep)
            i += len(sep)
            continue
        i += 1
    parts.append(text[start:])
    return parts


def format_relation(rel, mode="pretty") -> str:
    """Render a Recurrence / DiffEquation / AlgebraicEquation."""
    if mode == "json":
        return json.dumps(rel.to_json(), indent=2, sort_keys=True)
    if mode != "pretty":
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(rel, Recurrence):
        n = rel.variable
        terms = []
        for i in range(rel.order, -1, -1):
            c = rel.coeffs[i]
            if c.is_zero():
                continue
            arg = f"{n}+{i}" if i else n
            terms.append(f"({poly_to_text(c, n)})*u({arg})")
        rhs = poly_to_text(rel.inhomogeneous, n)
        text = " + ".join(terms) + f" = {rhs}"
        tail = ", ".join(f"u({k}) = {rat_to_str(v)}" for k, v in enumerate(rel.initial))
        return f"{text}, {tail}" if tail else text
    if isinstance(rel, DiffEquation):
        x = rel.variable
        terms = []
        for i in range(rel.order, -1, -1):
            c = rel.coeffs[i]
            if c.is_zero():
                continue
            terms.append(f"({poly_to_text(c, x)})*{_deriv_name(i, x)}")
        rhs = poly_to_text(rel.inhomogeneous, x)
        text = " + ".join(terms) + f" = {rhs}"
        if rel.initial:
            coeffs = ", ".join(rat_to_str(v) for v in rel.initial)
            text += f", coeffs = [{coeffs}]"
        return text
    if isinstance(rel, AlgebraicEquation):
        terms = []
        for i in range(rel.degree_y, -1, -1):
            c = rel.coeffs_y[i]
            if c.is_zero():
                continue
            if i == 0:
                terms.append(f"({poly_to_text(c, 'x')})")
            elif i == 1:
                terms.append(f"({poly_to_text(c, 'x')})*y")
            else:
                terms.append(f"({poly_to_text(c, 'x')})*y^{i}")
        return " + ".join(terms) + f" = 0, y(0) = {rat_to_str(rel.seed)}"
    raise TypeError(f"cannot format {type(rel).__name__}")


_REC_TERM = re.compile(r"^\((?P<poly>.*)\)\*u\((?P<var>[a-zA-Z]\w*)(?:\+(?P<shift>\d+))?\)$")
_ODE_TERM = re.compile(
    r"^\((?P<poly>.*)\)\*y(?:(?P<primes>'+)|\^\((?P<order>\d+)\))?\((?P<var>[a-zA-Z]\w*)\)$")
_ALG_TERM = re.compile(r"^\((?P<poly>.*)\)(?:\*y(?:\^(?P<pow>\d+))?)?$")
_INIT_RE = re.compile(r"^u\((\d+)\)\s*=\s*(\S+)$")


def parse_relation(text: str):
    """Inverse of :func:`format_relation`, accepting either mode."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return relation_from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc}") from exc
    chunks = _split_top_level(text, ", ")
    equation = chunks[0]
    sides = _split_top_level(equation, " = ")
    if len(sides) != 2:
        raise ParseError(f"expected one top-level '=' in {equation!r}")
    lhs, rhs = sides
    terms = [t.strip() for t in _split_top_level(lhs, " + ")]
    if "u(" in lhs:
        return _parse_rec(terms, rhs, chunks[1:])
    if re.search(r"y(?:'|\^\(|\()", lhs):
        return _parse_ode(terms, rhs, chunks[1:])
    return _parse_algeq(terms, chunks[1:])


def _parse_rec(terms, rhs, tail):
    coeffs = {}
    var = None
    for t in terms:
        m = _REC_TERM.match(t)
        if not m:
            raise ParseError(f"bad recurrence term {t!r}")
        var = var or m.group("var")
        shift = int(m.group("shift") or 0)
        coeffs[shift] = poly_from_text(m.group("poly"), var)
    order = max(coeffs)
    polys = [coeffs.get(i, Poly.zero()) for i in range(order + 1)]
    inhomog = poly_from_text(rhs, var or "n")
    initial = {}
    for item in tail:
        m = _INIT_RE.match(item.strip())
        if not m:
            raise ParseError(f"bad initial assignment {item!r}")
        initial[int(m.group(1))] = rat_from_str(m.group(2))
    init_list = [initial[k] for k in sorted(initial)]
    if sorted(initial) != list(range(len(init_list))):
        raise ParseError("initial terms must cover u(0), u(1), ... contiguously")
    return Recurrence(polys, init_list, inhomog, var)


def _parse_ode(terms, rhs, tail):
    coeffs = {}
    var = None
    for t in terms:
        m = _ODE_TERM.match(t)
        if not m:
            raise ParseError(f"bad differential term {t!r}")
        var = var or m.group("var")
        order = len(m.group("primes") or "") or int(m.group("order") or 0)
        coeffs[order] = poly_from_text(m.group("poly"), var)
    top = max(coeffs)
    polys = [coeffs.get(i, Poly.zero()) for i in range(top + 1)]
    inhomog = poly_from_text(rhs, var or "x")
    initial = []
    for item in tail:
        item = item.strip()
        m = re.match(r"^coeffs\s*=\s*\[(.*)\]$", item)
        if not m:
            raise ParseError(f"bad series-coefficient list {item!r}")
        initial = [rat_from_str(s.strip()) for s in m.group(1).split(",") if s.strip()]
    return DiffEquation(polys, initial, inhomog, var)


def _parse_algeq(terms, tail):
    coeffs = {}
    for t in terms:
        m = _ALG_TERM.match(t)
        if not m:
            raise ParseError(f"bad algebraic term {t!r}")
        power = 0
        if t.endswith("y"):
            power = 1
        elif m.group("pow"):
            power = int(m.group("pow"))
        coeffs[power] = poly_from_text(m.group("poly"), "x")
    top = max(coeffs)
    polys = [coeffs.get(i, Poly.zero()) for i in range(top + 1)]
    seed = Fraction(0)
    for item in tail:
        m = re.match(r"^y\(0\)\s*=\s*(\S+)$", item.strip())
        if not m:
            raise ParseError(f"bad seed assignment {item!r}")
        seed = rat_from_str(m.group(1))
    return AlgebraicEquation(polys, seed)
