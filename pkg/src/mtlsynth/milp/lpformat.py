"""CPLEX LP text export and import.

The writer lists every variable in the Bounds section in index order, so
parsing recovers the exact variable order; numbers use ``repr`` and
round-trip bit for bit.  Model metadata travels in a comment line.
"""

from __future__ import annotations

import json
import math
import re

from .model import MilpModel, ModelError

_SECTIONS = {
    "minimize": "obj", "minimum": "obj", "min": "obj",
    "subject to": "rows", "such that": "rows", "st": "rows", "s.t.": "rows",
    "bounds": "bounds", "bound": "bounds",
    "binaries": "bin", "binary": "bin", "bin": "bin",
    "end": "end",
}
_TOKEN = re.compile(r"\s*(<=|>=|=<|=>|=|<|>|:|[+-]|[A-Za-z_][A-Za-z0-9_.\[\]]*|"
                    r"[-+]?(?:\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|inf(?:inity)?))",
                    re.IGNORECASE)


class LpFormatError(ModelError):
    pass


def _num(v: float) -> str:
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return repr(float(v))


def _terms(coeffs: dict[int, float], names: list[str]) -> str:
    parts = []
    for i, (j, c) in enumerate(sorted(coeffs.items())):
        sign = "-" if c < 0 or (c == 0 and math.copysign(1.0, c) < 0) else "+"
        mag = _num(abs(c))
        if i == 0:
            parts.append(f"{'-' if sign == '-' else ''}{mag} {names[j]}")
        else:
            parts.append(f"{sign} {mag} {names[j]}")
    return " ".join(parts)


def export_lp(model: MilpModel) -> str:
    lines = ["\\ mtlsynth LP export",
             "\\ meta " + json.dumps({"big_m": model.big_m, "metadata": model.metadata},
                                     sort_keys=True)]
    lines.append("Minimize")
    obj = _terms(model.objective, model.names)
    lines.append(f" obj: {obj}" if obj else " obj:")
    lines.append("Subject To")
    for row in model.rows:
        lines.append(f" {row.name}: {_terms(row.coeffs, model.names)} {row.sense} {_num(row.rhs)}")
    lines.append("Bounds")
    for j, name in enumerate(model.names):
        lo, hi = model.lb[j], model.ub[j]
        if lo == -math.inf and hi == math.inf:
            lines.append(f" {name} free")
        else:
            lines.append(f" {_num(lo)} <= {name} <= {_num(hi)}")
    bins = [n for n, b in zip(model.names, model.binary) if b]
    if bins:
        lines.append("Binaries")
        lines.extend(f" {n}" for n in bins)
    lines.append("End")
    return "\n".join(lines) + "\n"


def _tokenize(text: str, lineno: int) -> list[str]:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise LpFormatError(f"line {lineno}: cannot read {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def _to_float(tok: str) -> float | None:
    try:
        return float(tok)
    except ValueError:
        low = tok.lower()
        if low in ("inf", "infinity", "+inf", "+infinity"):
            return math.inf
        if low in ("-inf", "-infinity"):
            return -math.inf
        return None


def _is_name(tok: str) -> bool:
    return re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.\[\]]*", tok) is not None and \
        tok.lower() not in ("inf", "infinity")


class _Builder:
    def __init__(self):
        self.model = MilpModel()

    def var(self, name: str) -> int:
        if name not in self.model.index:
            self.model.add_var(name, 0.0, math.inf)
        return self.model.index[name]


def _linear(tokens: list[str], b: _Builder, lineno: int) -> dict[int, float]:
    coeffs: dict[int, float] = {}
    sign, coef = 1.0, None
    for tok in tokens:
        if tok in "+-":
            sign = sign * (-1.0 if tok == "-" else 1.0)
            continue
        val = _to_float(tok)
        if val is not None and not _is_name(tok):
            coef = val if coef is None else coef * val
            continue
        if not _is_name(tok):
            raise LpFormatError(f"line {lineno}: unexpected token {tok!r}")
        j = b.var(tok)
        c = sign * (1.0 if coef is None else coef)
        coeffs[j] = coeffs.get(j, 0.0) + c
        sign, coef = 1.0, None
    if coef is not None:
        raise LpFormatError(f"line {lineno}: constant term in a linear expression")
    return coeffs


def parse_lp(text: str) -> MilpModel:
    b = _Builder()
    section = None
    objective: dict[int, float] = {}
    pending_rows: list[tuple[dict[int, float], str, float, str]] = []
    bounds: dict[int, tuple[float, float]] = {}
    meta = None
    bound_order: list[str] = []
    buf: list[str] = []
    buf_line = 0

    def flush_row():
        nonlocal buf
        if not buf:
            return
        toks = buf
        buf = []
        name = None
        if len(toks) > 2 and toks[1] == ":":
            name = toks[0]
            toks = toks[2:]
        idx = next((i for i, t in enumerate(toks) if t in ("<=", ">=", "=<", "=>", "=", "<", ">")),
                   None)
        if idx is None:
            raise LpFormatError(f"line {buf_line}: constraint without a relation")
        sense = {"=<": "<=", "<": "<=", "=>": ">=", ">": ">="}.get(toks[idx], toks[idx])
        rhs_toks = toks[idx + 1:]
        rhs_sign = 1.0
        while rhs_toks and rhs_toks[0] in "+-":
            rhs_sign *= -1.0 if rhs_toks[0] == "-" else 1.0
            rhs_toks = rhs_toks[1:]
        if len(rhs_toks) != 1 or _to_float(rhs_toks[0]) is None:
            raise LpFormatError(f"line {buf_line}: right-hand side must be a number")
        coeffs = _linear(toks[:idx], b, buf_line)
        pending_rows.append((coeffs, sense, rhs_sign * _to_float(rhs_toks[0]),
                             name or f"c{len(pending_rows)}"))

    for lineno, raw in enumerate(text.splitlines(), 1):
        if raw.lstrip().startswith("\\"):
            body = raw.lstrip()[1:].strip()
            if body.startswith("meta "):
                meta = json.loads(body[5:])
            continue
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in _SECTIONS:
            if section == "rows":
                flush_row()
            section = _SECTIONS[key]
            if section == "end":
                break
            continue
        if section is None:
            raise LpFormatError(f"line {lineno}: content before the objective section")
        if section == "obj":
            toks = _tokenize(line.replace(":", " : "), lineno)
            if len(toks) >= 2 and toks[1] == ":":
                toks = toks[2:]
            for j, c in _linear(toks, b, lineno).items():
                objective[j] = objective.get(j, 0.0) + c
        elif section == "rows":
            toks = _tokenize(line.replace(":", " : "), lineno)
            # a new row starts with "name :" or after the previous one ended
            if len(toks) >= 2 and toks[1] == ":" and buf:
                flush_row()
            if not buf:
                buf_line = lineno
            buf.extend(toks)
            if any(t in ("<=", ">=", "=<", "=>", "=", "<", ">") for t in buf):
                tail = buf[-1]
                if _to_float(tail) is not None and not _is_name(tail):
                    flush_row()
        elif section == "bounds":
            name = _parse_bound(line, lineno, b, bounds)
            bound_order.append(name)
        elif section == "bin":
            for tok in line.split():
                j = b.var(tok)
                b.model.binary[j] = True
                lo, hi = bounds.get(j, (0.0, 1.0))
                bounds[j] = (max(lo, 0.0), min(hi, 1.0))
    if buf:
        flush_row()

    # variables take the order of the Bounds section, then first appearance
    src = b.model
    order = list(dict.fromkeys(bound_order + src.names))
    remap = {src.index[name]: i for i, name in enumerate(order)}
    model = MilpModel()
    for name in order:
        j = src.index[name]
        lo, hi = bounds.get(j, (0.0, math.inf))
        model.add_var(name, lo, hi)
        model.binary[-1] = src.binary[j]
    for coeffs, sense, rhs, name in pending_rows:
        model.add_constr({remap[j]: c for j, c in coeffs.items()}, sense, rhs, name)
    model.objective = {remap[j]: c for j, c in sorted(objective.items(), key=lambda t: remap[t[0]])
                       if c != 0.0}
    if meta is not None:
        model.big_m = meta.get("big_m", model.big_m)
        model.metadata = meta.get("metadata", {})
    return model


def _parse_bound(line: str, lineno: int, b: _Builder, bounds: dict) -> str:
    toks = line.split()
    if len(toks) == 2 and toks[1].lower() == "free":
        bounds[b.var(toks[0])] = (-math.inf, math.inf)
        return toks[0]
    if len(toks) == 5 and toks[1] in ("<=", "=<") and toks[3] in ("<=", "=<"):
        lo, hi = _to_float(toks[0]), _to_float(toks[4])
        if lo is None or hi is None:
            raise LpFormatError(f"line {lineno}: bad bound values")
        bounds[b.var(toks[2])] = (lo, hi)
        return toks[2]
    if len(toks) == 3:
        if _to_float(toks[0]) is not None and not _is_name(toks[0]):
            val, op, name = _to_float(toks[0]), toks[1], toks[2]
            op = {"<=": ">=", "=<": ">=", ">=": "<=", "=>": "<=", "=": "="}.get(op)
        else:
            name, op, val = toks[0], toks[1], _to_float(toks[2])
            op = {"=<": "<=", "=>": ">="}.get(op, op)
        if val is None or op not in ("<=", ">=", "="):
            raise LpFormatError(f"line {lineno}: cannot read bound {line!r}")
        j = b.var(name)
        lo, hi = bounds.get(j, (0.0, math.inf))
        if op == "<=":
            hi = val
        elif op == ">=":
            lo = val
        else:
            lo = hi = val
        bounds[j] = (lo, hi)
        return name
    raise LpFormatError(f"line {lineno}: cannot read bound {line!r}")
