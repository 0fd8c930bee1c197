"""Fixed-format MPS writer and a small reader used for round-trip checks.

Fixed MPS limits names to 8 characters, so columns and rows are written under
generated names (``X0000001``, ``R0000001``); :func:`mps_names` returns the map
back to model names.
"""

from __future__ import annotations

import math

from .model import BINARY, Constraint, LinExpr, MilpModel

OBJ_ROW = "OBJ"


def col_name(i: int) -> str:
    return f"X{i + 1:07d}"


def row_name(i: int) -> str:
    return f"R{i + 1:07d}"


def mps_names(m: MilpModel) -> dict[str, str]:
    return {col_name(v.index): v.name for v in m.variables}


def _num(x: float) -> str:
    s = f"{x:.12g}"
    if len(s) > 12:
        s = f"{x:.6e}"
    return s


def _field_line(f1: str, f2: str, f3: str, f4: str, f5: str = "", f6: str = "") -> str:
    # columns 2-3, 5-12, 15-22, 25-36, 40-47, 50-61
    line = f" {f1:<2} {f2:<8}  {f3:<8}  {f4:>12}"
    if f5:
        line += f"   {f5:<8}  {f6:>12}"
    return line.rstrip()


def emit_mps(m: MilpModel, bounds: dict[int, tuple[float, float]] | None = None,
             objective=None) -> str:
    """Render ``m`` as fixed-format MPS text in declaration order.

    ``bounds``/``objective`` optionally override variable bounds and the objective
    without touching the model.
    """
    obj = m.objective if objective is None else LinExpr.of(objective)
    out = [f"NAME          {m.name[:8].upper() or 'MODEL'}", "ROWS", f" N  {OBJ_ROW}"]
    sense_code = {"<=": "L", ">=": "G", "==": "E"}
    for r, con in enumerate(m.constraints):
        out.append(f" {sense_code[con.sense]}  {row_name(r)}")

    cols: list[list[tuple[str, float]]] = [[] for _ in m.variables]
    for k, c in obj.terms.items():
        if c:
            cols[k].append((OBJ_ROW, c))
    for r, con in enumerate(m.constraints):
        rn = row_name(r)
        for k, c in con.terms.items():
            cols[k].append((rn, c))

    out.append("COLUMNS")
    in_int = False
    marker = 0
    for v in m.variables:
        is_int = v.kind == BINARY
        if is_int and not in_int:
            out.append(f"    MARKER{marker:04d}  'MARKER'                 'INTORG'")
            in_int = True
        elif not is_int and in_int:
            out.append(f"    MARKER{marker:04d}  'MARKER'                 'INTEND'")
            marker += 1
            in_int = False
        cn = col_name(v.index)
        entries = cols[v.index]
        if not entries:
            # keep the column declared
            out.append(_field_line("", cn, OBJ_ROW, _num(0.0)))
        for p in range(0, len(entries), 2):
            a = entries[p]
            if p + 1 < len(entries):
                b = entries[p + 1]
                out.append(_field_line("", cn, a[0], _num(a[1]), b[0], _num(b[1])))
            else:
                out.append(_field_line("", cn, a[0], _num(a[1])))
    if in_int:
        out.append(f"    MARKER{marker:04d}  'MARKER'                 'INTEND'")

    out.append("RHS")
    for r, con in enumerate(m.constraints):
        if con.rhs != 0.0:
            out.append(_field_line("", "RHS", row_name(r), _num(con.rhs)))

    out.append("BOUNDS")
    for v in m.variables:
        lo, up = (v.lower, v.upper) if bounds is None or v.index not in bounds else bounds[v.index]
        cn = col_name(v.index)
        if v.kind == BINARY:
            lo, up = max(lo, 0.0), min(up, 1.0)
        if lo == up:
            out.append(_field_line("FX", "BND", cn, _num(lo)))
            continue
        if v.kind == BINARY:
            # explicit [0,1] bounds so readers never widen integer columns
            out.append(_field_line("LO", "BND", cn, _num(lo)))
            out.append(_field_line("UP", "BND", cn, _num(up)))
            continue
        if lo == -math.inf and up == math.inf:
            out.append(_field_line("FR", "BND", cn, ""))
            continue
        if lo == -math.inf:
            out.append(_field_line("MI", "BND", cn, ""))
        elif lo != 0.0:
            out.append(_field_line("LO", "BND", cn, _num(lo)))
        if up != math.inf:
            out.append(_field_line("UP", "BND", cn, _num(up)))
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def read_mps(text: str) -> MilpModel:
    """Parse MPS text (as produced by :func:`emit_mps`) into a new model.

    Handles ROWS/COLUMNS/RHS/BOUNDS with integer markers; RANGES is not used by
    this package and is rejected.
    """
    m = MilpModel(name="mps")
    section = None
    row_sense: dict[str, str] = {}
    row_order: list[str] = []
    obj_name = None
    col_terms: dict[str, dict[str, float]] = {}
    col_order: list[str] = []
    col_int: dict[str, bool] = {}
    rhs: dict[str, float] = {}
    bnds: dict[str, list[float]] = {}
    in_int = False
    for raw in text.splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw[0].isspace():
            head = raw.split()[0]
            section = head
            if head == "RANGES":
                raise ValueError("RANGES section not supported")
            continue
        tok = raw.split()
        if section == "ROWS":
            kind, name = tok
            if kind == "N":
                if obj_name is None:
                    obj_name = name
            else:
                row_sense[name] = {"L": "<=", "G": ">=", "E": "=="}[kind]
                row_order.append(name)
        elif section == "COLUMNS":
            if len(tok) >= 3 and tok[1] == "'MARKER'":
                in_int = tok[2] == "'INTORG'"
                continue
            cn = tok[0]
            if cn not in col_terms:
                col_terms[cn] = {}
                col_order.append(cn)
                col_int[cn] = in_int
            for p in range(1, len(tok), 2):
                col_terms[cn][tok[p]] = col_terms[cn].get(tok[p], 0.0) + float(tok[p + 1])
        elif section == "RHS":
            rest = tok[1:] if len(tok) % 2 == 1 else tok
            for p in range(0, len(rest), 2):
                rhs[rest[p]] = float(rest[p + 1])
        elif section == "BOUNDS":
            kind, cn = tok[0], tok[2]
            val = float(tok[3]) if len(tok) > 3 else 0.0
            lo, up = bnds.get(cn, [0.0, math.inf])
            if kind == "LO":
                lo = val
            elif kind == "UP":
                up = val
            elif kind == "FX":
                lo = up = val
            elif kind == "FR":
                lo, up = -math.inf, math.inf
            elif kind == "MI":
                lo = -math.inf
            elif kind == "BV":
                lo, up = 0.0, 1.0
            else:
                raise ValueError(f"unsupported bound type {kind}")
            bnds[cn] = [lo, up]
    vars_by_col = {}
    for cn in col_order:
        lo, up = bnds.get(cn, [0.0, math.inf])
        kind = BINARY if col_int[cn] and lo >= 0.0 and up <= 1.0 else "continuous"
        if col_int[cn] and kind != BINARY:
            raise ValueError(f"general integer column {cn} not supported")
        vars_by_col[cn] = m.add_variable(cn, lo, up, kind)
    rows: dict[str, dict[int, float]] = {r: {} for r in row_order}
    obj_terms: dict[int, float] = {}
    for cn, entries in col_terms.items():
        idx = vars_by_col[cn].index
        for rn, c in entries.items():
            if rn == obj_name:
                obj_terms[idx] = c
            else:
                rows[rn][idx] = c
    for rn in row_order:
        m.add_constraint(Constraint(rows[rn], row_sense[rn], rhs.get(rn, 0.0), rn, m.model_id))
    from .model import LinExpr
    m.set_objective(LinExpr(obj_terms, 0.0, m.model_id))
    return m
