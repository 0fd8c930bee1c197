"""Text artifacts: Pareto CSV, solver-time table, DOT stream plots, summaries."""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Sequence

from .case_data import CS, HOT, CaseDefinition
from .superstructure import HenDesign

PARETO_COLUMNS = [
    "window", "status", "eta_pct", "c_prod_eur_per_kg", "u_V", "n_hex", "sum_q_cu_kW", "sum_q_hu_kW",
    "sum_q_match_kW", "mip_gap", "solve_s", "eta_exact_pct", "c_prod_exact_eur_per_kg", "nondominated",
]


def _fmt(v: float, nd: int = 6) -> str:
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else f"{v + 0.0:.{nd}g}"


def pareto_csv(points: Sequence, nondominated: Iterable = ()) -> str:
    """One row per accepted point; eta in %, c_prod in EUR/kg, u in V."""
    nd = {id(p) for p in nondominated}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PARETO_COLUMNS)
    for p in points:
        if p.design is None:
            continue
        d = p.design
        w.writerow([p.window_index, p.status, _fmt(100 * p.eta), _fmt(p.c_prod), _fmt(p.u, 8), d.hex_count,
                    _fmt(d.sum_q_cu), _fmt(d.sum_q_hu), _fmt(d.sum_q_match), _fmt(p.mip_gap, 4),
                    _fmt(p.solve_seconds, 4), _fmt(100 * p.exact.get("eta", math.nan)),
                    _fmt(p.exact.get("c_prod", math.nan)), int(id(p) in nd)])
    return buf.getvalue()


def solver_time_report(points: Sequence) -> str:
    """Per-point solve seconds and a mean row over accepted points (CSV)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["window", "status", "solve_s", "mip_gap", "note"])
    solved = []
    for p in points:
        note = "" if p.design is not None else f"skipped: {p.status}"
        w.writerow([p.window_index, p.status, _fmt(p.solve_seconds, 6), _fmt(p.mip_gap, 4), note])
        if p.design is not None:
            solved.append(p.solve_seconds)
    if solved:
        mean = sum(solved) / len(solved)
        w.writerow(["mean", f"{len(solved)} solved", _fmt(mean, 6), "", f"total {_fmt(sum(solved), 6)} s"])
    else:
        w.writerow(["mean", "0 solved", "", "", "no solved points"])
    return buf.getvalue()


def _q(s: str) -> str:
    return '"' + s.replace('"', r"\"") + '"'


def export_stream_plot(d: HenDesign, c: CaseDefinition | None = None) -> str:
    """DOT graph with one lane per stream (hot side first) and a node per exchanger."""
    ids = list(d.temperatures) if c is None else [s.id for s in c.hot_side + c.cold]
    kinds = {} if c is None else {s.id: s.kind for s in c.streams}
    if c is None:
        # infer order: streams that appear as hot in matches first
        hot_ids = {m.hot for m in d.matches} | {u.stream for u in d.utilities if u.kind == "cu"} | set(d.cs_settings)
        ids = [i for i in ids if i in hot_ids] + [i for i in ids if i not in hot_ids]
        kinds = {i: (CS if i in d.cs_settings else HOT if i in hot_ids else "cold") for i in ids}
    lines = ["digraph hen {", "  rankdir=LR;", "  node [fontsize=10];"]
    stages = 1 + max([m.stage for m in d.matches], default=0)
    for n, m in enumerate(sorted(d.matches, key=lambda r: (r.stage, r.hot, r.cold)), start=1):
        label = f"E{n} s{m.stage + 1}\\n{m.duty:.2f} kW\\n{m.area:.2f} m2"
        lines.append(f"  {_q(_mid(m.hot, m.cold, m.stage))} [shape=circle, label={_q(label)}];")
    for u in d.utilities:
        label = f"{u.kind.upper()}\\n{u.duty:.2f} kW\\n{u.area:.2f} m2"
        color = "blue" if u.kind == "cu" else "red"
        lines.append(f"  {_q(u.kind + '_' + u.stream)} [shape=doublecircle, color={color}, label={_q(label)}];")
    for sid in ids:
        kind = kinds.get(sid, "")
        temps = d.temperatures.get(sid, ())
        color = "blue" if kind == "cold" else "red"
        head = sid
        if kind == CS and sid in d.cs_settings:
            t_out, f = d.cs_settings[sid]
            head += f"\\nt_out={t_out:.1f} C\\nF={f:.3f} kW/K"
        if temps:
            t_in = temps[-1] if kind == "cold" else temps[0]
            head += f"\\nin {t_in:.1f} C"
        lines.append(f"  subgraph {_q('cluster_' + sid)} {{")
        lines.append(f"    label={_q(sid)}; color={color};")
        lines.append(f"    {_q(sid + '_in')} [shape=box, label={_q(head)}];")
        lines.append(f"    {_q(sid + '_out')} [shape=box, label={_q(sid + ' out')}];")
        lines.append("  }")
        chain = [sid + "_in"]
        own = [m for m in d.matches if sid in (m.hot, m.cold)]
        order = range(stages) if kind != "cold" else reversed(range(stages))
        for k in order:
            chain += [_mid(m.hot, m.cold, m.stage) for m in sorted(own, key=lambda r: (r.hot, r.cold))
                      if m.stage == k]
        chain += [u.kind + "_" + sid for u in d.utilities if u.stream == sid]
        chain.append(sid + "_out")
        for a, b in zip(chain, chain[1:]):
            lines.append(f"  {_q(a)} -> {_q(b)} [color={color}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _mid(h: str, c: str, k: int) -> str:
    return f"m_{h}_{c}_{k}"


def design_table(d: HenDesign) -> str:
    """Headline figures of one design."""
    return (f"u = {d.u:.5f} V\n"
            f"n_HEX = {d.hex_count}\n"
            f"sum q_cu = {d.sum_q_cu:.2f} kW\n"
            f"sum q_hu = {d.sum_q_hu:.2f} kW\n"
            f"sum q_ijk = {d.sum_q_match:.2f} kW\n")


def summary_text(points: Sequence, front: Sequence, case: CaseDefinition, header: str = "") -> str:
    acc = [p for p in points if p.design is not None]
    out = [header] if header else []
    out.append(f"case: {case.name}")
    out.append(f"points solved: {len(acc)} of {len(points)}; non-dominated: {len(front)}")
    if acc:
        cheap = min(acc, key=lambda p: p.c_prod)
        best = max(acc, key=lambda p: p.eta)
        for tag, p in (("minimum production cost", cheap), ("maximum efficiency", best)):
            e = p.exact
            out.append(f"\n[{tag}]")
            out.append(f"eta = {100 * p.eta:.3f} % (exact {100 * e.get('eta', math.nan):.3f} %)")
            out.append(f"c_prod = {p.c_prod:.4f} EUR/kg (exact {e.get('c_prod', math.nan):.4f} EUR/kg)")
            out.append(design_table(p.design).rstrip())
            if e:
                out.append(f"TAC = {e['tac']:.0f} EUR/yr; CAPEX_sys = {e['capex_sys']:.0f}; "
                           f"CAPEX_HEN = {e['capex_hen']:.0f}; OPEX = {e['opex']:.0f}")
            out.append(f"mip gap = {p.mip_gap:.4f}; solve time = {p.solve_seconds:.1f} s")
    return "\n".join(out) + "\n"


__all__ = ["pareto_csv", "solver_time_report", "export_stream_plot", "design_table", "summary_text",
           "PARETO_COLUMNS"]
