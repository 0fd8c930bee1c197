"""Regenerate src/ptlhen/data/reference_case.json and reference_streams.csv.

Per-stream models are linear between the listed bounds (min at the lower
voltage, max at the upper). Performance datasets are 7-point reconstructions
at the simulated voltages; the fits are done at load time.
"""

import csv
import json
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "ptlhen" / "data"
U_LO, U_HI = 1.275, 1.305

# id, kind, t_in (min, max), t_out (min, max), f (min, max)
STREAMS = [
    ("H1", "hot", (40.0, 40.0), (35.0, 35.0), (1.71, 2.16)),
    ("H2", "hot", (127.9, 131.1), (34.0, 35.0), (0.09, 0.12)),
    ("H3", "hot", (169.8, 174.1), (34.0, 35.0), (0.09, 0.12)),
    ("H4", "hot", (210.0, 210.0), (190.0, 190.0), (0.27, 0.28)),
    ("H5", "hot", (190.0, 190.0), (120.0, 120.0), (0.56, 0.58)),
    ("H6", "hot", (120.0, 120.0), (30.0, 30.0), (0.48, 0.50)),
    ("H7", "hot", (45.4, 57.0), (31.0, 31.0), (2.35, 2.95)),
    ("H8", "hot", (138.9, 138.9), (137.9, 137.9), (59.60, 94.40)),
    ("H9", "hot", (805.2, 825.5), (34.0, 35.0), (0.10, 0.13)),
    ("H10", "hot", (49.5, 50.7), (34.0, 35.0), (0.65, 0.88)),
    ("H11", "hot", (101.8, 101.8), (30.0, 30.0), (0.51, 0.64)),
    ("H12", "hot", (190.0, 190.0), (188.0, 188.0), (76.88, 80.45)),
    ("C1", "cold", (318.0, 319.2), (825.0, 870.5), (0.14, 0.18)),
    ("C2", "cold", (116.9, 116.9), (124.2, 124.2), (20.02, 25.12)),
    ("C3", "cold", (57.3, 58.8), (825.0, 825.0), (0.25, 0.33)),
    ("C4", "cold", (137.9, 137.9), (139.9, 139.9), (105.77, 142.64)),
    ("C5", "cold", (138.9, 138.9), (426.6, 449.4), (0.10, 0.11)),
    ("C6", "cold", (35.0, 35.0), (115.9, 145.4), (0.05, 0.06)),
    ("C7", "cold", (20.3, 20.3), (189.5, 199.6), (0.15, 0.21)),
    ("CS1", "cs", (900.0, 900.0), (100.0, 890.0), (59.60, 94.40)),
    ("CS2", "cs", (900.0, 900.0), (100.0, 890.0), (0.10, 0.13)),
    ("CS3", "cs", (900.0, 900.0), (100.0, 890.0), (0.65, 0.88)),
]

H_BAR = 44.2  # MJ/kg, mass-weighted product heating value


FEED_RMSE = {"H2O": 0.0025, "CO2": 0.0025, "air": 0.0075}


def datasets():
    u = np.linspace(U_LO, U_HI, 7)
    s = (u - U_LO) / (U_HI - U_LO)

    def kinked(a, b, w, wiggle):
        g = np.where(s <= 0.5, w * s / 0.5, w + (1 - w) * (s - 0.5) / 0.5)
        return a + (b - a) * g + np.asarray(wiggle)

    m = 39.26 + 14.30 * s + np.array([0, 0.02, -0.03, 0.01, -0.02, 0.02, 0])
    p = 771.6 + 347.8 * (0.8 * s + 0.2 * s**3)
    feeds = {
        "H2O": kinked(0.14, 0.19, 0.4, [0, 1.2e-4, -1.2e-4, 0, 1.2e-4, -1.2e-4, 0]),
        "CO2": kinked(0.17609, 0.18335, 0.65, [0, 2e-5, -2e-5, 0, -2e-5, 2e-5, 0]),
        "air": kinked(2.0, 2.6, 0.42, [0, 3e-3, -2e-3, 0, 2e-3, -3e-3, 0]),
    }
    h = m * H_BAR / 3.6

    def pts(y, nd):
        return [[round(float(a), 4), round(float(b), nd)] for a, b in zip(u, y)]

    return {
        "p_sys": {"samples": pts(p, 2), "rmse_target": 0.0043},
        "m_prod_total": {"samples": pts(m, 3), "rmse_target": 0.0019},
        "h_dot_prod": {"samples": pts(h, 3), "rmse_target": 0.0019},
        "feed_flows": [{"name": k, "samples": pts(v, 5), "rmse_target": FEED_RMSE[k]} for k, v in feeds.items()],
    }


def param(lo, hi, free=False):
    if lo == hi:
        return {"constant": lo}
    if free:
        return {"free": [lo, hi]}
    return {"pwl": {"breakpoints": [U_LO, U_HI], "values": [lo, hi]}}


def main():
    streams = []
    for sid, kind, t_in, t_out, f in STREAMS:
        cs = kind == "cs"
        streams.append({"id": sid, "kind": kind, "t_in": param(*t_in), "t_out": param(*t_out, free=cs),
                        "f": param(*f, free=cs), "u_coeff": 0.5})
    doc = {
        "name": "ptl-reference",
        "opvar": {"name": "U_cell", "lower": U_LO, "upper": U_HI},
        "streams": streams,
        "utilities": {"hot": {"t_in": 1000.0, "t_out": 999.0, "u_coeff": 0.5},
                      "cold": {"t_in": 15.0, "t_out": 20.0, "u_coeff": 0.5}},
        "products": [
            {"v": 1, "name": "FT-wax", "h_prod": 43.887, "rho_prod": 797.73, "mu_prod": 6.7477},
            {"v": 2, "name": "diesel", "h_prod": 44.345, "rho_prod": 748.81, "mu_prod": 1.5983},
            {"v": 3, "name": "naphtha", "h_prod": 44.676, "rho_prod": 516.17, "mu_prod": 0.5893},
        ],
        "economics": {
            "t_full_load": 8000.0, "af_inv": 0.05, "af_op": 1.0, "c_sys": 1.0e7, "c_el": 20.0,
            "c_feedstock": [{"name": "H2O", "cost": 3.54}, {"name": "CO2", "cost": 50.0},
                            {"name": "air", "cost": 0.0}],
            "c_f_hex": 1013.6, "c_v_hex": 61.8, "beta": 0.8, "eps_hu": 1.05, "eps_cu": 0.05,
        },
        "performance": datasets(),
        "hen_config": {"n_stages": 3, "dt_min": 1.0, "stage_dt_nodes": 2, "cs_grid": [3, 3],
                       "area_planes": 8, "stream_rmse_target": 0.01},
    }
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "reference_case.json").write_text(json.dumps(doc, indent=1) + "\n")
    with open(OUT / "reference_streams.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "kind", "t_in_min", "t_in_max", "t_out_min", "t_out_max", "f_min", "f_max", "u_coeff"])
        for sid, kind, t_in, t_out, f in STREAMS:
            w.writerow([sid, kind, *t_in, *t_out, *f, 0.5])


if __name__ == "__main__":
    main()
