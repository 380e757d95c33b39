"""JSON and CSV emission.

Floats are written with 17 significant digits so every double survives a
dump/load cycle unchanged. Non-finite values are written as the strings
``"inf"``, ``"-inf"`` and ``"nan"``.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .construction import Construction, ConstructionConfig, node_path
from .norms import format_norm, parse_norm

SOLVE_CSV_COLUMNS = ("level", "m", "optimal_value", "uniqueness_gap", "n_ties", "area_in")


def fmt_float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = fmt_float(obj)
        return s if math.isfinite(obj) else json.dumps(s)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        # short rows of scalars stay on one line
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent=1):
    return _encode(obj, indent, 0) + "\n"


def _decode_float(x):
    if x is None:
        return math.nan
    if isinstance(x, str):
        return float(x)
    return float(x)


# --- constructions ---------------------------------------------------------


def construction_to_dict(c):
    cfg = c.config
    config = {
        "norm": format_norm(cfg.norm),
        "alpha0": cfg.alpha0,
        "theta_center": cfg.theta_center,
        "depth": cfg.depth,
        "mode": cfg.mode,
    }
    if cfg.rho is not None:
        config["rho"] = cfg.rho
    config["tol"] = cfg.tol
    nodes = []
    for i in range(c.n_nodes):
        leaf = math.isnan(c.alpha[i])
        nodes.append(
            {
                "path": node_path(i),
                "arc_start": float(c.start[i]),
                "arc_width": float(c.width[i]),
                "child_alpha": None if leaf else float(c.alpha[i]),
                "h_self": None if leaf else float(c.h[i]),
            }
        )
    return {"config": config, "nodes": nodes}


def construction_from_dict(d):
    cfg = d["config"]
    config = ConstructionConfig(
        norm=parse_norm(cfg["norm"]),
        alpha0=float(cfg["alpha0"]),
        theta_center=float(cfg["theta_center"]),
        depth=int(cfg["depth"]),
        mode=cfg["mode"],
        rho=None if cfg.get("rho") is None else float(cfg["rho"]),
        tol=float(cfg["tol"]),
    )
    nodes = d["nodes"]
    if len(nodes) != 2 ** (config.depth + 1) - 1:
        raise ValueError("node count does not match depth")
    for i, nd in enumerate(nodes):
        if nd["path"] != node_path(i):
            raise ValueError(f"node {i} has path {nd['path']!r}, expected {node_path(i)!r}")
    return Construction(
        config,
        np.array([_decode_float(n["arc_start"]) for n in nodes]),
        np.array([_decode_float(n["arc_width"]) for n in nodes]),
        np.array([_decode_float(n["child_alpha"]) for n in nodes]),
        np.array([_decode_float(n["h_self"]) for n in nodes]),
    )


def dump_construction(c):
    return dumps(construction_to_dict(c))


def load_construction(text):
    return construction_from_dict(json.loads(text))


# --- CSV -------------------------------------------------------------------


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def rows_to_csv(rows, columns=None):
    """CSV text for a list of dict rows; ``columns`` fixes the column order."""
    if not rows:
        return ",".join(columns or ()) + "\n"
    columns = list(columns or rows[0].keys())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(k, "")) for k in columns])
    return buf.getvalue()


def solve_reports_to_csv(rows):
    """Solver summary with the fixed column order level, m, optimal_value, uniqueness_gap, n_ties, area_in."""
    return rows_to_csv(rows, SOLVE_CSV_COLUMNS)


def report_to_json(report):
    return dumps(report.to_dict())


def report_summary_csv(report):
    """One row per verdict and margin of an experiment report."""
    rows = [
        {"experiment": report.name, "key": k, "kind": "verdict", "value": "inconclusive" if v is None else v}
        for k, v in report.verdicts.items()
    ]
    for k, v in report.margins.items():
        if isinstance(v, (list, tuple)):
            v = " ".join(_cell(x) for x in v)
        rows.append({"experiment": report.name, "key": k, "kind": "margin", "value": v})
    return rows_to_csv(rows, ("experiment", "kind", "key", "value"))
