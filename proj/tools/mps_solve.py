#!/usr/bin/env python3
"""MILP solve-from-file backend.

Usage: mps_solve.py MODEL.mps SOLUTION.out [--gap G] [--time-limit T]

Reads a free-format MPS file (N/E/L/G rows, COLUMNS with INTORG/INTEND
markers, RHS, BOUNDS with LO/UP/FX/FR/MI/BV) and solves it with the HiGHS
engine behind scipy.optimize. The solution file holds `status`, `objective`,
`gap`, then one `name value` line per variable.
"""

import argparse
import sys

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

INF = float("inf")


def parse_mps(path):
    section = None
    row_kind = {}
    row_order = []
    obj_row = None
    cols = {}
    col_order = []
    integer = set()
    rhs = {}
    bounds = {}
    in_integer = False
    with open(path) as handle:
        for raw in handle:
            line = raw.rstrip("\n")
            if not line or line.startswith("*"):
                continue
            if not line[0].isspace():
                section = line.split()[0].upper()
                continue
            tok = line.split()
            if section == "ROWS":
                kind, name = tok[0].upper(), tok[1]
                if kind == "N":
                    if obj_row is None:
                        obj_row = name
                else:
                    row_kind[name] = kind
                    row_order.append(name)
            elif section == "COLUMNS":
                if len(tok) >= 3 and tok[1] == "'MARKER'":
                    in_integer = tok[2] == "'INTORG'"
                    continue
                name = tok[0]
                if name not in cols:
                    cols[name] = {}
                    col_order.append(name)
                    if in_integer:
                        integer.add(name)
                for rname, val in zip(tok[1::2], tok[2::2]):
                    cols[name][rname] = cols[name].get(rname, 0.0) + float(val)
            elif section == "RHS":
                for rname, val in zip(tok[1::2], tok[2::2]):
                    rhs[rname] = float(val)
            elif section == "BOUNDS":
                kind = tok[0].upper()
                name = tok[2]
                lo, hi = bounds.get(name, (0.0, INF))
                if kind == "LO":
                    lo = float(tok[3])
                elif kind == "UP":
                    hi = float(tok[3])
                elif kind == "FX":
                    lo = hi = float(tok[3])
                elif kind == "FR":
                    lo, hi = -INF, INF
                elif kind == "MI":
                    lo = -INF
                elif kind == "PL":
                    hi = INF
                elif kind == "BV":
                    lo, hi = 0.0, 1.0
                else:
                    raise ValueError(f"unsupported bound kind {kind}")
                bounds[name] = (lo, hi)
    return {
        "obj_row": obj_row,
        "row_kind": row_kind,
        "row_order": row_order,
        "cols": cols,
        "col_order": col_order,
        "integer": integer,
        "rhs": rhs,
        "bounds": bounds,
    }


def solve(model, gap, time_limit):
    names = model["col_order"]
    n = len(names)
    col_idx = {name: j for j, name in enumerate(names)}
    rows = model["row_order"]
    row_idx = {name: i for i, name in enumerate(rows)}
    m = len(rows)

    c = np.zeros(n)
    data, ri, ci = [], [], []
    for name, entries in model["cols"].items():
        j = col_idx[name]
        for rname, val in entries.items():
            if rname == model["obj_row"]:
                c[j] += val
            else:
                data.append(val)
                ri.append(row_idx[rname])
                ci.append(j)
    a = sparse.csr_matrix((data, (ri, ci)), shape=(m, n))

    lo = np.full(m, -INF)
    hi = np.full(m, INF)
    for name in rows:
        b = model["rhs"].get(name, 0.0)
        kind = model["row_kind"][name]
        i = row_idx[name]
        if kind == "E":
            lo[i] = hi[i] = b
        elif kind == "L":
            hi[i] = b
        elif kind == "G":
            lo[i] = b

    lb = np.zeros(n)
    ub = np.full(n, INF)
    for name, (vlo, vhi) in model["bounds"].items():
        j = col_idx.get(name)
        if j is None:
            continue
        lb[j] = vlo
        ub[j] = vhi
    integrality = np.zeros(n)
    for name in model["integer"]:
        integrality[col_idx[name]] = 1

    options = {"mip_rel_gap": gap}
    if time_limit and time_limit > 0:
        options["time_limit"] = time_limit
    constraints = LinearConstraint(a, lo, hi) if m else ()
    res = milp(
        c,
        constraints=constraints,
        integrality=integrality,
        bounds=Bounds(lb, ub),
        options=options,
    )
    return names, res


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("model")
    ap.add_argument("out")
    ap.add_argument("--gap", type=float, default=1e-6)
    ap.add_argument("--time-limit", type=float, default=0.0)
    args = ap.parse_args()

    model = parse_mps(args.model)
    names, res = solve(model, args.gap, args.time_limit)

    # scipy milp status: 0 optimal, 1 iteration/time limit, 2 infeasible,
    # 3 unbounded, 4 other.
    status_map = {0: "optimal", 1: "limit", 2: "infeasible", 3: "unbounded"}
    status = status_map.get(res.status, "error")
    if status in ("optimal", "limit") and res.x is None:
        status = "error"
    with open(args.out, "w") as handle:
        handle.write(f"status {status}\n")
        if res.x is not None:
            handle.write(f"objective {float(res.fun)!r}\n")
            gap = getattr(res, "mip_gap", 0.0) or 0.0
            handle.write(f"gap {float(gap)!r}\n")
            for name, val in zip(names, res.x):
                handle.write(f"{name} {float(val)!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
