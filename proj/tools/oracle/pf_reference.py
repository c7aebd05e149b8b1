#!/usr/bin/env python3
"""Independent Newton-Raphson power-flow reference for the bundled 118-bus case.

Produces tests/fixtures/case118_pf_reference.csv (bus, vm, va_rad), the fixture
the C++ solver is checked against. Kept deliberately independent of the C++
implementation: dense numpy algebra, textbook polar-form Jacobian, no shared
code. Conventions match the solver contract:

  * flat start: va = 0 everywhere, vm = 1 for PQ buses, generator voltage
    setpoints at PV and slack buses
  * slack angle pinned at exactly 0 rad
  * reactive limits not enforced (the base case is solved as typed)
  * convergence on max |mismatch| < 1e-10 p.u. (tighter than the solver's
    1e-8 so the fixture is accurate to well below the comparison tolerance)

Run from the repository root:  python3 tools/oracle/pf_reference.py
"""

import csv
import math
import os
import re
import sys

import numpy as np

ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
CASE = os.path.join(ROOT, "data", "case118.m")
OUT = os.path.join(ROOT, "tests", "fixtures", "case118_pf_reference.csv")


def parse_matpower(path):
    """Minimal parser for the matrix blocks of a MATPOWER-format case file."""
    blocks = {}
    base_mva = None
    current = None
    with open(path) as f:
        for raw in f:
            line = raw.split("%", 1)[0].strip()
            if not line:
                continue
            m = re.match(r"mpc\.baseMVA\s*=\s*([0-9.eE+-]+)\s*;", line)
            if m:
                base_mva = float(m.group(1))
                continue
            m = re.match(r"mpc\.(\w+)\s*=\s*\[", line)
            if m:
                current = m.group(1)
                blocks[current] = []
                line = line[m.end():]
            if current is None:
                continue
            if "]" in line:
                line = line.split("]", 1)[0]
                row = line.replace(";", " ").split()
                if row:
                    blocks[current].append([float(v) for v in row])
                current = None
                continue
            for chunk in line.split(";"):
                row = chunk.split()
                if row:
                    blocks[current].append([float(v) for v in row])
    return base_mva, {k: np.array(v) for k, v in blocks.items() if v}


def build_ybus(n, bus_idx, branch, bus, base_mva):
    y = np.zeros((n, n), dtype=complex)
    for row in branch:
        if int(row[10]) != 1:
            continue
        f = bus_idx[int(row[0])]
        t = bus_idx[int(row[1])]
        ys = 1.0 / complex(row[2], row[3])
        ysh = complex(0.0, row[4] / 2.0)
        ratio = row[8] if row[8] != 0.0 else 1.0
        tap = ratio * np.exp(1j * math.radians(row[9]))
        y[f, f] += (ys + ysh) / (tap * np.conj(tap))
        y[f, t] += -ys / np.conj(tap)
        y[t, f] += -ys / tap
        y[t, t] += ys + ysh
    for i, row in enumerate(bus):
        y[i, i] += complex(row[4], row[5]) / base_mva
    return y


def solve(bus, gen, ybus, base_mva, tol=1e-10, max_iter=40):
    n = bus.shape[0]
    types = bus[:, 1].astype(int)
    slack = int(np.where(types == 3)[0][0])

    pd = bus[:, 2] / base_mva
    qd = bus[:, 3] / base_mva
    pg = np.zeros(n)
    qg = np.zeros(n)
    vset = np.full(n, np.nan)
    bus_idx = {int(b[0]): i for i, b in enumerate(bus)}
    for row in gen:
        if int(row[7]) != 1:
            continue
        i = bus_idx[int(row[0])]
        pg[i] += row[1] / base_mva
        qg[i] += row[2] / base_mva
        vset[i] = row[5]
    sbus = (pg - pd) + 1j * (qg - qd)

    vm = np.ones(n)
    va = np.zeros(n)
    has_gen = ~np.isnan(vset)
    controlled = has_gen & ((types == 2) | (types == 3))
    vm[controlled] = vset[controlled]

    pvpq = [i for i in range(n) if i != slack]
    pq = [i for i in range(n) if types[i] == 1]

    for iteration in range(max_iter):
        v = vm * np.exp(1j * va)
        ibus = ybus @ v
        s = v * np.conj(ibus)
        mis = s - sbus
        f = np.concatenate([mis[pvpq].real, mis[pq].imag])
        maxm = np.abs(f).max()
        if maxm < tol:
            return vm, va, iteration, maxm
        diag_v = np.diag(v)
        diag_i = np.diag(ibus)
        diag_vn = np.diag(v / vm)
        ds_dva = 1j * diag_v @ np.conj(diag_i - ybus @ diag_v)
        ds_dvm = diag_v @ np.conj(ybus @ diag_vn) + np.conj(diag_i) @ diag_vn
        j11 = ds_dva[np.ix_(pvpq, pvpq)].real
        j12 = ds_dvm[np.ix_(pvpq, pq)].real
        j21 = ds_dva[np.ix_(pq, pvpq)].imag
        j22 = ds_dvm[np.ix_(pq, pq)].imag
        jac = np.block([[j11, j12], [j21, j22]])
        dx = np.linalg.solve(jac, -f)
        va[pvpq] += dx[: len(pvpq)]
        vm[pq] += dx[len(pvpq):]
    raise RuntimeError(f"did not converge: mismatch {maxm:g} after {max_iter} iterations")


def main():
    base_mva, blocks = parse_matpower(CASE)
    bus = blocks["bus"]
    gen = blocks["gen"]
    branch = blocks["branch"]
    n = bus.shape[0]
    bus_idx = {int(b[0]): i for i, b in enumerate(bus)}
    ybus = build_ybus(n, bus_idx, branch, bus, base_mva)

    vm, va, iters, maxm = solve(bus, gen, ybus, base_mva)
    print(f"converged in {iters} Newton steps, final mismatch {maxm:.3e} p.u.")
    print(f"|V| range: [{vm.min():.4f}, {vm.max():.4f}] p.u.")
    dev = np.abs(vm - bus[:, 7])
    print(f"max |V| deviation from the case-file voltage column: {dev.max():.4f} "
          f"at bus {int(bus[int(dev.argmax()), 0])}")

    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["bus", "vm", "va_rad"])
        for i in range(n):
            w.writerow([int(bus[i, 0]), f"{vm[i]:.12f}", f"{va[i]:.12f}"])
    print(f"wrote {os.path.relpath(OUT, ROOT)}")


if __name__ == "__main__":
    sys.exit(main())
