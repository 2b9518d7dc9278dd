#!/usr/bin/env python3
"""Independent high-precision oracle for the 20 dB golden regression values.

Deliberately does not import the package. Gains use the closed-form infinite
Poisson sums of the product-click model, bounds are evaluated at 50 digits
with mpmath, and the exact-COP optimum is cross-checked with scipy's HiGHS.

    python scripts/derive_goldens.py > tests/golden_20db.py
"""
import sys

import mpmath as mp
import numpy as np
from scipy.optimize import linprog

mp.mp.dps = 50

LOSS_DB = 20
PD = mp.mpf("3e-6")
ED = mp.mpf("0.015")
E0 = mp.mpf("0.5")
F_EC = mp.mpf("1.16")
MU1 = mp.mpf("0.1")
K = 60  # 1**61/61! ~ 1e-84, far below the pinned tolerance for mu <= 1

eta_side = mp.sqrt(mp.power(10, -mp.mpf(LOSS_DB) / 10))


def pois(mu, k):
    return mp.exp(-mu) * mp.power(mu, k) / mp.factorial(k)


def click(mu):
    return 1 - (1 - PD) * mp.exp(-mu * eta_side)


def signal(mu):
    return 1 - mp.exp(-mu * eta_side)


def H(e):
    if e <= 0 or e >= 1:
        return mp.mpf(0)
    return -e * mp.log(e, 2) - (1 - e) * mp.log(1 - e, 2)


def greedy(items, weight, gain, budget):
    """Max total gain with sum(weight*x) <= budget, x in [0,1]; items ordered best-first."""
    total = mp.mpf(0)
    for it in items:
        if weight[it] <= budget:
            budget -= weight[it]
            total += gain[it]
        else:
            total += gain[it] * budget / weight[it]
            break
    return total


def three_eq(rows, rhs):
    """s11 from three of the four gain equations, via a 3x3 mp solve."""
    M = mp.matrix([r[:3] for r in rows])
    return mp.lu_solve(M, mp.matrix(rhs))[0]


def pipeline(mu2, lp_check=False):
    """Every pinned quantity for intensities (0, MU1, mu2) on both sides."""
    MU = (mp.mpf(0), MU1, mp.mpf(mu2))
    S = [[click(m) * click(n) for n in MU] for m in MU]
    Q = [[signal(m) * signal(n) for n in MU] for m in MU]
    T = [[ED * Q[i][j] + E0 * (S[i][j] - Q[i][j]) for j in range(3)] for i in range(3)]

    y11 = (1 - (1 - eta_side) * (1 - PD)) ** 2
    q11 = eta_side ** 2
    t11_true = ED * q11 + E0 * (y11 - q11)

    a = [pois(MU[1], k) for k in range(K + 1)]
    A = [pois(MU[2], k) for k in range(K + 1)]
    b, B = a, A

    def tilde(M):
        a0, A0, b0, B0 = a[0], A[0], b[0], B[0]
        xx = M[1][1] - a0 * M[0][1] - b0 * M[1][0] + a0 * b0 * M[0][0]
        xy = M[1][2] - a0 * M[0][2] - B0 * M[1][0] + a0 * B0 * M[0][0]
        yx = M[2][1] - A0 * M[0][1] - b0 * M[2][0] + A0 * b0 * M[0][0]
        yy = M[2][2] - A0 * M[0][2] - B0 * M[2][0] + A0 * B0 * M[0][0]
        return xx, xy, yx, yy

    Sxx, Sxy, Syx, Syy = tilde(S)
    Txx, Txy, Tyx, Tyy = tilde(T)
    a1, a2, A1, A2 = a[1], a[2], A[1], A[2]
    b1, b2, B1, B2 = b[1], b[2], B[1], B[2]
    Da = a1 * A2 - A1 * a2
    Db = b1 * B2 - B1 * b2
    D = Da * Db

    eqs = {
        "xx": ([a1 * b1, a1 * b2, a2 * b1], Sxx),
        "xy": ([a1 * B1, a1 * B2, a2 * B1], Sxy),
        "yx": ([A1 * b1, A1 * b2, A2 * b1], Syx),
        "yy": ([A1 * B1, A1 * B2, A2 * B1], Syy),
    }
    s11 = {}
    for tag, keys in {"123": "xx xy yx", "124": "xx xy yy", "134": "xx yx yy", "234": "xy yx yy"}.items():
        ks = keys.split()
        s11[tag] = three_eq([eqs[k][0] for k in ks], [eqs[k][1] for k in ks])

    s14a = (A1 * B2 * Sxx - a1 * b2 * Syy) / (a1 * A1 * Db)
    s14b = (A2 * B1 * Sxx - a2 * b1 * Syy) / (b1 * B1 * Da)
    s11["14"] = min(s14a, s14b)
    cA = (A1 * B2 - a1 * b2) / (A1 * b2 + a1 * B2)
    cB = (A2 * B1 - a2 * b1) / (A2 * b1 + a2 * B1)
    alpha = min(cA, cB)
    s11["alpha"] = (Sxx - Syy + alpha * (Sxy + Syx)) / (a1 * b1 - A1 * B1 + alpha * (a1 * B1 + A1 * b1))

    # Exact COP: the 4x4 system gives the starred constants.
    M4 = mp.matrix([[a1 * b1, a1 * b2, a2 * b1, a2 * b2],
                    [a1 * B1, a1 * B2, a2 * B1, a2 * B2],
                    [A1 * b1, A1 * b2, A2 * b1, A2 * b2],
                    [A1 * B1, A1 * B2, A2 * B1, A2 * B2]])
    sstar = mp.lu_solve(M4, mp.matrix([Sxx, Sxy, Syx, Syy]))
    tstar = mp.lu_solve(M4, mp.matrix([Txx, Txy, Tyx, Tyy]))

    def ua(m): return a1 * A[m] - A1 * a[m]
    def va(m): return a2 * A[m] - A2 * a[m]
    def ub(n): return b1 * B[n] - B1 * b[n]
    def vb(n): return b2 * B[n] - B2 * b[n]

    cells = [(m, n) for m in range(2, K + 1) for n in range(2, K + 1) if (m, n) != (2, 2)]
    w = {c: ua(c[0]) * ub(c[1]) / D for c in cells}      # -f22
    g = {c: va(c[0]) * vb(c[1]) / D for c in cells}      # -f11
    order = sorted(cells, key=lambda c: -(g[c] / w[c]))
    s11_exact = sstar[0] - greedy(order, w, g, sstar[3])

    row = list(range(3, K + 1))
    w_row = {k: ub(k) / Db for k in row}                  # -f12(1,k)
    g_row = {k: vb(k) / Db for k in row}                  # f11(1,k)
    w_col = {k: ua(k) / Da for k in row}                  # -f21(k,1)
    g_col = {k: va(k) / Da for k in row}                  # f11(k,1)
    t1 = greedy(sorted(row, key=lambda k: -(g_row[k] / w_row[k])), w_row, g_row, max(tstar[1], 0))
    t2 = greedy(sorted(row, key=lambda k: -(g_col[k] / w_col[k])), w_col, g_col, max(tstar[2], 0))
    t11_exact = tstar[0] + t1 + t2

    if lp_check:
        # float cross-check of the exact s11 with an independent LP solver
        Kc = 40
        cf = [(m, n) for m in range(2, Kc + 1) for n in range(2, Kc + 1) if (m, n) != (2, 2)]
        c_obj = np.array([-float(g[c]) for c in cf])
        A_ub = np.array([[float(w[c]) for c in cf]])
        res = linprog(c_obj, A_ub=A_ub, b_ub=[float(sstar[3])], bounds=(0, 1), method="highs")
        lp_value = float(sstar[0]) + res.fun
        assert abs(lp_value - float(s11_exact)) <= 1e-9 * abs(float(s11_exact)), (lp_value, s11_exact)

    cost = S[2][2] * F_EC * H(T[2][2] / S[2][2])

    def rate(s, e):
        gain = A1 * B1 * s * (1 - H(e)) if e < mp.mpf("0.5") else 0
        return gain - cost

    def e_simple(s):
        return Txx / (a1 * b1 * s)

    R = {name: rate(s11[name], e_simple(s11[name])) for name in ("123", "124", "134", "234", "14", "alpha")}
    R["exact"] = rate(s11_exact, t11_exact / s11_exact)
    R["asymptotic"] = rate(y11, t11_true / y11)
    return dict(
        S=S, T=T, y11=y11, t11_true=t11_true, tilde_s=(Sxx, Sxy, Syx, Syy), tilde_t=(Txx, Txy, Tyx, Tyy),
        sstar=sstar, tstar=tstar, s11=s11, s11_exact=s11_exact, t11_exact=t11_exact,
        e11_simple=e_simple(s11["123"]), e11_exact=t11_exact / s11_exact, R=R,
    )


def optimum(curves, method):
    """Grid argmax with ties toward the smaller intensity."""
    best = None
    for mu2, R in curves:
        if best is None or R[method] > best[1]:
            best = (mu2, R[method])
    return best


def f(x):
    return repr(float(x))


def main():
    p = pipeline("0.5", lp_check=True)
    grid = [f"{k / 100:.2f}" for k in range(11, 101)]
    curves = [(g, pipeline(g)["R"]) for g in grid]
    opt_methods = ("exact", "123", "14", "alpha", "asymptotic")

    out = sys.stdout
    out.write('"""Frozen 20 dB golden values from scripts/derive_goldens.py (mpmath, 50 digits)."""\n\n')
    out.write("S = [\n" + "".join("    [" + ", ".join(f(v) for v in r) + "],\n" for r in p["S"]) + "]\n")
    out.write("T = [\n" + "".join("    [" + ", ".join(f(v) for v in r) + "],\n" for r in p["T"]) + "]\n")
    out.write(f"Y11 = {f(p['y11'])}\nT11 = {f(p['t11_true'])}\nE11_TRUE = {f(p['t11_true'] / p['y11'])}\n")
    out.write("S_TILDE = (" + ", ".join(f(v) for v in p["tilde_s"]) + ")\n")
    out.write("T_TILDE = (" + ", ".join(f(v) for v in p["tilde_t"]) + ")\n")
    out.write("S_STAR = (" + ", ".join(f(v) for v in p["sstar"]) + ")\n")
    out.write("T_STAR = (" + ", ".join(f(v) for v in p["tstar"]) + ")\n")
    out.write("S11 = {\n" + "".join(f'    "{k}": {f(v)},\n' for k, v in p["s11"].items()) + "}\n")
    out.write(f"S11_EXACT = {f(p['s11_exact'])}\nT11_EXACT = {f(p['t11_exact'])}\n")
    out.write(f"E11_SIMPLE = {f(p['e11_simple'])}\nE11_EXACT = {f(p['e11_exact'])}\n")
    out.write("R = {\n" + "".join(f'    "{k}": {f(v)},\n' for k, v in p["R"].items()) + "}\n")
    out.write("# signal intensity grid 0.11..1.00 step 0.01, decoy fixed at 0.1: (mu2_opt, R_opt)\n")
    out.write("OPT = {\n")
    for m in opt_methods:
        mu2, r = optimum(curves, m)
        out.write(f'    "{m}": ({mu2}, {f(r)}),\n')
    out.write("}\n")


if __name__ == "__main__":
    main()
