"""Exact minimum of s11 and exact maximum of t11 under the four gain equations.

Solving the four reduced-gain equations for (s11, s12, s21, s22) leaves s11
and s22 as affine functions of the unobserved yields s_mn, m, n >= 2. With
    f22(m, n) = -u_a(m) u_b(n) / D,   f11(m, n) = -v_a(m) v_b(n) / D,
    u_x(k) = x_1 x'_k - x'_1 x_k,     v_x(k) = x_2 x'_k - x'_2 x_k,
minimizing s11 subject to s22 >= 0 and 0 <= s_mn <= 1 is a fractional
knapsack: every cell costs -f22 >= 0 of the budget s22*, buys -f11 >= 0 of
reduction in s11, and the benefit/cost ratio h_a(m) h_b(n), h_x = v_x/u_x,
is non-decreasing in both indices. Cells are saturated in non-increasing
ratio order until the budget runs out; the last one is fractional.

Photon numbers beyond the source truncation are handled as whole blocks
(one per row, one per column, one corner) whose cost is known exactly from
the tail masses. Their ratios are not, so a block is given the supremum
ratio h_x <= x_2/x_1 of every cell it contains. That is a relaxation:
s11 can only come out lower, t11 only higher, so the bounds stay certified.
For Poisson sources at the default truncation the difference is far below
double precision.

The t11 problem splits into two independent one-dimensional knapsacks over
t_1k (budget t12*) and t_k1 (budget t21*), ratios h_b(k) and h_a(k).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .bounds_analytic import pair_terms, s11_123
from .errors import UndefinedErrorBound
from .sources import ThreeIntensitySource
from .statistics import ReducedGains

log = logging.getLogger(__name__)

SIGN_TOL = 1e-12


class Cell(NamedTuple):
    """A knapsack item. For tail blocks the out-of-range index is ``k_max + 1``."""

    m: int
    n: int
    kind: str = "cell"  # cell | row_tail (n > k_max) | col_tail (m > k_max) | corner


@dataclass(frozen=True, eq=False)
class CopCoefficients:
    s_star: tuple[float, float, float, float]  # s11*, s12*, s21*, s22*
    t_star: tuple[float, float, float, float]
    u_a: np.ndarray
    v_a: np.ndarray
    u_b: np.ndarray
    v_b: np.ndarray
    u_a_tail: float  # sum over m > k_max
    v_a_tail: float
    u_b_tail: float
    v_b_tail: float
    da: float
    db: float
    alice: ThreeIntensitySource
    bob: ThreeIntensitySource
    rg: ReducedGains

    @property
    def k_max(self) -> int:
        return len(self.u_a) - 1

    @property
    def d(self) -> float:
        return self.da * self.db

    s11_star = property(lambda self: self.s_star[0])
    s12_star = property(lambda self: self.s_star[1])
    s21_star = property(lambda self: self.s_star[2])
    s22_star = property(lambda self: self.s_star[3])
    t11_star = property(lambda self: self.t_star[0])
    t12_star = property(lambda self: self.t_star[1])
    t21_star = property(lambda self: self.t_star[2])
    t22_star = property(lambda self: self.t_star[3])

    def _check(self, *ks):
        for k in ks:
            if not 0 <= k <= self.k_max:
                raise ValueError(f"photon number {k} outside the truncation 0..{self.k_max}")

    def f11(self, m: int, n: int) -> float:
        self._check(m, n)
        return -self.v_a[m] * self.v_b[n] / self.d

    def f12(self, m: int, n: int) -> float:
        self._check(m, n)
        return self.v_a[m] * self.u_b[n] / self.d

    def f21(self, m: int, n: int) -> float:
        self._check(m, n)
        return self.u_a[m] * self.v_b[n] / self.d

    def f22(self, m: int, n: int) -> float:
        self._check(m, n)
        return -self.u_a[m] * self.u_b[n] / self.d

    def h_a(self, m: int) -> float:
        self._check(m)
        return _ratio(self.v_a[m], self.u_a[m])

    def h_b(self, n: int) -> float:
        self._check(n)
        return _ratio(self.v_b[n], self.u_b[n])

    @property
    def h_a_hat(self) -> float:
        """Supremum of h_a, x_2/x_1; it is the limit whenever x'_k/x_k diverges (Poisson)."""
        return self.alice.decoy_x[2] / self.alice.decoy_x[1]

    @property
    def h_b_hat(self) -> float:
        return self.bob.decoy_x[2] / self.bob.decoy_x[1]

    def u_a_from(self, m0: int) -> float:
        """sum_{m >= m0} u_a(m), via the tail masses."""
        a, ap = self.alice.decoy_x, self.alice.signal_y
        return a[1] * ap.bar(m0) - ap[1] * a.bar(m0)

    def u_b_from(self, n0: int) -> float:
        b, bp = self.bob.decoy_x, self.bob.signal_y
        return b[1] * bp.bar(n0) - bp[1] * b.bar(n0)

    def F_c(self, m0: int, n0: int) -> float:
        """sum_{m >= m0} f22(m, n0)."""
        self._check(n0)
        return -self.u_a_from(m0) * self.u_b[n0] / self.d

    def F_r(self, m0: int, n0: int) -> float:
        """sum_{n >= n0} f22(m0, n)."""
        self._check(m0)
        return -self.u_a[m0] * self.u_b_from(n0) / self.d

    def invariants_hold(self) -> bool:
        """Sign structure that makes both problems knapsacks, within the truncation."""
        K = self.k_max
        ok = True
        for u, v, ut, vt in ((self.u_a, self.v_a, self.u_a_tail, self.v_a_tail),
                             (self.u_b, self.v_b, self.u_b_tail, self.v_b_tail)):
            scale = max(float(np.max(np.abs(u[: K + 1]))), 1e-300)
            ok &= bool(np.all(u[2:] >= -SIGN_TOL * scale) and np.all(v[2:] >= -SIGN_TOL * scale))
            ok &= ut >= -SIGN_TOL * scale and vt >= -SIGN_TOL * scale
        return ok


def _ratio(v: float, u: float) -> float:
    if u > 0:
        return v / u
    return np.inf if v > 0 else 0.0


def cop_coefficients(rg: ReducedGains, alice: ThreeIntensitySource, bob: ThreeIntensitySource) -> CopCoefficients:
    a1, a2, A1, A2, b1, b2, B1, B2, da, db = pair_terms(alice, bob)
    D = da * db

    def solve(xx, xy, yx, yy):
        return (
            (A2 * B2 * xx - A2 * b2 * xy - a2 * B2 * yx + a2 * b2 * yy) / D,
            (-A2 * B1 * xx + A2 * b1 * xy + a2 * B1 * yx - a2 * b1 * yy) / D,
            (-A1 * B2 * xx + A1 * b2 * xy + a1 * B2 * yx - a1 * b2 * yy) / D,
            (A1 * B1 * xx - A1 * b1 * xy - a1 * B1 * yx + a1 * b1 * yy) / D,
        )

    K = min(alice.k_max, bob.k_max)

    def uv(src):
        x, xp = src.decoy_x, src.signal_y
        p = np.array([x[k] for k in range(K + 1)])
        pp = np.array([xp[k] for k in range(K + 1)])
        u = x[1] * pp - xp[1] * p
        v = x[2] * pp - xp[2] * p
        tail_x, tail_xp = x.bar(K + 1), xp.bar(K + 1)
        return u, v, x[1] * tail_xp - xp[1] * tail_x, x[2] * tail_xp - xp[2] * tail_x

    u_a, v_a, ua_t, va_t = uv(alice)
    u_b, v_b, ub_t, vb_t = uv(bob)
    for arr in (u_a, v_a, u_b, v_b):
        arr.setflags(write=False)
    return CopCoefficients(
        solve(*rg.s), solve(*rg.t), u_a, v_a, u_b, v_b, ua_t, va_t, ub_t, vb_t, da, db, alice, bob, rg
    )


@dataclass(frozen=True, eq=False)
class KnapsackSolution:
    """Saturation pattern of a solved knapsack.

    ``x[i]`` is the value assigned to ``items[i]``: 1 for J_U, 0 for J_L and
    ``s_L`` for the single fractional item, if any.
    """

    objective_bound: float
    items: tuple[Cell, ...]
    ratio: np.ndarray
    weight: np.ndarray
    x: np.ndarray
    budget: float
    residual: float
    infeasible: bool = False
    fallback: str | None = None
    meta: dict = field(default_factory=dict)

    @property
    def fractional_index(self) -> int | None:
        idx = np.flatnonzero((self.x > 0) & (self.x < 1))
        return int(idx[0]) if idx.size else None

    @property
    def fractional_cell(self) -> Cell | None:
        i = self.fractional_index
        return None if i is None else self.items[i]

    @property
    def s_L(self) -> float | None:
        i = self.fractional_index
        return None if i is None else float(self.x[i])

    @property
    def saturated(self) -> tuple[Cell, ...]:
        return tuple(c for c, xi in zip(self.items, self.x) if xi == 1)

    @property
    def excluded(self) -> tuple[Cell, ...]:
        return tuple(c for c, xi in zip(self.items, self.x) if xi == 0)

    def ordering_holds(self, tol: float = 1e-12) -> bool:
        """Every excluded ratio <= fractional ratio <= every saturated ratio."""
        sat = self.ratio[self.x == 1]
        exc = self.ratio[self.x == 0]
        mid = self.ratio[(self.x > 0) & (self.x < 1)]
        lo = max([exc.max()] if exc.size else [-np.inf])
        hi = min([sat.min()] if sat.size else [np.inf])
        if mid.size:
            return lo <= mid[0] + tol and mid[0] <= hi + tol
        return lo <= hi + tol

    def to_dict(self) -> dict:
        frac = self.fractional_cell
        return {
            "objective_bound": self.objective_bound,
            "budget": self.budget,
            "residual": self.residual,
            "infeasible": self.infeasible,
            "fallback": self.fallback,
            "fractional_cell": list(frac) if frac else None,
            "s_L": self.s_L,
            "saturated": [list(c) for c in self.saturated],
            "excluded": [list(c) for c in self.excluded],
        }


def _order(ratio: np.ndarray, keys: np.ndarray, tie_break) -> np.ndarray:
    """Non-increasing ratio; ties by (m, n) ascending unless told otherwise."""
    if tie_break == "lex":
        return np.lexsort((keys[:, 1], keys[:, 0], -ratio))
    if tie_break == "revlex":
        return np.lexsort((-keys[:, 1], -keys[:, 0], -ratio))
    if tie_break == "colex":
        return np.lexsort((keys[:, 0], keys[:, 1], -ratio))
    if isinstance(tie_break, np.random.Generator):
        return np.lexsort((tie_break.permutation(len(ratio)), -ratio))
    raise ValueError(f"unknown tie_break {tie_break!r}")


def _knapsack(weight, ratio, keys, budget, tie_break="lex"):
    """Fill ``budget`` greedily in ratio order. Returns (x, budget_used, infeasible)."""
    x = np.zeros(len(weight))
    infeasible = budget < 0
    budget = max(budget, 0.0)
    free = weight <= 0
    x[free & (ratio > 0)] = 1.0
    order = _order(ratio, keys, tie_break)
    order = order[~free[order]]
    cum = np.cumsum(weight[order])
    full = int(np.searchsorted(cum, budget, side="right"))
    x[order[:full]] = 1.0
    used = cum[full - 1] if full else 0.0
    if full < len(order):
        j = order[full]
        x[j] = (budget - used) / weight[j]
        used = used + x[j] * weight[j]
    return x, budget - used, infeasible


def _tail_blocks_2d(c: CopCoefficients, K: int):
    cells, w, r = [], [], []
    cap_a, cap_b = c.h_a_hat, c.h_b_hat
    for m in range(2, K + 1):
        cells.append(Cell(m, K + 1, "row_tail"))
        w.append(c.u_a[m] * c.u_b_tail / c.d)
        r.append(c.h_a(m) * cap_b)
    for n in range(2, K + 1):
        cells.append(Cell(K + 1, n, "col_tail"))
        w.append(c.u_a_tail * c.u_b[n] / c.d)
        r.append(cap_a * c.h_b(n))
    cells.append(Cell(K + 1, K + 1, "corner"))
    w.append(c.u_a_tail * c.u_b_tail / c.d)
    r.append(cap_a * cap_b)
    return cells, np.array(w), np.array(r)


def s11_items(c: CopCoefficients, k_max: int | None = None, tails: bool = True):
    """Knapsack items (cells, cost -f22, ratio, benefit -f11) of the s11 problem."""
    K = c.k_max if k_max is None else k_max
    if K > c.k_max:
        raise ValueError(f"k_max {K} exceeds the source truncation {c.k_max}")
    tails = tails and K == c.k_max
    idx = np.arange(2, K + 1)
    m, n = np.meshgrid(idx, idx, indexing="ij")
    keep = ~((m == 2) & (n == 2))
    m, n = m[keep], n[keep]
    weight = c.u_a[m] * c.u_b[n] / c.d
    gain = c.v_a[m] * c.v_b[n] / c.d
    h_a = np.array([c.h_a(k) if k >= 2 else 0.0 for k in range(K + 1)])
    h_b = np.array([c.h_b(k) if k >= 2 else 0.0 for k in range(K + 1)])
    ratio = h_a[m] * h_b[n]
    cells = [Cell(int(i), int(j)) for i, j in zip(m, n)]
    if tails:
        tc, tw, tr = _tail_blocks_2d(c, K)
        live = tw > 0
        cells += [cl for cl, keep_it in zip(tc, live) if keep_it]
        weight = np.concatenate([weight, tw[live]])
        ratio = np.concatenate([ratio, tr[live]])
        gain = np.concatenate([gain, tr[live] * tw[live]])
    return cells, weight, ratio, gain


def s11_exact_min(c: CopCoefficients, *, k_max: int | None = None, tails: bool = True, tie_break="lex"):
    """Minimum of s11 over the unobserved yields. Returns ``(bound, solution)``.

    ``bound`` is clamped to [0, 1]; the raw optimum is ``solution.objective_bound``.
    With ``tails=False`` (or a ``k_max`` below the truncation) the problem is
    restricted to the finite grid, which is what the brute-force oracle solves.
    """
    if not c.invariants_hold():
        fb = s11_123(c.rg, c.alice, c.bob)
        log.warning("coefficient sign structure violated; falling back to the (123) bound")
        sol = KnapsackSolution(fb.raw, (), np.zeros(0), np.zeros(0), np.zeros(0), c.s22_star, 0.0,
                               fallback="B123")
        return fb.value, sol
    cells, weight, ratio, gain = s11_items(c, k_max, tails)
    keys = np.array([(cl.m, cl.n) for cl in cells])
    x, residual, infeasible = _knapsack(weight, ratio, keys, c.s22_star, tie_break)
    if infeasible:
        log.warning("s22* = %g < 0: observations admit no feasible s22", c.s22_star)
    raw = c.s11_star - float(gain @ x)
    sol = KnapsackSolution(raw, tuple(cells), ratio, weight, x, c.s22_star, residual, infeasible)
    return min(max(raw, 0.0), 1.0), sol


def t11_line_items(c: CopCoefficients, side: str, k_max: int | None = None, tails: bool = True):
    """Items of the t_1k (``side='row'``) or t_k1 (``side='col'``) knapsack, k >= 3."""
    K = c.k_max if k_max is None else k_max
    if K > c.k_max:
        raise ValueError(f"k_max {K} exceeds the source truncation {c.k_max}")
    tails = tails and K == c.k_max
    ks = np.arange(3, K + 1)
    if side == "row":
        u, v, delta, u_tail, cap, h = c.u_b, c.v_b, c.db, c.u_b_tail, c.h_b_hat, c.h_b
        cells = [Cell(1, int(k)) for k in ks]
        tail_cell = Cell(1, K + 1, "row_tail")
    elif side == "col":
        u, v, delta, u_tail, cap, h = c.u_a, c.v_a, c.da, c.u_a_tail, c.h_a_hat, c.h_a
        cells = [Cell(int(k), 1) for k in ks]
        tail_cell = Cell(K + 1, 1, "col_tail")
    else:
        raise ValueError(side)
    weight = u[ks] / delta  # -f12(1,k) or -f21(k,1)
    gain = v[ks] / delta  # f11(1,k) or f11(k,1)
    ratio = np.array([h(int(k)) for k in ks])
    if tails and u_tail > 0:
        cells.append(tail_cell)
        weight = np.append(weight, u_tail / delta)
        ratio = np.append(ratio, cap)
        gain = np.append(gain, cap * u_tail / delta)
    return cells, weight, ratio, gain


def _solve_line(c, side, k_max, tails, tie_break):
    cells, weight, ratio, gain = t11_line_items(c, side, k_max, tails)
    budget = c.t12_star if side == "row" else c.t21_star
    keys = np.array([(cl.m, cl.n) for cl in cells]).reshape(-1, 2)
    x, residual, infeasible = _knapsack(weight, ratio, keys, budget, tie_break)
    total = float(gain @ x)
    return total, KnapsackSolution(total, tuple(cells), ratio, weight, x, budget, residual, infeasible)


def t11_exact_max(c: CopCoefficients, *, k_max: int | None = None, tails: bool = True, tie_break="lex"):
    """Maximum of t11 over t_1k and t_k1. Returns ``(bound, row_solution, col_solution)``."""
    if not c.invariants_hold():
        a1, b1 = c.alice.decoy_x[1], c.bob.decoy_x[1]
        raw = c.rg.t_xx / (a1 * b1)
        log.warning("coefficient sign structure violated; falling back to the (xx) error bound")
        empty = KnapsackSolution(0.0, (), np.zeros(0), np.zeros(0), np.zeros(0), 0.0, 0.0, fallback="E11SIMPLE")
        return raw, empty, empty
    t_row, row = _solve_line(c, "row", k_max, tails, tie_break)
    t_col, col = _solve_line(c, "col", k_max, tails, tie_break)
    return c.t11_star + t_row + t_col, row, col


def e11_exact(s11_min: float, t11_max: float) -> float:
    if not s11_min > 0:
        raise UndefinedErrorBound(f"s11 lower bound is {s11_min}, no key can be extracted")
    return min(max(t11_max / s11_min, 0.0), 1.0)
