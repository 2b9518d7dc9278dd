"""Brute-force certification: vertex enumeration of small box LPs and bound validity reports.

Nothing here goes through the knapsack code; the only thing shared with the
solver is the coefficient evaluation on :class:`CopCoefficients`.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass

import numpy as np

from . import bounds_exact as be
from .bounds_exact import CopCoefficients
from .channel import ChannelParams, simulate_observed
from .errors import OracleTooLarge
from .sources import ThreeIntensitySource
from .statistics import reduce

MAX_VARIABLES = 12
FEAS_TOL = 1e-12
EQUIV_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class TruncatedLp:
    """optimize c0 + c.x  subject to  g0 + g.x >= 0,  0 <= x <= 1."""

    c: np.ndarray
    g: np.ndarray
    g0: float
    c0: float = 0.0
    labels: tuple = ()

    @property
    def size(self) -> int:
        return len(self.c)


def _candidates(D: int, g: np.ndarray, g0: float) -> np.ndarray:
    corners = np.array(list(itertools.product((0.0, 1.0), repeat=D))).reshape(-1, D)
    pts = [corners]
    for i in range(D):
        if g[i] == 0:
            continue
        others = np.delete(np.arange(D), i)
        sub = np.array(list(itertools.product((0.0, 1.0), repeat=D - 1))).reshape(-1, D - 1)
        xi = -(g0 + sub @ g[others]) / g[i]
        ok = (xi >= 0) & (xi <= 1)
        p = np.zeros((int(ok.sum()), D))
        p[:, others] = sub[ok]
        p[:, i] = xi[ok]
        pts.append(p)
    return np.vstack(pts)


def vertex_enumerate(lp: TruncatedLp, sense: str = "min") -> tuple[float, np.ndarray]:
    """Exhaustive optimum over every vertex of the box cut by the single constraint."""
    D = lp.size
    if D > MAX_VARIABLES:
        raise OracleTooLarge(f"{D} variables; the oracle enumerates at most {MAX_VARIABLES}")
    c, g = np.asarray(lp.c, float), np.asarray(lp.g, float)
    pts = _candidates(D, g, lp.g0)
    slack = lp.g0 + pts @ g
    scale = abs(lp.g0) + np.abs(g).sum()
    pts = pts[slack >= -FEAS_TOL * max(scale, 1e-300)]
    if not len(pts):
        raise ValueError("truncated LP is infeasible")
    vals = lp.c0 + pts @ c
    k = int(np.argmin(vals) if sense == "min" else np.argmax(vals))
    return float(vals[k]), pts[k]


def s11_lp(c: CopCoefficients, k_max: int = 4) -> TruncatedLp:
    cells = [(m, n) for m in range(2, k_max + 1) for n in range(2, k_max + 1) if (m, n) != (2, 2)]
    return TruncatedLp(
        np.array([c.f11(m, n) for m, n in cells]),
        np.array([c.f22(m, n) for m, n in cells]),
        c.s22_star,
        c.s11_star,
        tuple(cells),
    )


def t11_row_lp(c: CopCoefficients, k_max: int = 12) -> TruncatedLp:
    ks = range(3, k_max + 1)
    return TruncatedLp(
        np.array([c.f11(1, k) for k in ks]), np.array([c.f12(1, k) for k in ks]), c.t12_star, 0.0,
        tuple((1, k) for k in ks),
    )


def t11_col_lp(c: CopCoefficients, k_max: int = 12) -> TruncatedLp:
    ks = range(3, k_max + 1)
    return TruncatedLp(
        np.array([c.f11(k, 1) for k in ks]), np.array([c.f21(k, 1) for k in ks]), c.t21_star, 0.0,
        tuple((k, 1) for k in ks),
    )


def oracle_s11(c: CopCoefficients, k_max: int = 4) -> float:
    return vertex_enumerate(s11_lp(c, k_max), "min")[0]


def oracle_t11(c: CopCoefficients, k_max: int = 12) -> float:
    # a negative budget makes the truncated line problem infeasible; the
    # solver then saturates nothing, mirror that here
    row = vertex_enumerate(t11_row_lp(c, k_max), "max")[0] if c.t12_star >= 0 else 0.0
    col = vertex_enumerate(t11_col_lp(c, k_max), "max")[0] if c.t21_star >= 0 else 0.0
    return c.t11_star + row + col


@dataclass(frozen=True)
class BoundCheck:
    name: str
    kind: str  # "lower" or "upper"
    value: float
    truth: float
    gap: float  # truth - value for lower bounds, value - truth for upper
    ok: bool


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[BoundCheck, ...]

    @property
    def passed(self) -> bool:
        return all(ch.ok for ch in self.checks)

    def to_json(self) -> str:
        return json.dumps({"passed": self.passed, "checks": [asdict(ch) for ch in self.checks]}, indent=2)

    def to_table(self) -> str:
        w = max([5] + [len(ch.name) for ch in self.checks]) + 2
        lines = [f"{'bound':<{w}}{'kind':<7}{'value':>14}{'truth':>14}{'gap':>13}  ok"]
        for ch in self.checks:
            lines.append(
                f"{ch.name:<{w}}{ch.kind:<7}{ch.value:>14.6e}{ch.truth:>14.6e}{ch.gap:>13.3e}  "
                f"{'PASS' if ch.ok else 'FAIL'}"
            )
        return "\n".join(lines)


def validate_bounds(lower: dict[str, float], upper: dict[str, float], truth: tuple[float, float],
                    slack: float = 1e-12) -> ValidationReport:
    """Check lower bounds on s11 and upper bounds on e11 against the true values."""
    s11_true, e11_true = truth
    checks = []
    for name, v in lower.items():
        gap = s11_true - v
        checks.append(BoundCheck(name, "lower", v, s11_true, gap, gap >= -slack))
    for name, v in upper.items():
        gap = v - e11_true
        checks.append(BoundCheck(name, "upper", v, e11_true, gap, gap >= -slack))
    return ValidationReport(tuple(checks))


@dataclass(frozen=True)
class RandomInstance:
    mu1: float
    mu2: float
    loss_db: float
    basis: str
    coefficients: CopCoefficients


def random_instance(rng: np.random.Generator, mu1_range=(0.05, 0.2), mu2_range=(0.3, 0.9),
                    loss_range=(0.0, 40.0), k_max: int = 20) -> RandomInstance:
    """A valid COP built from simulated statistics of random symmetric Poisson sources.

    ``k_max`` only sets the source truncation; the oracle problems are cut
    smaller than that.
    """
    mu1 = float(rng.uniform(*mu1_range))
    mu2 = float(rng.uniform(*mu2_range))
    loss = float(rng.uniform(*loss_range))
    basis = "Z" if rng.random() < 0.5 else "X"
    alice = ThreeIntensitySource.poisson(mu1, mu2, k_max, "A")
    bob = ThreeIntensitySource.poisson(mu1, mu2, k_max, "B")
    obs, _ = simulate_observed(ChannelParams(loss, basis=basis), alice, bob)
    return RandomInstance(mu1, mu2, loss, basis, be.cop_coefficients(reduce(obs, alice, bob), alice, bob))


def _equal_check(name: str, value: float, oracle: float, rtol: float) -> BoundCheck:
    gap = abs(value - oracle)
    return BoundCheck(name, "equal", value, oracle, gap, gap <= rtol * abs(oracle) or gap <= 1e-18)


def equivalence_checks(n: int, seed: int = 0, s11_kmax: int = 4, t11_kmax: int = 12,
                       rtol: float = EQUIV_RTOL) -> list[BoundCheck]:
    """Knapsack solver vs vertex enumeration on ``n`` random truncated problems."""
    rng = np.random.default_rng(seed)
    checks = []
    for i in range(n):
        c = random_instance(rng).coefficients
        _, sol = be.s11_exact_min(c, k_max=s11_kmax, tails=False)
        t, _, _ = be.t11_exact_max(c, k_max=t11_kmax, tails=False)
        checks.append(_equal_check(f"oracle_s11#{i}", sol.objective_bound, oracle_s11(c, s11_kmax), rtol))
        checks.append(_equal_check(f"oracle_t11#{i}", t, oracle_t11(c, t11_kmax), rtol))
    return checks
