"""Closed-form lower bounds on s11 and the simple upper bound on e11.

The (abc) bounds solve three of the four reduced-gain equations for s11,
s12 and s21 and drop the remaining multi-photon terms, whose coefficients
are non-negative under the decoy ordering condition. The (134) and (234)
forms follow from the same elimination on the other row triples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import DegenerateSourcePair, UndefinedErrorBound
from .sources import ThreeIntensitySource
from .statistics import ReducedGains

METHODS = ("B123", "B124", "B134", "B234", "B14", "BALPHA", "E11SIMPLE")
DEGENERACY_RTOL = 1e-15


@dataclass(frozen=True)
class AnalyticBound:
    value: float
    method: str
    raw: float
    clamped: bool

    @classmethod
    def from_raw(cls, raw: float, method: str) -> "AnalyticBound":
        value = min(max(raw, 0.0), 1.0)
        return cls(value, method, raw, value != raw)


class PairTerms(NamedTuple):
    """First- and second-photon probabilities of both parties' decoy and signal."""

    a1: float
    a2: float
    ap1: float
    ap2: float
    b1: float
    b2: float
    bp1: float
    bp2: float
    da: float  # a1 a'2 - a'1 a2
    db: float  # b1 b'2 - b'1 b2


def pair_terms(alice: ThreeIntensitySource, bob: ThreeIntensitySource) -> PairTerms:
    a, ap = alice.decoy_x, alice.signal_y
    b, bp = bob.decoy_x, bob.signal_y
    da = a[1] * ap[2] - ap[1] * a[2]
    db = b[1] * bp[2] - bp[1] * b[2]
    if abs(da) < DEGENERACY_RTOL * a[1] * ap[2] or abs(db) < DEGENERACY_RTOL * b[1] * bp[2]:
        raise DegenerateSourcePair("decoy and signal are proportional in photon numbers 1 and 2")
    return PairTerms(a[1], a[2], ap[1], ap[2], b[1], b[2], bp[1], bp[2], da, db)


def s11_123(rg: ReducedGains, alice, bob) -> AnalyticBound:
    a1, a2, A1, A2, b1, b2, B1, B2, da, db = pair_terms(alice, bob)
    num = (a1 * A2 * b1 * B2 - A1 * a2 * B1 * b2) * rg.s_xx - b1 * b2 * da * rg.s_xy - a1 * a2 * db * rg.s_yx
    return AnalyticBound.from_raw(num / (a1 * b1 * da * db), "B123")


def s11_124(rg: ReducedGains, alice, bob) -> AnalyticBound:
    a1, a2, A1, A2, b1, b2, B1, B2, da, db = pair_terms(alice, bob)
    num = B1 * B2 * da * rg.s_xx + (A1 * a2 * b1 * B2 - a1 * A2 * B1 * b2) * rg.s_xy - a1 * a2 * db * rg.s_yy
    return AnalyticBound.from_raw(num / (a1 * B1 * da * db), "B124")


def s11_134(rg: ReducedGains, alice, bob) -> AnalyticBound:
    a1, a2, A1, A2, b1, b2, B1, B2, da, db = pair_terms(alice, bob)
    num = A1 * A2 * db * rg.s_xx + (a1 * A2 * b2 * B1 - a2 * A1 * b1 * B2) * rg.s_yx - b1 * b2 * da * rg.s_yy
    return AnalyticBound.from_raw(num / (A1 * b1 * da * db), "B134")


def s11_234(rg: ReducedGains, alice, bob) -> AnalyticBound:
    a1, a2, A1, A2, b1, b2, B1, B2, da, db = pair_terms(alice, bob)
    num = A1 * A2 * db * rg.s_xy + B1 * B2 * da * rg.s_yx + (a2 * A1 * b2 * B1 - a1 * A2 * b1 * B2) * rg.s_yy
    return AnalyticBound.from_raw(num / (A1 * B1 * da * db), "B234")


def s11_14_branches(rg: ReducedGains, alice, bob) -> tuple[float, float]:
    """The two eliminations of the (xx, yy) pair: drop s12, or drop s21."""
    a1, a2, A1, A2, b1, b2, B1, B2, da, db = pair_terms(alice, bob)
    s14a = (A1 * B2 * rg.s_xx - a1 * b2 * rg.s_yy) / (a1 * A1 * db)
    s14b = (A2 * B1 * rg.s_xx - a2 * b1 * rg.s_yy) / (b1 * B1 * da)
    return s14a, s14b


def s11_14(rg: ReducedGains, alice, bob) -> AnalyticBound:
    return AnalyticBound.from_raw(min(s11_14_branches(rg, alice, bob)), "B14")


def alpha_coefficient(alice, bob) -> float:
    a1, a2, A1, A2, b1, b2, B1, B2, _, _ = pair_terms(alice, bob)
    A = (A1 * B2 - a1 * b2) / (A1 * b2 + a1 * B2)
    B = (A2 * B1 - a2 * b1) / (A2 * b1 + a2 * B1)
    return min(A, B)


def s11_alpha(rg: ReducedGains, alice, bob) -> AnalyticBound:
    a1, a2, A1, A2, b1, b2, B1, B2, _, _ = pair_terms(alice, bob)
    alpha = alpha_coefficient(alice, bob)
    den = a1 * b1 - A1 * B1 + alpha * (a1 * B1 + A1 * b1)
    if abs(den) < DEGENERACY_RTOL * (a1 * b1 + A1 * B1):
        raise DegenerateSourcePair("alpha-bound denominator vanishes")
    raw = (rg.s_xx - rg.s_yy + alpha * (rg.s_xy + rg.s_yx)) / den
    return AnalyticBound.from_raw(raw, "BALPHA")


def e11_simple(rg: ReducedGains, alice, bob, s11_bound: float) -> AnalyticBound:
    """Error-rate upper bound from the (x, x) error equation alone."""
    if not s11_bound > 0:
        raise UndefinedErrorBound(f"s11 lower bound is {s11_bound}, no key can be extracted")
    a1, b1 = alice.decoy_x[1], bob.decoy_x[1]
    return AnalyticBound.from_raw(rg.t_xx / (a1 * b1 * s11_bound), "E11SIMPLE")


S11_BOUNDS = {
    "123": s11_123,
    "124": s11_124,
    "134": s11_134,
    "234": s11_234,
    "14": s11_14,
    "alpha": s11_alpha,
}


def all_s11_bounds(rg: ReducedGains, alice, bob) -> dict[str, AnalyticBound]:
    return {name: fn(rg, alice, bob) for name, fn in S11_BOUNDS.items()}
