"""Observed gains of the nine two-pulse sources and their vacuum-reduced forms."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import IncompleteData, InconsistentCounts, ParseError
from .sources import ThreeIntensitySource

STATES = ("o", "x", "y")
BASES = ("Z", "X")
CSV_HEADER = ("alice", "bob", "basis", "sent", "success", "error")
_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ObservedStatistics:
    """Gains ``S[alpha, beta]`` and error-weighted gains ``T = E*S`` for one basis.

    Rows index Alice's state and columns Bob's, both in the order ``o, x, y``.
    ``tail`` is the width of the truncation interval when the values come
    from a composed simulation (the true gain lies in ``[S, S + tail]``).
    """

    S: np.ndarray
    T: np.ndarray
    basis: str = "Z"
    counts: np.ndarray | None = None  # (3, 3, 3): success, sent, error
    tail: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))

    def __post_init__(self):
        object.__setattr__(self, "S", _frozen(self.S))
        object.__setattr__(self, "T", _frozen(self.T))
        object.__setattr__(self, "tail", _frozen(self.tail))
        if self.counts is not None:
            object.__setattr__(self, "counts", _frozen(self.counts))
        if self.S.shape != (3, 3) or self.T.shape != (3, 3):
            raise ValueError("S and T must be 3x3")
        if self.basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}")
        if np.any(self.T < -_TOL) or np.any(self.T > self.S + _TOL) or np.any(self.S > 1 + _TOL):
            raise InconsistentCounts("need 0 <= T <= S <= 1 in every cell")

    def gain(self, alice: str, bob: str) -> float:
        return float(self.S[STATES.index(alice), STATES.index(bob)])

    def error_gain(self, alice: str, bob: str) -> float:
        return float(self.T[STATES.index(alice), STATES.index(bob)])

    def error_rate(self, alice: str, bob: str) -> float:
        s = self.gain(alice, bob)
        return self.error_gain(alice, bob) / s if s > 0 else 0.0

    @property
    def S_high(self) -> np.ndarray:
        return np.minimum(self.S + self.tail, 1.0)

    def scaled(self, c: float) -> "ObservedStatistics":
        return ObservedStatistics(c * self.S, c * self.T, self.basis, None, c * self.tail)

    def to_dict(self) -> dict:
        out = {"basis": self.basis, "S": self.S.tolist(), "T": self.T.tolist()}
        if np.any(self.tail):
            out["tail"] = self.tail.tolist()
        if self.counts is not None:
            out["counts"] = self.counts.tolist()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ObservedStatistics":
        return cls(
            np.array(data["S"]),
            np.array(data["T"]),
            data.get("basis", "Z"),
            np.array(data["counts"]) if "counts" in data else None,
            np.array(data.get("tail", np.zeros((3, 3)))),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def from_counts(records: Iterable[tuple]) -> dict[str, ObservedStatistics]:
    """Build per-basis statistics from ``(alice, bob, basis, success, sent, error)`` rows.

    Every basis that appears must carry all nine (alice, bob) cells.
    """
    cells: dict[str, dict[tuple[int, int], tuple[int, int, int]]] = {}
    for alice, bob, basis, n_success, n_sent, n_error in records:
        if basis not in BASES:
            raise IncompleteData(f"unknown basis {basis!r}")
        key = (STATES.index(alice), STATES.index(bob))
        if n_sent <= 0:
            raise InconsistentCounts(f"cell {alice}{bob}/{basis}: no pulses sent")
        if n_success < 0 or n_error < 0 or n_success > n_sent:
            raise InconsistentCounts(f"cell {alice}{bob}/{basis}: counts out of range")
        if n_error > n_success:
            raise InconsistentCounts(f"cell {alice}{bob}/{basis}: more errors than successes")
        per_basis = cells.setdefault(basis, {})
        if key in per_basis:
            raise InconsistentCounts(f"cell {alice}{bob}/{basis} given twice")
        per_basis[key] = (n_success, n_sent, n_error)

    out = {}
    for basis, per_basis in cells.items():
        missing = [STATES[i] + STATES[j] for i in range(3) for j in range(3) if (i, j) not in per_basis]
        if missing:
            raise IncompleteData(f"basis {basis}: missing cells {', '.join(missing)}")
        counts = np.zeros((3, 3, 3))
        for (i, j), c in per_basis.items():
            counts[i, j] = c
        S = counts[..., 0] / counts[..., 1]
        T = counts[..., 2] / counts[..., 1]
        out[basis] = ObservedStatistics(S, T, basis, counts)
    if not out:
        raise IncompleteData("no records")
    return out


def read_counts_csv(path: str | Path) -> dict[str, ObservedStatistics]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_HEADER:
            raise ParseError(f"expected header {','.join(CSV_HEADER)}", row=1)
        records = []
        for row_no, row in enumerate(reader, start=2):
            for col in ("alice", "bob"):
                if row[col] not in STATES:
                    raise ParseError(f"bad state {row[col]!r}", row_no, col)
            if row["basis"] not in BASES:
                raise ParseError(f"bad basis {row['basis']!r}", row_no, "basis")
            ints = {}
            for col in ("sent", "success", "error"):
                try:
                    ints[col] = int(row[col])
                except (TypeError, ValueError):
                    raise ParseError(f"not an integer: {row[col]!r}", row_no, col) from None
            records.append((row["alice"], row["bob"], row["basis"], ints["success"], ints["sent"], ints["error"]))
    return from_counts(records)


def write_counts_csv(path: str | Path, rows: Iterable[tuple]) -> None:
    """Write ``(alice, bob, basis, sent, success, error)`` rows in the ingestion schema."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow(r)


@dataclass(frozen=True)
class ReducedGains:
    """Gains with the vacuum contributions subtracted (the tilde quantities)."""

    s_xx: float
    s_xy: float
    s_yx: float
    s_yy: float
    t_xx: float
    t_xy: float
    t_yx: float
    t_yy: float
    basis: str = "Z"

    @property
    def s(self) -> tuple[float, float, float, float]:
        return (self.s_xx, self.s_xy, self.s_yx, self.s_yy)

    @property
    def t(self) -> tuple[float, float, float, float]:
        return (self.t_xx, self.t_xy, self.t_yx, self.t_yy)


def _tilde(M: np.ndarray, a0: float, ap0: float, b0: float, bp0: float) -> tuple[float, float, float, float]:
    o, x, y = 0, 1, 2
    xx = M[x, x] - a0 * M[o, x] - b0 * M[x, o] + a0 * b0 * M[o, o]
    xy = M[x, y] - a0 * M[o, y] - bp0 * M[x, o] + a0 * bp0 * M[o, o]
    yx = M[y, x] - ap0 * M[o, x] - b0 * M[y, o] + ap0 * b0 * M[o, o]
    yy = M[y, y] - ap0 * M[o, y] - bp0 * M[y, o] + ap0 * bp0 * M[o, o]
    return float(xx), float(xy), float(yx), float(yy)


def reduce(obs: ObservedStatistics, alice: ThreeIntensitySource, bob: ThreeIntensitySource) -> ReducedGains:
    """Subtract vacuum components. Negative results are kept as they are."""
    zeros = (alice.decoy_x[0], alice.signal_y[0], bob.decoy_x[0], bob.signal_y[0])
    s = _tilde(obs.S, *zeros)
    t = _tilde(obs.T, *zeros)
    return ReducedGains(*s, *t, basis=obs.basis)
