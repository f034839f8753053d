"""Cylinder and Moebius quotients of M(c) and the closure classification of geodesics."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .core import as_point, ricci_at
from .geodesics import B_ZERO, TangentState, integrate_geodesic
from .surfaces import Kind, SurfaceFamily, make_surface
from .symmetry import AffineMapParams, apply_T, compose_T, jacobian_T, power_T


class Outcome(str, Enum):
    Closed = "Closed"
    ReturnsToBase = "ReturnsToBase"
    Alienated = "Alienated"
    Escaped = "Escaped"
    NotReturning = "NotReturning"


@dataclass(frozen=True)
class QuotientSurface:
    base: SurfaceFamily
    deck: AffineMapParams
    name: str

    @property
    def c(self) -> float:
        return self.base.c

    @property
    def shift(self) -> float:
        """Vertical translation of the deck generator."""
        return self.deck.delta

    def deck_power(self, k: int) -> AffineMapParams:
        return power_T(self.deck, k, self.c)


def cylinder(base: SurfaceFamily | float = 0.0) -> QuotientSurface:
    """``R^2`` modulo ``(x1, x2) -> (x1, x2 + 2 pi)``."""
    if not isinstance(base, SurfaceFamily):
        base = make_surface(Kind.Mc, base)
    _require_mc(base)
    return QuotientSurface(base, AffineMapParams(0.0, 0.0, 0.0, 2 * math.pi, 1), "cylinder")


def moebius(base: SurfaceFamily | float = 0.0) -> QuotientSurface:
    """``R^2`` modulo ``(x1, x2) -> (-x1, x2 + pi)``."""
    if not isinstance(base, SurfaceFamily):
        base = make_surface(Kind.Mc, base)
    _require_mc(base)
    return QuotientSurface(base, AffineMapParams(0.0, 0.0, 0.0, math.pi, -1), "moebius")


def _require_mc(base: SurfaceFamily) -> None:
    if base.kind is not Kind.Mc:
        raise ValueError(f"quotients are defined over the M(c) family, got {base.kind.value}")


def make_quotient(name: str, base: SurfaceFamily) -> QuotientSurface:
    try:
        return {"cylinder": cylinder, "moebius": moebius}[name.lower()](base)
    except KeyError:
        raise ValueError(f"unknown quotient {name!r}; expected cylinder or moebius") from None


def project(q: QuotientSurface, x) -> np.ndarray:
    """Representative of ``x`` with ``x2`` in ``[0, shift)``."""
    x = as_point(x)
    k = math.floor(x[1] / q.shift)
    y = apply_T(q.deck_power(-k), q.c, x)
    if y[1] >= q.shift:  # rounding at the upper edge
        y = apply_T(q.deck_power(-1), q.c, y)
    return y


def push_state(p: AffineMapParams, c: float, s: TangentState) -> TangentState:
    """Image of a tangent vector under ``T(p)``."""
    x = s.position
    return TangentState.of(apply_T(p, c, x), jacobian_T(p, c, x) @ s.velocity)


@dataclass
class ClosureReport:
    outcome: Outcome
    period: Optional[float] = None
    position_error: float = math.nan
    velocity_error: float = math.nan
    t_return: Optional[float] = None
    deck_power: Optional[int] = None
    t_last: Optional[float] = None


def default_t_max(q: QuotientSurface, s: TangentState) -> float:
    """Search horizon: four expected return times for ``c = 0``; the first
    return time plus 10% (or the end of the domain) for ``c > 0``."""
    c, b = q.c, s.b
    if abs(b) < B_ZERO:
        return 4 * q.shift
    if c == 0:
        return 4 * q.shift / abs(b)
    if b > 0:
        return 1.1 * math.expm1(2 * c * q.shift) / (2 * b * c)
    return 1.0 / (2 * abs(b) * c)


def rho_speed(q: QuotientSurface, x, w) -> float:
    _, rho_s = ricci_at(q.base.conn, x)
    w = np.asarray(w, dtype=float)
    return float(w @ rho_s @ w)


def classify_geodesic(
    q: QuotientSurface,
    s: TangentState,
    tol: float = 1e-6,
    t_max: Optional[float] = None,
    *,
    rtol: float = 1e-11,
    atol: float = 1e-11,
) -> ClosureReport:
    """Follow the geodesic with initial data ``s`` until it comes back to its base point.

    Every time ``x2`` crosses ``v + k * shift`` the state is pulled back by the
    ``k``-th deck power and compared with ``s``.  A matching position and
    velocity is ``Closed``; a matching position alone is ``ReturnsToBase``.
    """
    conn = q.base.conn
    t_max = default_t_max(q, s) if t_max is None else float(t_max)
    v0 = s.velocity
    vscale = 1 + float(np.linalg.norm(v0))

    if abs(s.b) < B_ZERO:
        tr = integrate_geodesic(conn, s, t_max, rtol=rtol, atol=atol)
        if tr.escaped:
            return ClosureReport(Outcome.Escaped, t_last=float(tr.t[-1]))
        idx = np.linspace(0, len(tr.t) - 1, 10).astype(int)
        null = max(abs(rho_speed(q, tr.y[i, :2], tr.y[i, 2:])) for i in idx)
        outcome = Outcome.Alienated if null <= tol else Outcome.NotReturning
        return ClosureReport(outcome, t_last=float(tr.t[-1]))

    direction = 1 if s.b > 0 else -1
    state, t0, k = s, 0.0, 0
    best = ClosureReport(Outcome.NotReturning, t_last=0.0)
    while t0 < t_max:
        k += direction
        target = s.v + k * q.shift

        def crossing(t, y, target=target):
            return y[1] - target

        crossing.terminal = True
        tr = integrate_geodesic(conn, state, t_max, t_start=t0, rtol=rtol, atol=atol, events=[crossing])
        if tr.escaped:
            return ClosureReport(Outcome.Escaped, t_last=float(tr.t[-1]))
        if tr.status != "event":
            best.t_last = float(tr.t[-1])
            return best
        t_hit = float(tr.t_events[0][0])
        y_hit = tr.y_events[0][0]
        back = push_state(q.deck_power(-k), q.c, TangentState(*y_hit))
        pos_err = float(np.linalg.norm(back.position - s.position))
        if pos_err < tol:
            vel_err = float(np.linalg.norm(back.velocity - v0))
            closed = vel_err < tol * vscale
            return ClosureReport(
                Outcome.Closed if closed else Outcome.ReturnsToBase,
                period=t_hit if closed else None,
                position_error=pos_err,
                velocity_error=vel_err,
                t_return=t_hit,
                deck_power=k,
                t_last=t_hit,
            )
        state, t0 = TangentState(*y_hit), t_hit
    best.t_last = t0
    return best


@dataclass
class SweepReport:
    quotient: str
    c: float
    base: tuple[float, float]
    angles: np.ndarray
    reports: list[ClosureReport] = field(default_factory=list)

    def count(self, outcome: Outcome) -> int:
        return sum(r.outcome is outcome for r in self.reports)

    @property
    def alienated_indices(self) -> list[int]:
        return [i for i, r in enumerate(self.reports) if r.outcome is Outcome.Alienated]

    @property
    def almost_zoll(self) -> bool:
        """Exactly the two antipodal horizontal directions are alienated; all others close."""
        n = len(self.reports)
        ali = self.alienated_indices
        if len(ali) != 2 or (ali[1] - ali[0]) * 2 != n:
            return False
        return self.count(Outcome.Closed) == n - 2

    def summary_line(self) -> str:
        closed = self.count(Outcome.Closed)
        alienated = self.count(Outcome.Alienated)
        other = len(self.reports) - closed - alienated
        flag = "TRUE" if self.almost_zoll else "FALSE"
        return f"almost_zoll={flag} closed={closed} alienated={alienated} other={other}"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("dir_index,angle,outcome,period,pos_err,vel_err,t_return\n")
        for i, (ang, r) in enumerate(zip(self.angles, self.reports)):
            cells = [str(i), _fmt(ang), r.outcome.value, _fmt(r.period), _fmt(r.position_error), _fmt(r.velocity_error), _fmt(r.t_return)]
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return f"{float(v) + 0.0:.17g}"


def sweep_directions(n_dirs: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit directions at angles ``2 pi k / n``; horizontals get ``b = 0`` exactly."""
    if n_dirs < 8 or n_dirs % 2:
        raise ValueError("n_dirs must be an even integer >= 8 so that both horizontals are sampled")
    angles = 2 * math.pi * np.arange(n_dirs) / n_dirs
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    dirs[0] = (1.0, 0.0)
    dirs[n_dirs // 2] = (-1.0, 0.0)
    quarter = n_dirs // 4
    if n_dirs % 4 == 0:
        dirs[quarter] = (0.0, 1.0)
        dirs[3 * quarter] = (0.0, -1.0)
    return angles, dirs


def almost_zoll_sweep(
    q: QuotientSurface,
    base,
    n_dirs: int = 32,
    tol: float = 1e-6,
    t_max: Optional[float] = None,
) -> SweepReport:
    """Classify ``n_dirs`` geodesics through ``base``; Escaped outcomes stay in the report."""
    x = as_point(base)
    angles, dirs = sweep_directions(n_dirs)
    report = SweepReport(q.name, q.c, (float(x[0]), float(x[1])), angles)
    for w in dirs:
        report.reports.append(classify_geodesic(q, TangentState.of(x, w), tol, t_max))
    return report


def equivariance_check(q: QuotientSurface, p: AffineMapParams, c: float, sample: Sequence) -> float:
    """``max |deck(T(x)) - T(deck(x))|`` over the sample."""
    worst = 0.0
    for x in sample:
        lhs = apply_T(q.deck, c, apply_T(p, c, x))
        rhs = apply_T(p, c, apply_T(q.deck, c, x))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def deck_square_defect(q: QuotientSurface) -> float:
    """``|deck o deck - (x2 -> x2 + 2 pi)|`` in parameter space; zero for the Moebius strip."""
    sq = compose_T(q.deck, q.deck, q.c)
    target = AffineMapParams(0.0, 0.0, 0.0, 2 * math.pi, 1)
    return float(max(abs(a - b) for a, b in zip(sq, target)))
