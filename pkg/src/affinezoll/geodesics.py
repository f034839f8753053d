"""Geodesic flow: numerical integration and the closed-form curves of M(c).

For ``M(c)`` with ``c > 0`` and ``b != 0`` the geodesic through ``(u, v)`` with
velocity ``(a, b)`` is

    s = 1 + 2 b c t,   theta = log(s) / (2 c)
    x1 = sqrt(s) / b * (b u cos theta + (a - b c u) sin theta)
    x2 = v + theta

and only exists while ``s > 0``.  For ``c = 0`` it is
``(u cos bt + (a/b) sin bt, v + bt)``; horizontal geodesics (``b = 0``) are
straight lines for every ``c``.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .core import ConnectionField, GeometryError, as_point

B_ZERO = 1e-12
MAX_SPEED = 1e8


class GeodesicDomainError(GeometryError, ValueError):
    """Parameter value outside the maximal domain of a geodesic."""


class TangentState(NamedTuple):
    u: float
    v: float
    a: float
    b: float

    @classmethod
    def of(cls, position, velocity) -> "TangentState":
        p = as_point(position)
        w = as_point(velocity)
        return cls(float(p[0]), float(p[1]), float(w[0]), float(w[1]))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.u, self.v])

    @property
    def velocity(self) -> np.ndarray:
        return np.array([self.a, self.b])


def geodesic_domain(c: float, s: TangentState) -> tuple[float, float]:
    """Maximal open parameter interval of the geodesic of ``M(c)`` with initial data ``s``."""
    b = s.b
    if c == 0 or abs(b) < B_ZERO:
        return (-math.inf, math.inf)
    end = -1.0 / (2 * b * c)
    return (end, math.inf) if b * c > 0 else (-math.inf, end)


@dataclass(frozen=True)
class GeodesicCurve:
    """Closed-form geodesic of ``M(c)``."""

    c: float
    state: TangentState

    @property
    def domain(self) -> tuple[float, float]:
        return geodesic_domain(self.c, self.state)

    @property
    def horizontal(self) -> bool:
        return abs(self.state.b) < B_ZERO

    def _check(self, t: float) -> None:
        lo, hi = self.domain
        if not lo < t < hi:
            raise GeodesicDomainError(f"t={t} outside the geodesic domain ({lo}, {hi})")

    def tau(self, t: float) -> float:
        if self.c == 0 or self.horizontal:
            raise GeodesicDomainError("tau is only defined for c > 0 and b != 0")
        self._check(t)
        return math.log1p(2 * self.state.b * self.c * t)

    def position(self, t: float) -> np.ndarray:
        self._check(t)
        u, v, a, b = self.state
        c = self.c
        if self.horizontal:
            return np.array([a * t + u, v])
        if c == 0:
            return np.array([u * math.cos(b * t) + a / b * math.sin(b * t), v + b * t])
        s = 1 + 2 * b * c * t
        th = math.log(s) / (2 * c)
        return np.array([
            math.sqrt(s) / b * (b * u * math.cos(th) + (a - b * c * u) * math.sin(th)),
            v + th,
        ])

    def velocity(self, t: float) -> np.ndarray:
        self._check(t)
        u, v, a, b = self.state
        c = self.c
        if self.horizontal:
            return np.array([a, 0.0])
        if c == 0:
            return np.array([-u * b * math.sin(b * t) + a * math.cos(b * t), b])
        s = 1 + 2 * b * c * t
        th = math.log(s) / (2 * c)
        A, B = b * u, a - b * c * u
        cos, sin = math.cos(th), math.sin(th)
        return np.array([
            (c * (A * cos + B * sin) + (B * cos - A * sin)) / math.sqrt(s),
            b / s,
        ])


def closed_form_geodesic(c: float, s: TangentState) -> GeodesicCurve:
    if c < 0:
        raise ValueError("c must be >= 0")
    return GeodesicCurve(float(c), TangentState(*map(float, s)))


def speed(c: float, s: TangentState, t: float) -> float:
    """``rho(sigma', sigma') = (1 + c^2) (dx2/dt)^2`` along the closed-form geodesic."""
    w = closed_form_geodesic(c, s).velocity(t)
    return float((1 + c * c) * w[1] ** 2)


def focusing_point(c: float, base, b_sign: int) -> np.ndarray:
    """Common point of all geodesics from ``base`` whose vertical velocity has sign ``b_sign``.

    Reached at parameter ``pi / |b|``.  Only available for ``c = 0``; for
    ``c > 0`` the picture is the image of the ``c = 0`` one under
    ``(x1, x2) -> (exp(c x2) x1, x2)`` and a reparametrization.
    """
    if c != 0:
        raise NotImplementedError("focusing points are provided for c = 0 only")
    if b_sign not in (1, -1):
        raise ValueError("b_sign must be +1 or -1")
    u, v = as_point(base)
    return np.array([-u, v + b_sign * math.pi])


def geodesic_rhs(conn: ConnectionField) -> Callable[[float, np.ndarray], np.ndarray]:
    def rhs(t, y):
        w = y[2:]
        acc = -np.einsum("ijk,i,j->k", conn.gamma(y[:2]), w, w)
        return np.concatenate([w, acc])

    return rhs


@dataclass
class Trajectory:
    """Accepted steps ``(t, x1, x2, dx1, dx2)`` of a numerical geodesic."""

    t: np.ndarray
    y: np.ndarray
    status: str = "completed"  # completed | event | escaped
    nfev: int = 0
    message: str = ""
    t_events: list = field(default_factory=list)
    y_events: list = field(default_factory=list)
    sol: Optional[Callable] = None

    @property
    def escaped(self) -> bool:
        return self.status == "escaped"

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack([self.t, self.y])

    @property
    def final(self) -> TangentState:
        return TangentState(*map(float, self.y[-1]))

    def to_csv(self, extra: Optional[dict] = None) -> str:
        """CSV with header ``t,x1,x2,dx1,dx2`` (plus ``extra`` columns), 17 significant digits."""
        cols = ["t", "x1", "x2", "dx1", "dx2"]
        data = [self.samples]
        if extra:
            cols += list(extra)
            data += [np.asarray(v, dtype=float).reshape(len(self.t), -1) for v in extra.values()]
        table = np.hstack(data)
        buf = io.StringIO()
        buf.write(",".join(cols) + "\n")
        for row in table:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()


def _fmt(v: float) -> str:
    return f"{v + 0.0:.17g}"


def _rk4(rhs, y0, t0, t1, n_steps, max_speed):
    h = (t1 - t0) / n_steps
    ts, ys = [t0], [np.array(y0, dtype=float)]
    y = ys[0]
    for i in range(n_steps):
        t = t0 + i * h
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y[2:])) > max_speed:
            return np.array(ts), np.array(ys), "escaped", 4 * (i + 1)
        ts.append(t0 + (i + 1) * h)
        ys.append(y)
    return np.array(ts), np.array(ys), "completed", 4 * n_steps


def integrate_geodesic(
    conn: ConnectionField,
    s: TangentState,
    t_end: float,
    *,
    t_start: float = 0.0,
    method: str = "DOP853",
    rtol: float = 1e-10,
    atol: float = 1e-10,
    max_speed: float = MAX_SPEED,
    events: Optional[Sequence[Callable]] = None,
    n_steps: int = 2000,
    dense_output: bool = False,
) -> Trajectory:
    """Integrate ``x'' + Gamma(x)(x', x') = 0`` from ``t_start`` to ``t_end``.

    ``method`` is any explicit scipy solver (``"DOP853"``, ``"RK45"``) or
    ``"rk4"`` for a fixed-step scheme with ``n_steps`` steps.  The run stops
    with status ``"escaped"`` when the speed exceeds ``max_speed`` or the step
    size collapses, which is how finite-time blow-up shows up.  ``events``
    are scipy event functions ``g(t, y)``; terminal ones end the run with
    status ``"event"``.
    """
    if t_end == t_start:
        raise ValueError("t_end must differ from t_start")
    y0 = np.array(s, dtype=float)
    if not np.all(np.isfinite(y0)):
        raise ValueError("initial state must be finite")
    rhs = geodesic_rhs(conn)

    if method == "rk4":
        t, y, status, nfev = _rk4(rhs, y0, t_start, t_end, n_steps, max_speed)
        return Trajectory(t, y, status, nfev, "fixed-step RK4")

    def blowup(t, y):
        return max_speed - max(abs(y[2]), abs(y[3]))

    blowup.terminal = True
    evs = [blowup] + list(events or [])
    sol = solve_ivp(
        rhs, (t_start, t_end), y0, method=method, rtol=rtol, atol=atol,
        events=evs, dense_output=dense_output,
    )
    t_ev = list(sol.t_events[1:]) if sol.t_events is not None else []
    y_ev = list(sol.y_events[1:]) if sol.y_events is not None else []
    if sol.status == -1 or (sol.status == 1 and len(sol.t_events[0])):
        status = "escaped"
    elif sol.status == 1:
        status = "event"
    else:
        status = "completed"
    return Trajectory(sol.t, sol.y.T, status, sol.nfev, sol.message, t_ev, y_ev, sol.sol)
