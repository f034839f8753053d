"""The symmetry group G(c) of M(c), its Killing algebra and bracket tables.

Group elements act by

    T(alpha, beta, gamma, delta)(x1, x2)
        = (s e^alpha x1 + beta e^{c x2} cos x2 + gamma e^{c x2} sin x2, x2 + delta)

with a sign ``s = +-1``; ``s = -1`` encodes the orientation-reversing deck
map of the Moebius strip.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .core import ConnectionField, GeometryError, as_point
from .surfaces import ChartMap, pullback_connection


class AffineMapParams(NamedTuple):
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0
    sign: int = 1

    def __str__(self) -> str:
        body = ",".join(f"{v:.17g}" for v in self[:4])
        return f"T({body})" if self.sign == 1 else f"T({body},-1)"


IDENTITY = AffineMapParams()

_T_RE = re.compile(r"^\s*T\s*\((.*)\)\s*$")


def parse_T(text: str) -> AffineMapParams:
    """Parse ``T(alpha,beta,gamma,delta[,sign])``."""
    m = _T_RE.match(text)
    if not m:
        raise ValueError(f"expected T(alpha,beta,gamma,delta[,sign]), got {text!r}")
    parts = [float(s) for s in m.group(1).split(",")]
    if len(parts) == 4:
        return AffineMapParams(*parts)
    if len(parts) == 5 and parts[4] in (1.0, -1.0):
        return AffineMapParams(*parts[:4], sign=int(parts[4]))
    raise ValueError(f"expected 4 parameters and an optional sign of +-1, got {text!r}")


def _check_sign(p: AffineMapParams) -> None:
    if p.sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {p.sign}")


def apply_T(p: AffineMapParams, c: float, x) -> np.ndarray:
    _check_sign(p)
    x1, x2 = as_point(x)
    e = np.exp(c * x2)
    return np.array([
        p.sign * np.exp(p.alpha) * x1 + p.beta * e * np.cos(x2) + p.gamma * e * np.sin(x2),
        x2 + p.delta,
    ])


def jacobian_T(p: AffineMapParams, c: float, x) -> np.ndarray:
    x1, x2 = as_point(x)
    e = np.exp(c * x2)
    dcos = e * (c * np.cos(x2) - np.sin(x2))
    dsin = e * (c * np.sin(x2) + np.cos(x2))
    return np.array([[p.sign * np.exp(p.alpha), p.beta * dcos + p.gamma * dsin], [0.0, 1.0]])


def compose_T(p: AffineMapParams, q: AffineMapParams, c: float) -> AffineMapParams:
    """Parameters of ``T(p) o T(q)``."""
    _check_sign(p)
    _check_sign(q)
    lead = p.sign * np.exp(p.alpha)
    e = np.exp(c * q.delta)
    cd, sd = np.cos(q.delta), np.sin(q.delta)
    return AffineMapParams(
        p.alpha + q.alpha,
        lead * q.beta + e * (p.beta * cd + p.gamma * sd),
        lead * q.gamma + e * (-p.beta * sd + p.gamma * cd),
        p.delta + q.delta,
        p.sign * q.sign,
    )


def invert_T(p: AffineMapParams, c: float) -> AffineMapParams:
    _check_sign(p)
    k = -p.sign * np.exp(-p.alpha - c * p.delta)
    cd, sd = np.cos(p.delta), np.sin(p.delta)
    return AffineMapParams(
        -p.alpha,
        k * (p.beta * cd - p.gamma * sd),
        k * (p.beta * sd + p.gamma * cd),
        -p.delta,
        p.sign,
    )


def power_T(p: AffineMapParams, k: int, c: float) -> AffineMapParams:
    """``T(p)^k`` for any integer ``k``."""
    base = p if k >= 0 else invert_T(p, c)
    out = IDENTITY
    for _ in range(abs(int(k))):
        out = compose_T(base, out, c)
    return out


def check_T(scale: float, delta: float) -> AffineMapParams:
    """The map ``(x1, x2) -> (scale x1, x2 + delta)``, ``scale != 0``."""
    if scale == 0:
        raise ValueError("scale must be nonzero")
    return AffineMapParams(float(np.log(abs(scale))), 0.0, 0.0, float(delta), 1 if scale > 0 else -1)


def transitivity_witness(p, q, c: float) -> AffineMapParams:
    """A group element sending ``p`` to ``q``.

    Shift vertically by ``q2 - p2``, then fix the first coordinate with
    ``beta`` or ``gamma``, whichever fiber function is larger at ``p2``.
    """
    p1, p2 = as_point(p)
    q1, q2 = as_point(q)
    e = np.exp(c * p2)
    residual = q1 - p1
    if abs(np.cos(p2)) >= abs(np.sin(p2)):
        return AffineMapParams(0.0, residual / (e * np.cos(p2)), 0.0, q2 - p2)
    return AffineMapParams(0.0, 0.0, residual / (e * np.sin(p2)), q2 - p2)


def group_chart(p: AffineMapParams, c: float) -> ChartMap:
    """``T(p)`` as a :class:`ChartMap`, for pulling back connections."""

    def second(x):
        _, x2 = x
        e = np.exp(c * x2)
        d2cos = e * ((c * c - 1) * np.cos(x2) - 2 * c * np.sin(x2))
        d2sin = e * ((c * c - 1) * np.sin(x2) + 2 * c * np.cos(x2))
        out = np.zeros((2, 2, 2))
        out[0, 1, 1] = p.beta * d2cos + p.gamma * d2sin
        return out

    inv = invert_T(p, c)
    return ChartMap(
        lambda x: apply_T(p, c, x),
        lambda x: jacobian_T(p, c, x),
        second,
        lambda x: apply_T(inv, c, x),
        label=str(p),
    )


def pullback_defect(conn: ConnectionField, p: AffineMapParams, c: float, sample) -> float:
    """``max |(T^* conn - conn)|`` over the sample; zero when ``T`` is affine."""
    pulled = pullback_connection(conn, group_chart(p, c))
    return float(max(np.abs(pulled.gamma(x) - conn.gamma(x)).max() for x in sample))


@dataclass(frozen=True)
class VectorField2:
    """A vector field with ``partials(x)[i, j] = d_i X^j`` and
    ``second_partials(x)[i, j, k] = d_i d_j X^k``."""

    components: Callable[[np.ndarray], np.ndarray]
    partials: Optional[Callable[[np.ndarray], np.ndarray]] = None
    second_partials: Optional[Callable[[np.ndarray], np.ndarray]] = None
    label: str = "X"
    h: float = 1e-5

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.components(as_point(x)), dtype=float)

    def d(self, x) -> np.ndarray:
        x = as_point(x)
        if self.partials is not None:
            return np.asarray(self.partials(x), dtype=float)
        e = np.eye(2) * self.h
        return np.stack([(self(x + e[m]) - self(x - e[m])) / (2 * self.h) for m in range(2)])

    def d2(self, x) -> np.ndarray:
        x = as_point(x)
        if self.second_partials is not None:
            return np.asarray(self.second_partials(x), dtype=float)
        e = np.eye(2) * self.h
        return np.stack([(self.d(x + e[m]) - self.d(x - e[m])) / (2 * self.h) for m in range(2)])

    def __add__(self, other: "VectorField2") -> "VectorField2":
        return linear_combination([(1.0, self), (1.0, other)])

    def __rmul__(self, k: float) -> "VectorField2":
        return linear_combination([(float(k), self)])

    def __neg__(self) -> "VectorField2":
        return linear_combination([(-1.0, self)])


def linear_combination(terms: Sequence[tuple[float, VectorField2]]) -> VectorField2:
    terms = list(terms)
    label = " + ".join(f"{k:g}*{X.label}" for k, X in terms)
    return VectorField2(
        lambda x: sum(k * X(x) for k, X in terms),
        lambda x: sum(k * X.d(x) for k, X in terms),
        lambda x: sum(k * X.d2(x) for k, X in terms),
        label=label,
    )


def _fiber_field(c: float, trig: str) -> VectorField2:
    # g(x2) d_1 with g = e^{c x2} cos x2 or e^{c x2} sin x2
    def g(x2):
        e = np.exp(c * x2)
        if trig == "cos":
            return e * np.cos(x2), e * (c * np.cos(x2) - np.sin(x2)), e * ((c * c - 1) * np.cos(x2) - 2 * c * np.sin(x2))
        return e * np.sin(x2), e * (c * np.sin(x2) + np.cos(x2)), e * ((c * c - 1) * np.sin(x2) + 2 * c * np.cos(x2))

    def comp(x):
        return np.array([g(x[1])[0], 0.0])

    def d(x):
        out = np.zeros((2, 2))
        out[1, 0] = g(x[1])[1]
        return out

    def d2(x):
        out = np.zeros((2, 2, 2))
        out[1, 1, 0] = g(x[1])[2]
        return out

    return VectorField2(comp, d, d2, label=f"e^(c x2) {trig}(x2) d1")


def killing_basis(c: float) -> list[VectorField2]:
    """``[e^{c x2} cos x2 d1, e^{c x2} sin x2 d1, x1 d1, d2]``."""
    if c < 0:
        raise ValueError("c must be >= 0")
    euler = VectorField2(
        lambda x: np.array([x[0], 0.0]),
        lambda x: np.array([[1.0, 0.0], [0.0, 0.0]]),
        lambda x: np.zeros((2, 2, 2)),
        label="x1 d1",
    )
    shift = VectorField2(
        lambda x: np.array([0.0, 1.0]),
        lambda x: np.zeros((2, 2)),
        lambda x: np.zeros((2, 2, 2)),
        label="d2",
    )
    return [_fiber_field(c, "cos"), _fiber_field(c, "sin"), euler, shift]


def killing_residual(conn: ConnectionField, X: VectorField2, p) -> np.ndarray:
    """Components ``L[i, j, k]`` of ``(L_X nabla)(d_i, d_j)``."""
    x = as_point(p)
    g = conn.gamma(x)
    dg = conn.dgamma(x)
    v, dX, d2X = X(x), X.d(x), X.d2(x)
    return (
        d2X
        + np.einsum("m,mijk->ijk", v, dg)
        - np.einsum("ijm,mk->ijk", g, dX)
        + np.einsum("mjk,im->ijk", g, dX)
        + np.einsum("imk,jm->ijk", g, dX)
    )


def bracket(X: VectorField2, Y: VectorField2) -> VectorField2:
    """``[X, Y]^j = X^i d_i Y^j - Y^i d_i X^j``."""

    def comp(x):
        return X(x) @ Y.d(x) - Y(x) @ X.d(x)

    def d(x):
        # d_m [X,Y]^j
        return (
            np.einsum("mi,ij->mj", X.d(x), Y.d(x))
            + np.einsum("i,mij->mj", X(x), Y.d2(x))
            - np.einsum("mi,ij->mj", Y.d(x), X.d(x))
            - np.einsum("i,mij->mj", Y(x), X.d2(x))
        )

    return VectorField2(comp, d, label=f"[{X.label}, {Y.label}]")


class NotClosedError(GeometryError):
    """Brackets of the basis do not lie in its span."""


@dataclass(frozen=True)
class LieAlgebraTable:
    """Structure constants ``[e_i, e_j] = sum_k table[i, j, k] e_k``."""

    table: np.ndarray
    fit_residual: float = 0.0

    @property
    def dim(self) -> int:
        return self.table.shape[0]

    def jacobi_defect(self) -> float:
        C = self.table
        # [[e_i,e_j],e_k] + cyclic, expanded in the basis
        t = np.einsum("ijm,mkl->ijkl", C, C)
        return float(np.abs(t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)).max())

    def change_basis(self, P) -> "LieAlgebraTable":
        """Table in the basis ``e'_a = sum_i P[a, i] e_i``."""
        P = np.asarray(P, dtype=float)
        Pinv = np.linalg.inv(P)
        return LieAlgebraTable(np.einsum("ai,bj,ijk,kd->abd", P, P, self.table, Pinv), self.fit_residual)


def a412_table() -> LieAlgebraTable:
    """``[e1,e3]=e1, [e2,e3]=e2, [e1,e4]=-e2, [e2,e4]=e1``."""
    C = np.zeros((4, 4, 4))
    for i, j, k, v in [(0, 2, 0, 1), (1, 2, 1, 1), (0, 3, 1, -1), (1, 3, 0, 1)]:
        C[i, j, k] = v
        C[j, i, k] = -v
    return LieAlgebraTable(C)


def a412_basis_change(c: float) -> np.ndarray:
    """Rows give ``(f1, -f2, f3, f4 + c f3)`` in terms of :func:`killing_basis`."""
    return np.array([[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, c, 1]], dtype=float)


def structure_constants(basis: Sequence[VectorField2], sample, *, tol: float = 1e-8) -> LieAlgebraTable:
    """Expand every bracket of ``basis`` in ``basis`` by least squares over ``sample``."""
    sample = np.asarray(sample, dtype=float)
    if len(sample) < 8:
        raise ValueError("need at least 8 sample points")
    n = len(basis)
    A = np.column_stack([np.concatenate([X(p) for p in sample]) for X in basis])
    if np.linalg.matrix_rank(A) < n:
        raise ValueError("basis fields are linearly dependent on the sample")
    C = np.zeros((n, n, n))
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            Z = bracket(basis[i], basis[j])
            b = np.concatenate([Z(p) for p in sample])
            coef, *_ = np.linalg.lstsq(A, b, rcond=None)
            res = float(np.linalg.norm(A @ coef - b) / max(1.0, np.linalg.norm(b)))
            worst = max(worst, res)
            if res > tol:
                raise NotClosedError(f"[{basis[i].label}, {basis[j].label}] leaves the span (residual {res:.3g})")
            C[i, j] = coef
            C[j, i] = -coef
    return LieAlgebraTable(C, worst)
