"""Named affine surfaces and the operations that transform connections."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
import sympy as sp

from ._symbolic import lambdify_connection, lambdify_map, x1, x2
from .core import ConnectionField, GeometryError, ScalarField, as_point, fmt_point

SPAN_RTOL = 1e-8
SPAN_SEED = 20190601


class Kind(str, Enum):
    Mc = "Mc"
    M0c = "M0c"
    Z3 = "Z3"
    Flat = "flat"
    Custom = "custom"


class SingularJacobianError(GeometryError, ValueError):
    pass


class InconclusiveSpanError(GeometryError):
    """The sample points do not separate the basis functions."""


@dataclass(frozen=True)
class SurfaceFamily:
    kind: Kind
    c: float
    conn: ConnectionField
    qe_basis: tuple[ScalarField, ...] = ()


def _zeros():
    return [[[0, 0], [0, 0]] for _ in range(2)]


def mc_christoffels(c):
    g = _zeros()
    g[1][1][0] = (1 + c**2) * x1
    g[1][1][1] = 2 * c
    return g


def m0c_christoffels(c):
    g = _zeros()
    g[0][0][0] = 1
    g[1][1][0] = 1 + c**2
    g[1][1][1] = 2 * c
    return g


# (G11^1, G11^2, G12^1, G12^2, G22^1, G22^2)
Z3_GAMMA = (sp.Rational(1, 3), sp.Rational(-2, 3), sp.Rational(-1, 3), sp.Rational(-1, 3), sp.Rational(-2, 3), sp.Rational(1, 3))


def z3_christoffels():
    g11_1, g11_2, g12_1, g12_2, g22_1, g22_2 = Z3_GAMMA
    return [[[g11_1, g11_2], [g12_1, g12_2]], [[g12_1, g12_2], [g22_1, g22_2]]]


def connection_from_exprs(gamma, label: str, domain=None) -> ConnectionField:
    ev, d1, d2 = lambdify_connection(gamma)
    return ConnectionField(ev, d1, d2, domain=domain, label=label)


def _basis(exprs) -> tuple[ScalarField, ...]:
    return tuple(ScalarField.from_expr(e) for e in exprs)


def make_surface(kind, c: float = 0.0) -> SurfaceFamily:
    """Construct one of the catalog surfaces together with its quasi-Einstein basis.

    ``Mc`` and ``M0c`` take ``c >= 0``; the reflection ``x2 -> -x2`` maps
    ``M(c)`` to ``M(-c)``, so negative values are rejected.
    """
    kind = Kind(kind)
    c = float(c)
    if kind in (Kind.Mc, Kind.M0c) and c < 0:
        raise ValueError(f"c must be >= 0 (got {c}); use c={-c} and reflect x2 -> -x2")
    cs = sp.nsimplify(c) if float(sp.nsimplify(c)) == c else sp.Float(c)
    if kind is Kind.Mc:
        conn = connection_from_exprs(mc_christoffels(cs), f"Mc:{c:g}")
        basis = _basis([sp.exp(cs * x2) * sp.cos(x2), sp.exp(cs * x2) * sp.sin(x2), x1])
    elif kind is Kind.M0c:
        conn = connection_from_exprs(m0c_christoffels(cs), f"M0c:{c:g}")
        basis = _basis([sp.exp(cs * x2) * sp.cos(x2), sp.exp(cs * x2) * sp.sin(x2), sp.exp(x1)])
    elif kind is Kind.Z3:
        conn = connection_from_exprs(z3_christoffels(), "Z3")
        basis = _basis([sp.exp(x1), sp.exp(x2), sp.exp(-x1 - x2)])
        c = 0.0
    elif kind is Kind.Flat:
        conn = connection_from_exprs(_zeros(), "flat")
        basis = _basis([sp.Integer(1), x1, x2])
        c = 0.0
    else:
        raise ValueError("custom surfaces are built directly from a ConnectionField")
    return SurfaceFamily(kind, c, conn, basis)


def parse_surface_id(text: str) -> SurfaceFamily:
    """Parse ids such as ``"Mc:1.0"``, ``"M0c:0.5"``, ``"Z3"`` and ``"flat"``."""
    name, _, param = text.strip().partition(":")
    table = {"mc": Kind.Mc, "m0c": Kind.M0c, "z3": Kind.Z3, "flat": Kind.Flat}
    try:
        kind = table[name.lower()]
    except KeyError:
        raise ValueError(f"unknown surface id {text!r}; expected Mc:<c>, M0c:<c>, Z3 or flat") from None
    if kind in (Kind.Mc, Kind.M0c):
        if not param:
            raise ValueError(f"surface {name} needs a parameter, e.g. {name}:1.0")
        return make_surface(kind, float(param))
    if param:
        raise ValueError(f"surface {name} takes no parameter")
    return make_surface(kind)


@dataclass(frozen=True)
class ChartMap:
    """A smooth map of the plane with its first and second derivatives.

    ``jacobian(x)[l, i] = d_i phi^l`` and ``second_partials(x)[l, i, j] = d_i d_j phi^l``.
    """

    forward: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    second_partials: Callable[[np.ndarray], np.ndarray]
    inverse: Optional[Callable[[np.ndarray], np.ndarray]] = None
    domain: Optional[Callable[[np.ndarray], bool]] = None
    label: str = "map"

    def __call__(self, p) -> np.ndarray:
        return np.asarray(self.forward(as_point(p)), dtype=float)

    @classmethod
    def from_exprs(cls, components, inverse=None, domain=None, label=None) -> "ChartMap":
        fwd, jac, hes = lambdify_map(components)
        inv = None
        if inverse is not None:
            inv, _, _ = lambdify_map(inverse)
        return cls(fwd, jac, hes, inv, domain, label or str(tuple(components)))

    @classmethod
    def identity(cls) -> "ChartMap":
        return cls(
            lambda p: np.array(p, dtype=float),
            lambda p: np.eye(2),
            lambda p: np.zeros((2, 2, 2)),
            lambda p: np.array(p, dtype=float),
            label="id",
        )

    def after(self, inner: "ChartMap") -> "ChartMap":
        """The composite ``self o inner``."""
        outer = self

        def fwd(p):
            return outer.forward(inner.forward(p))

        def jac(p):
            return np.asarray(outer.jacobian(inner.forward(p))) @ np.asarray(inner.jacobian(p))

        def hes(p):
            q = inner.forward(p)
            ji = np.asarray(inner.jacobian(p))
            return np.einsum("lmn,mi,nj->lij", outer.second_partials(q), ji, ji) + np.einsum(
                "lm,mij->lij", outer.jacobian(q), inner.second_partials(p)
            )

        inv = None
        if outer.inverse is not None and inner.inverse is not None:
            inv = lambda p: inner.inverse(outer.inverse(p))  # noqa: E731
        return ChartMap(fwd, jac, hes, inv, inner.domain, f"{outer.label} o {inner.label}")


def exp_chart() -> ChartMap:
    """``(u1, u2) -> (exp(u1), u2)``, embedding ``M0(c)`` in the half plane ``x1 > 0`` of ``M(c)``."""
    return ChartMap.from_exprs(
        [sp.exp(x1), x2], inverse=[sp.log(x1), x2], label="exp-chart"
    )


def log_chart() -> ChartMap:
    """Inverse of :func:`exp_chart`; defined for ``x1 > 0`` only."""
    return ChartMap.from_exprs(
        [sp.log(x1), x2], inverse=[sp.exp(x1), x2], domain=lambda p: p[0] > 0, label="log-chart"
    )


def twist_chart(c: float) -> ChartMap:
    """``(x1, x2) -> (exp(c x2) x1, x2)``."""
    return ChartMap.from_exprs(
        [sp.exp(c * x2) * x1, x2], inverse=[sp.exp(-c * x2) * x1, x2], label=f"twist:{c:g}"
    )


def pullback_connection(conn: ConnectionField, phi: ChartMap, *, cond_limit: float = 1e12) -> ConnectionField:
    """Connection ``phi^* conn`` on the source chart of ``phi``.

    Uses the transformation law
    ``G~_ij^k = (J^-1)^k_l (d_i d_j phi^l + G_mn^l(phi(x)) J^m_i J^n_j)``.
    Derivatives of the result are taken by finite differences.
    """

    def evaluate(p):
        J = np.asarray(phi.jacobian(p), dtype=float)
        if not np.all(np.isfinite(J)) or np.linalg.cond(J) > cond_limit:
            raise SingularJacobianError(f"jacobian of {phi.label} is singular at {fmt_point(p)}")
        G = conn.gamma(phi.forward(p))
        inner = np.asarray(phi.second_partials(p), dtype=float) + np.einsum("mnl,mi,nj->lij", G, J, J)
        return np.einsum("kl,lij->ijk", np.linalg.inv(J), inner)

    def domain(p):
        if phi.domain is not None and not phi.domain(p):
            return False
        return conn.domain is None or bool(conn.domain(np.asarray(phi.forward(p), dtype=float)))

    return ConnectionField(evaluate, domain=domain, label=f"({phi.label})^*{conn.label}")


def projective_modify(conn: ConnectionField, f: ScalarField) -> ConnectionField:
    """``nabla~_X Y = nabla_X Y + X(f) Y + Y(f) X``.

    Coefficients ``G~_ij^k = G_ij^k + delta_i^k d_j f + delta_j^k d_i f``.  First
    partials stay analytic when ``conn`` has them; second partials fall back to
    differencing.
    """
    eye = np.eye(2)

    def shift(df):
        return np.einsum("ik,j->ijk", eye, df) + np.einsum("jk,i->ijk", eye, df)

    def evaluate(p):
        return conn.gamma(p) + shift(np.asarray(f.grad(p), dtype=float))

    partials = None
    if conn.analytic:
        def partials(p):
            H = np.asarray(f.hess(p), dtype=float)
            return conn.dgamma(p) + np.einsum("ik,mj->mijk", eye, H) + np.einsum("jk,mi->mijk", eye, H)

    return ConnectionField(evaluate, partials, domain=conn.domain, label=f"{conn.label} + d({f.label})")


def pullback_scalar(f: ScalarField, phi: ChartMap) -> ScalarField:
    """``f o phi`` with chain-rule derivatives."""

    def value(p):
        return f.value(phi.forward(p))

    def grad(p):
        return np.asarray(phi.jacobian(p)).T @ np.asarray(f.grad(phi.forward(p)))

    def hess(p):
        q = phi.forward(p)
        J = np.asarray(phi.jacobian(p))
        return J.T @ np.asarray(f.hess(q)) @ J + np.einsum("l,lij->ij", f.grad(q), phi.second_partials(p))

    return ScalarField(value, grad, hess, label=f"{f.label} o {phi.label}")


def sample_points(n: int = 12, seed: int = SPAN_SEED, box: float = 2.0) -> np.ndarray:
    """Seeded uniform points in ``[-box, box]^2``."""
    return np.random.default_rng(seed).uniform(-box, box, size=(n, 2))


def _value_matrix(basis, sample) -> np.ndarray:
    A = np.array([[f.value(p) for f in basis] for p in sample], dtype=float)
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    return A / norms


def _rank(A: np.ndarray, rtol: float) -> int:
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def qe_span_equal(basis_a: Sequence[ScalarField], basis_b: Sequence[ScalarField], sample=None, *, rtol: float = SPAN_RTOL) -> bool:
    """Whether two finite families of functions span the same space on the sample.

    Decided by ranks of the sampled value matrices: ``span A == span B`` iff
    ``rank A == rank B == rank [A | B]``.
    """
    sample = sample_points() if sample is None else np.asarray(sample, dtype=float)
    if len(sample) < 6:
        raise InconclusiveSpanError(f"need at least 6 sample points, got {len(sample)}")
    A = _value_matrix(basis_a, sample)
    B = _value_matrix(basis_b, sample)
    ra, rb = _rank(A, rtol), _rank(B, rtol)
    if ra < A.shape[1] or rb < B.shape[1]:
        raise InconclusiveSpanError(
            f"evaluation matrix is rank deficient (rank {ra}/{A.shape[1]}, {rb}/{B.shape[1]}); "
            "use more or better spread sample points"
        )
    if ra != rb:
        return False
    return _rank(np.hstack([A, B]), rtol) == ra


def z3_rotation() -> np.ndarray:
    """The order-three linear map ``e1 -> e2 -> -e1 - e2 -> e1``.

    It permutes the exponent covectors ``(1, 0), (0, 1), (-1, -1)`` of the
    Z3 quasi-Einstein basis.  The induced map of the plane is its transpose,
    see :func:`z3_chart`.
    """
    return np.array([[0, -1], [1, -1]], dtype=np.int64)


def z3_chart() -> "ChartMap":
    """``x -> T^t x``; pulling ``exp(l . x)`` back by it gives ``exp((T l) . x)``."""
    return linear_chart(z3_rotation().T)


def linear_chart(T) -> ChartMap:
    T = np.asarray(T, dtype=float)
    Tinv = np.linalg.inv(T)
    return ChartMap(
        lambda p: T @ np.asarray(p, dtype=float),
        lambda p: T.copy(),
        lambda p: np.zeros((2, 2, 2)),
        lambda p: Tinv @ np.asarray(p, dtype=float),
        label=f"linear{T.tolist()}",
    )
