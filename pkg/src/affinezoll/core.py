"""Coordinate tensor calculus for torsion-free connections on a 2D chart.

Index conventions (zero based, ``0 -> x1``, ``1 -> x2``):

* ``gamma[i, j, k]``        = Gamma_ij^k
* ``dgamma[m, i, j, k]``    = d_m Gamma_ij^k
* ``d2gamma[n, m, i, j, k]`` = d_n d_m Gamma_ij^k
* ``R[l, k, i, j]``         = component l of R(d_i, d_j) d_k
* ``rho[j, k]``             = rho(d_j, d_k) = tr(X -> R(X, d_j) d_k)
* ``nabla_rho[i, j, m]``    = (nabla rho)(d_i, d_j; d_m)

The Ricci trace is taken over the *first* curvature slot.  Tracing over the
last slot (``Z -> R(X, Y) Z``) would give an antisymmetric tensor, which for
``M(c)`` vanishes identically instead of reproducing ``(1 + c^2) dx2 (x) dx2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

FD_STEP = 1e-5
FD_STEP_SECOND = 1e-4

ANALYTIC_TOL = 1e-9
FD_TOL = 1e-6


class GeometryError(Exception):
    """Base class for errors raised by this package."""


class ChartDomainError(GeometryError, ValueError):
    """A point lies outside the chart domain of a connection or map."""


class DegenerateInvariantError(GeometryError, ArithmeticError):
    """An invariant quotient has a vanishing denominator."""


def as_point(p: Sequence[float]) -> np.ndarray:
    """Return ``p`` as a finite float array of shape ``(2,)``."""
    x = np.asarray(p, dtype=float)
    if x.shape != (2,):
        raise ValueError(f"expected a point with two coordinates, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"point has non-finite coordinates: {x}")
    return x


def fmt_point(p) -> str:
    x = np.asarray(p, dtype=float)
    return f"({x[0]:.12g}, {x[1]:.12g})"


def sym(m: np.ndarray) -> np.ndarray:
    """Symmetric part of a bilinear form."""
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)


def _symmetrize_lower(g: np.ndarray) -> np.ndarray:
    # exact for inputs that are already symmetric in (i, j)
    return 0.5 * (g + g.swapaxes(-3, -2))


def _central(fn: Callable[[np.ndarray], np.ndarray], p: np.ndarray, h: float) -> np.ndarray:
    out = []
    for m in range(2):
        e = np.zeros(2)
        e[m] = h
        out.append((np.asarray(fn(p + e)) - np.asarray(fn(p - e))) / (2 * h))
    return np.stack(out)


def _central_second(fn: Callable[[np.ndarray], np.ndarray], p: np.ndarray, h: float) -> np.ndarray:
    rows = []
    for n in range(2):
        row = []
        for m in range(2):
            en = np.zeros(2)
            em = np.zeros(2)
            en[n] = h
            em[m] = h
            val = (fn(p + en + em) - fn(p + en - em) - fn(p - en + em) + fn(p - en - em)) / (4 * h * h)
            row.append(np.asarray(val))
        rows.append(np.stack(row))
    return np.stack(rows)


@dataclass(frozen=True)
class ConnectionField:
    """A torsion-free connection given by its Christoffel symbols on a chart.

    Parameters
    ----------
    evaluate : callable
        ``p -> gamma`` with ``gamma[i, j, k] = Gamma_ij^k``.
    partials : callable, optional
        ``p -> dgamma`` with ``dgamma[m, i, j, k] = d_m Gamma_ij^k``.  Central
        differences of ``evaluate`` are used when omitted.
    second_partials : callable, optional
        ``p -> d2gamma``.  Falls back to differencing ``partials`` (or a
        second-order stencil on ``evaluate`` if ``partials`` is also missing).
    domain : callable, optional
        Predicate on points; ``ChartDomainError`` is raised where it fails.
    label : str
        Identifier of the family and its parameters.
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    partials: Optional[Callable[[np.ndarray], np.ndarray]] = None
    second_partials: Optional[Callable[[np.ndarray], np.ndarray]] = None
    domain: Optional[Callable[[np.ndarray], bool]] = None
    label: str = "custom"
    h: float = FD_STEP
    h2: float = FD_STEP_SECOND

    @property
    def analytic(self) -> bool:
        return self.partials is not None

    def check_domain(self, p) -> np.ndarray:
        x = as_point(p)
        if self.domain is not None and not self.domain(x):
            raise ChartDomainError(f"{fmt_point(x)} is outside the chart domain of {self.label}")
        return x

    def gamma(self, p) -> np.ndarray:
        x = self.check_domain(p)
        return _symmetrize_lower(np.asarray(self.evaluate(x), dtype=float).reshape(2, 2, 2))

    def dgamma(self, p) -> np.ndarray:
        x = self.check_domain(p)
        if self.partials is not None:
            d = np.asarray(self.partials(x), dtype=float).reshape(2, 2, 2, 2)
        else:
            d = _central(lambda q: np.asarray(self.evaluate(q), dtype=float).reshape(2, 2, 2), x, self.h)
        return _symmetrize_lower(d)

    def d2gamma(self, p) -> np.ndarray:
        x = self.check_domain(p)
        if self.second_partials is not None:
            d2 = np.asarray(self.second_partials(x), dtype=float).reshape(2, 2, 2, 2, 2)
        elif self.partials is not None:
            d2 = _central(lambda q: np.asarray(self.partials(q), dtype=float).reshape(2, 2, 2, 2), x, self.h)
        else:
            d2 = _central_second(lambda q: np.asarray(self.evaluate(q), dtype=float).reshape(2, 2, 2), x, self.h2)
        return _symmetrize_lower(d2)

    def finite_difference(self) -> "ConnectionField":
        """Same Christoffel symbols, with all derivatives taken numerically."""
        return ConnectionField(self.evaluate, domain=self.domain, label=self.label + " [fd]", h=self.h, h2=self.h2)


@dataclass(frozen=True)
class ScalarField:
    """A scalar function with analytic first and second partials."""

    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]
    label: str = field(default="f")

    def __call__(self, p) -> float:
        return float(self.value(as_point(p)))

    @classmethod
    def constant(cls, k: float) -> "ScalarField":
        return cls(lambda p: k, lambda p: np.zeros(2), lambda p: np.zeros((2, 2)), label=repr(k))

    @classmethod
    def from_expr(cls, expr, label: Optional[str] = None) -> "ScalarField":
        """Build from a sympy expression in the symbols ``x1, x2``."""
        from ._symbolic import lambdify_scalar

        value, grad, hess = lambdify_scalar(expr)
        return cls(value, grad, hess, label=label or str(expr))

    def times_exp(self, f: "ScalarField") -> "ScalarField":
        """The field ``exp(f) * self`` with derivatives by the product rule."""
        g = self

        def value(p):
            return np.exp(f.value(p)) * g.value(p)

        def grad(p):
            return np.exp(f.value(p)) * (np.asarray(g.grad(p)) + g.value(p) * np.asarray(f.grad(p)))

        def hess(p):
            df = np.asarray(f.grad(p), dtype=float)
            dg = np.asarray(g.grad(p), dtype=float)
            h = (
                np.asarray(g.hess(p))
                + np.outer(dg, df)
                + np.outer(df, dg)
                + g.value(p) * (np.asarray(f.hess(p)) + np.outer(df, df))
            )
            return np.exp(f.value(p)) * h

        return ScalarField(value, grad, hess, label=f"exp({f.label})*({g.label})")


def christoffel_at(conn: ConnectionField, p) -> np.ndarray:
    """All eight Christoffel symbols at ``p``, ``gamma[i, j, k] = Gamma_ij^k``."""
    return conn.gamma(p)


def _curvature(g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    # R = T - T^t in (i, j) so antisymmetry is exact in floating point
    t = np.einsum("ijkl->lkij", dg) + np.einsum("iml,jkm->lkij", g, g)
    return t - t.transpose(0, 1, 3, 2)


def curvature_at(conn: ConnectionField, p) -> np.ndarray:
    """Curvature ``R[l, k, i, j]``: component ``l`` of ``R(d_i, d_j) d_k``."""
    return _curvature(conn.gamma(p), conn.dgamma(p))


def _ricci(R: np.ndarray) -> np.ndarray:
    return np.einsum("ikij->jk", R)


def ricci_at(conn: ConnectionField, p) -> tuple[np.ndarray, np.ndarray]:
    """Ricci tensor and its symmetric part at ``p``."""
    rho = _ricci(curvature_at(conn, p))
    return rho, sym(rho)


def _ricci_gradient(g: np.ndarray, dg: np.ndarray, d2g: np.ndarray) -> np.ndarray:
    # d_n rho_jk, product rule applied to the curvature expansion
    dR = (
        np.einsum("nijkl->nlkij", d2g)
        - np.einsum("njikl->nlkij", d2g)
        + np.einsum("niml,jkm->nlkij", dg, g)
        + np.einsum("iml,njkm->nlkij", g, dg)
        - np.einsum("njml,ikm->nlkij", dg, g)
        - np.einsum("jml,nikm->nlkij", g, dg)
    )
    return np.einsum("nikij->njk", dR)


def nabla_ricci_at(conn: ConnectionField, p) -> np.ndarray:
    """Covariant derivative ``(nabla rho)[i, j, m] = (nabla_{d_m} rho)(d_i, d_j)``."""
    g = conn.gamma(p)
    dg = conn.dgamma(p)
    rho = _ricci(_curvature(g, dg))
    drho = _ricci_gradient(g, dg, conn.d2gamma(p))
    return (
        np.einsum("mij->ijm", drho)
        - np.einsum("mil,lj->ijm", g, rho)
        - np.einsum("mjl,il->ijm", g, rho)
    )


def alpha_invariant(conn: ConnectionField, p, *, eps: float = 1e-14) -> float:
    """``(nabla rho)(d2, d2; d2)^2 / rho(d2, d2)^3``.

    Constant on ``M(c)``, where it equals ``16 c^2 / (1 + c^2)``.
    """
    rho, _ = ricci_at(conn, p)
    r22 = rho[1, 1]
    if abs(r22) <= eps:
        raise DegenerateInvariantError(f"rho_22 = 0 at {fmt_point(p)}; alpha is undefined")
    n222 = nabla_ricci_at(conn, p)[1, 1, 1]
    return float(n222**2 / r22**3)


def hessian(conn: ConnectionField, f: ScalarField, p) -> np.ndarray:
    """Affine Hessian ``d_i d_j f - Gamma_ij^k d_k f``."""
    x = as_point(p)
    h = np.asarray(f.hess(x), dtype=float) - np.einsum("ijk,k->ij", conn.gamma(x), np.asarray(f.grad(x), dtype=float))
    return sym(h)


def quasi_einstein_residual(conn: ConnectionField, f: ScalarField, p) -> np.ndarray:
    """``H f + f rho_s``; vanishes where ``f`` solves the quasi-Einstein equation."""
    x = as_point(p)
    _, rho_s = ricci_at(conn, x)
    return hessian(conn, f, x) + f.value(x) * rho_s
