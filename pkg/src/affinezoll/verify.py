"""Self-checks over the invariants of the library, reported as flat records."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import alpha_invariant, christoffel_at, hessian, nabla_ricci_at, quasi_einstein_residual, ricci_at
from .quotients import Outcome, almost_zoll_sweep, cylinder, deck_square_defect, equivariance_check, moebius
from .surfaces import Kind, SurfaceFamily
from .symmetry import (
    AffineMapParams,
    a412_basis_change,
    a412_table,
    check_T,
    compose_T,
    invert_T,
    killing_basis,
    killing_residual,
    pullback_defect,
    structure_constants,
)

SUITES = ("core", "symmetry", "quotient")


@dataclass
class Check:
    id: str
    description: str
    residual: float
    tolerance: float
    pass_: bool

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("pass_")
        return d


def _check(id, description, residual, tolerance) -> Check:
    residual = float(residual)
    return Check(id, description, residual, tolerance, bool(residual <= tolerance))


def _points(rng, n, box=3.0):
    return rng.uniform(-box, box, size=(n, 2))


def core_suite(surface: SurfaceFamily, rng) -> list[Check]:
    conn = surface.conn
    pts = _points(rng, 100)
    out = []
    g = [christoffel_at(conn, p) for p in pts]
    out.append(_check("torsion_free", "Gamma_ij^k == Gamma_ji^k exactly",
                      max(np.abs(x - x.swapaxes(0, 1)).max() for x in g), 0.0))
    fd = conn.finite_difference()
    out.append(_check("fd_partials", "analytic dGamma vs central differences",
                      max(np.abs(conn.dgamma(p) - fd.dgamma(p)).max() for p in pts[:20]), 1e-6))
    out.append(_check("hessian_symmetric", "affine Hessian of each quasi-Einstein basis function is symmetric",
                      max(np.abs((h := hessian(conn, f, p)) - h.T).max() for f in surface.qe_basis for p in pts[:20]), 0.0))
    out.append(_check("quasi_einstein_basis", "H f + f rho_s = 0 for the listed basis",
                      max(np.abs(quasi_einstein_residual(conn, f, p)).max() for f in surface.qe_basis for p in pts), 1e-10))
    if surface.kind in (Kind.Mc, Kind.M0c):
        c = surface.c
        target = np.array([[0.0, 0.0], [0.0, 1 + c * c]])
        out.append(_check("ricci", "rho = (1 + c^2) dx2 (x) dx2",
                          max(np.abs(ricci_at(conn, p)[0] - target).max() for p in pts), 1e-10))
        expected = 16 * c * c / (1 + c * c)
        alphas = [alpha_invariant(conn, p) for p in pts[:20]]
        out.append(_check(f"alpha={expected:.12g}", "alpha = 16 c^2 / (1 + c^2) at every sample",
                          max(abs(a - expected) for a in alphas), 1e-9))
        nab = max(np.abs(nabla_ricci_at(conn, p)).max() for p in pts[:20])
        if c == 0:
            out.append(_check("affine_symmetric", "nabla rho = 0 for c = 0", nab, 1e-10))
        else:
            out.append(_check("not_affine_symmetric", "nabla rho(d2,d2;d2) = -4c(1+c^2)",
                              max(abs(nabla_ricci_at(conn, p)[1, 1, 1] + 4 * c * (1 + c * c)) for p in pts[:20]), 1e-9))
    elif surface.kind is Kind.Z3:
        target = np.array([[-2.0, -1.0], [-1.0, -2.0]]) / 3
        out.append(_check("ricci", "rho = (1/3)[[-2,-1],[-1,-2]]",
                          max(np.abs(ricci_at(conn, p)[0] - target).max() for p in pts), 1e-10))
    elif surface.kind is Kind.Flat:
        out.append(_check("ricci", "rho = 0",
                          max(np.abs(ricci_at(conn, p)[0]).max() for p in pts), 1e-12))
    return out


def _random_params(rng, signed=True) -> AffineMapParams:
    a, b, g, d = rng.uniform(-2, 2, 4)
    sign = int(rng.choice([-1, 1])) if signed else 1
    return AffineMapParams(a, b, g, d, sign)


def _require_mc(surface: SurfaceFamily, suite: str) -> None:
    if surface.kind is not Kind.Mc:
        raise ValueError(f"the {suite} suite applies to Mc surfaces only")


def symmetry_suite(surface: SurfaceFamily, rng) -> list[Check]:
    _require_mc(surface, "symmetry")
    c, conn = surface.c, surface.conn
    out = []
    grid = [(x, y) for x in np.linspace(-3, 3, 10) for y in np.linspace(-3, 3, 10)]
    basis = killing_basis(c)
    out.append(_check("killing_residual", "L_X nabla = 0 for the four basis fields",
                      max(np.abs(killing_residual(conn, X, p)).max() for X in basis for p in grid), 1e-8))
    table = structure_constants(basis, _points(rng, 10, 2.0))
    out.append(_check("jacobi", "Jacobi identity of the structure constants", table.jacobi_defect(), 1e-10))
    moved = table.change_basis(a412_basis_change(c))
    out.append(_check("a412_table", "basis (f1, -f2, f3, f4 + c f3) realizes A_{4,12}",
                      np.abs(moved.table - a412_table().table).max(), 1e-10))
    assoc = inv = 0.0
    for _ in range(200):
        p, q, r = (_random_params(rng) for _ in range(3))
        lhs = compose_T(compose_T(p, q, c), r, c)
        rhs = compose_T(p, compose_T(q, r, c), c)
        assoc = max(assoc, max(abs(x - y) for x, y in zip(lhs, rhs)))
        e = compose_T(p, invert_T(p, c), c)
        inv = max(inv, max(abs(x - y) for x, y in zip(e, AffineMapParams())))
    out.append(_check("associativity", "(pq)r = p(qr) in parameters", assoc, 1e-12))
    out.append(_check("inverse", "p p^-1 = id in parameters", inv, 1e-12))
    pres = max(pullback_defect(conn, _random_params(rng, signed=False), c, _points(rng, 5)) for _ in range(20))
    out.append(_check("connection_preserved", "T^* nabla = nabla for random group elements", pres, 1e-9))
    return out


def quotient_suite(surface: SurfaceFamily, rng) -> list[Check]:
    _require_mc(surface, "quotient")
    c = surface.c
    cyl, moe = cylinder(surface), moebius(surface)
    out = []
    pts = _points(rng, 50)
    for q in (cyl, moe):
        out.append(_check(f"deck_affine_{q.name}", "deck map preserves the connection",
                          pullback_defect(surface.conn, q.deck, c, pts), 1e-10))
    out.append(_check("psi_squared_is_phi", "Psi o Psi = Phi exactly", deck_square_defect(moe), 0.0))
    if c == 0:
        worst = max(equivariance_check(cyl, _random_params(rng, signed=False), c, pts[:10]) for _ in range(20))
        out.append(_check("phi_central", "Phi commutes with G(0)", worst, 1e-12))
    scale = float(rng.uniform(0.5, 2.0))
    out.append(_check("check_T_commutes", "(x1, x2) -> (a x1, x2 + d) commutes with Phi",
                      equivariance_check(cyl, check_T(scale, 0.7), c, pts[:10]), 1e-12))
    sweep = almost_zoll_sweep(cyl, (0.0, 0.0), 16)
    if c == 0:
        out.append(_check("almost_zoll_cylinder", sweep.summary_line(), 0.0 if sweep.almost_zoll else 1.0, 0.0))
        mob = almost_zoll_sweep(moe, (1.0, 0.0), 16)
        out.append(_check("almost_zoll_moebius", mob.summary_line(), 0.0 if mob.almost_zoll else 1.0, 0.0))
    else:
        bad = sum(1 for r in sweep.reports if r.outcome not in (Outcome.Alienated, Outcome.ReturnsToBase))
        out.append(_check("returns_to_base", sweep.summary_line(), float(bad), 0.0))
    return out


def run_suite(surface: SurfaceFamily, suite: str = "all", seed: int = 0) -> list[Check]:
    if suite == "all":
        names = SUITES if surface.kind is Kind.Mc else ("core",)
    else:
        names = (suite,)
    fns = {"core": core_suite, "symmetry": symmetry_suite, "quotient": quotient_suite}
    out = []
    for name in names:
        if name not in fns:
            raise ValueError(f"unknown suite {name!r}; expected one of {SUITES + ('all',)}")
        out += fns[name](surface, np.random.default_rng(seed))
    return out
