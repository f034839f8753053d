import numpy as np
import pytest
import sympy as sp

from affinezoll import (
    ConnectionField,
    DegenerateInvariantError,
    ScalarField,
    alpha_invariant,
    christoffel_at,
    curvature_at,
    hessian,
    nabla_ricci_at,
    quasi_einstein_residual,
    ricci_at,
)
from affinezoll._symbolic import x1, x2
from affinezoll.core import FD_TOL

from conftest import surface

CS = [0.0, 0.3, 1.0, 2.5]


def test_christoffel_mc_values():
    g = christoffel_at(surface("Mc", 1.0).conn, (2, 0.7))
    expected = np.zeros((2, 2, 2))
    expected[1, 1, 0] = 4.0
    expected[1, 1, 1] = 2.0
    assert np.array_equal(g, expected)


def test_christoffel_m0_at_origin_vanishes():
    for y in (-3.0, 0.0, 11.0):
        assert not christoffel_at(surface("Mc", 0.0).conn, (0, y)).any()


def test_christoffel_z3_ordering():
    g = christoffel_at(surface("Z3").conn, (0.4, -1.0))
    six = (g[0, 0, 0], g[0, 0, 1], g[0, 1, 0], g[0, 1, 1], g[1, 1, 0], g[1, 1, 1])
    np.testing.assert_allclose(six, np.array([1, -2, -1, -1, -2, 1]) / 3, atol=1e-15)


def test_torsion_free_exact(rng):
    for kind, c in [("Mc", 0.0), ("Mc", 1.3), ("M0c", 0.5), ("Z3", 0.0), ("flat", 0.0)]:
        conn = surface(kind, c).conn
        for p in rng.uniform(-3, 3, size=(10_000, 2)):
            g = conn.gamma(p)
            assert np.array_equal(g, g.swapaxes(0, 1))


def test_asymmetric_input_is_symmetrized():
    raw = np.zeros((2, 2, 2))
    raw[0, 1, 0] = 1.0
    conn = ConnectionField(lambda p: raw)
    g = conn.gamma((0, 0))
    assert g[0, 1, 0] == g[1, 0, 0] == 0.5


@pytest.mark.parametrize("h", [1e-3, 1e-4])
def test_fd_partials_second_order(rng, h):
    # a connection with curvature in every coefficient, so truncation error is visible
    exprs = [[[sp.sin(x1) * x2, sp.exp(x2 / 2)], [sp.cos(x1 + x2), x1**3]], [[0, 0], [x1 * x2**2, sp.sin(x2)]]]
    exprs[1][0] = exprs[0][1]
    from affinezoll.surfaces import connection_from_exprs

    exact = connection_from_exprs(exprs, "test")
    fd = ConnectionField(exact.evaluate, h=h)
    for p in rng.uniform(-3, 3, size=(30, 2)):
        d_exact = exact.dgamma(p)
        scale = max(1.0, np.abs(d_exact).max())
        assert np.abs(fd.dgamma(p) - d_exact).max() <= 10 * h * h * scale * 30


def test_curvature_mc_matches_symbolic_oracle(rng):
    # oracle: R(d1, d2) d2 = (1 + c^2) d1 from nabla_1 nabla_2 d2 - nabla_2 nabla_1 d2
    for c in CS:
        for p in rng.uniform(-3, 3, size=(10, 2)):
            R = curvature_at(surface("Mc", c).conn, p)
            np.testing.assert_allclose(R[:, 1, 0, 1], [1 + c * c, 0.0], atol=1e-12)
            np.testing.assert_allclose(R[:, 0, 0, 1], [0.0, 0.0], atol=1e-12)


def test_curvature_fd_path_agrees(rng):
    conn = surface("Mc", 1.0).conn
    for p in rng.uniform(-3, 3, size=(10, 2)):
        np.testing.assert_allclose(curvature_at(conn.finite_difference(), p), curvature_at(conn, p), atol=FD_TOL)


def test_curvature_antisymmetric(rng):
    conn = surface("Z3").conn
    exprs = [[[x2, x1 * x2], [sp.sin(x1), 0]], [[sp.sin(x1), 0], [x1**2, sp.cos(x2)]]]
    from affinezoll.surfaces import connection_from_exprs

    for conn in (conn, connection_from_exprs(exprs, "wavy")):
        for p in rng.uniform(-2, 2, size=(10, 2)):
            R = curvature_at(conn, p)
            assert np.array_equal(R, -R.transpose(0, 1, 3, 2))


def test_flat_curvature_zero():
    assert not curvature_at(surface("flat").conn, (1.0, 2.0)).any()


@pytest.mark.parametrize("c", CS)
def test_ricci_reproduction(rng, c):
    conn = surface("Mc", c).conn
    target = np.diag([0.0, 1 + c * c])
    for p in rng.uniform(-3, 3, size=(100, 2)):
        rho, rho_s = ricci_at(conn, p)
        np.testing.assert_allclose(rho, target, atol=1e-10, rtol=0)
        assert np.array_equal(rho_s, 0.5 * (rho + rho.T))


def test_ricci_examples():
    rho, _ = ricci_at(surface("Mc", 2.0).conn, (0.3, -4.0))
    np.testing.assert_allclose(rho, [[0, 0], [0, 5]], atol=1e-12)
    assert not ricci_at(surface("flat").conn, (1, 1))[0].any()
    rho, _ = ricci_at(surface("Z3").conn, (5, -1))
    np.testing.assert_allclose(rho, np.array([[-2, -1], [-1, -2]]) / 3, atol=1e-12)


def test_ricci_general_connection_matches_oracle():
    from oracles import ricci as oracle_ricci, X1, X2
    from affinezoll.surfaces import connection_from_exprs

    exprs = [[[X2, X1 * X2], [sp.sin(X1), X1]], [[sp.sin(X1), X1], [X1**2, sp.cos(X2)]]]
    ref = sp.lambdify((X1, X2), oracle_ricci(exprs))
    conn = connection_from_exprs(exprs, "wavy")
    for p in [(0.3, -0.2), (1.1, 2.0), (-1.5, 0.7)]:
        np.testing.assert_allclose(ricci_at(conn, p)[0], np.array(ref(*p), dtype=float), atol=1e-12)


@pytest.mark.parametrize("c", CS)
def test_nabla_ricci_mc(rng, c):
    conn = surface("Mc", c).conn
    for p in rng.uniform(-3, 3, size=(10, 2)):
        nr = nabla_ricci_at(conn, p)
        expected = np.zeros((2, 2, 2))
        expected[1, 1, 1] = -4 * c * (1 + c * c)
        np.testing.assert_allclose(nr, expected, atol=1e-10)
        np.testing.assert_allclose(nabla_ricci_at(conn.finite_difference(), p), expected, atol=FD_TOL * 10)


def test_nabla_ricci_general_connection_matches_oracle():
    from oracles import nabla_ricci as oracle_nr, X1, X2
    from affinezoll.surfaces import connection_from_exprs

    exprs = [[[X2, X1 * X2], [sp.sin(X1), X1]], [[sp.sin(X1), X1], [X1**2, sp.cos(X2)]]]
    ref = oracle_nr(exprs)
    conn = connection_from_exprs(exprs, "wavy")
    for p in [(0.3, -0.2), (1.1, 2.0)]:
        got = nabla_ricci_at(conn, p)
        for (i, j, m), expr in ref.items():
            assert got[i, j, m] == pytest.approx(float(expr.subs({X1: p[0], X2: p[1]})), abs=1e-10)


def test_affine_symmetry_criterion():
    grid = [(x, y) for x in np.linspace(-3, 3, 7) for y in np.linspace(-3, 3, 7)]
    assert max(np.abs(nabla_ricci_at(surface("Mc", 0.0).conn, p)).max() for p in grid) < 1e-10
    for c in (0.1, 0.5, 2.0):
        assert max(np.abs(nabla_ricci_at(surface("Mc", c).conn, p)).max() for p in grid) > 0.1


@pytest.mark.parametrize("c", CS)
def test_alpha_constant(rng, c):
    conn = surface("Mc", c).conn
    vals = [alpha_invariant(conn, p) for p in rng.uniform(-3, 3, size=(20, 2))]
    np.testing.assert_allclose(vals, 16 * c * c / (1 + c * c), atol=1e-9, rtol=0)


def test_alpha_values():
    assert alpha_invariant(surface("Mc", 1.0).conn, (0.2, 0.2)) == pytest.approx(8.0, abs=1e-12)
    assert alpha_invariant(surface("Mc", 2.0).conn, (1, 1)) == pytest.approx(12.8, abs=1e-12)
    assert alpha_invariant(surface("Mc", 0.0).conn, (1, 1)) == 0.0


def test_alpha_flat_raises():
    with pytest.raises(DegenerateInvariantError, match="rho_22 = 0"):
        alpha_invariant(surface("flat").conn, (0, 0))


def test_hessian_examples(rng):
    for c in CS:
        f = ScalarField.from_expr(x1)
        for p in rng.uniform(-3, 3, size=(5, 2)):
            H = hessian(surface("Mc", c).conn, f, p)
            np.testing.assert_allclose(H, [[0, 0], [0, -(1 + c * c) * p[0]]], atol=1e-12)
    one = ScalarField.constant(3.0)
    assert not hessian(surface("Z3").conn, one, (1, 2)).any()
    assert not hessian(surface("Mc", 0.0).conn, ScalarField.from_expr(x2), (0.5, 1.0)).any()


def test_hessian_symmetric(rng):
    f = ScalarField.from_expr(sp.sin(x1 * x2) + x1**3)
    for kind, c in [("Mc", 1.0), ("Z3", 0.0), ("M0c", 2.0)]:
        for p in rng.uniform(-2, 2, size=(20, 2)):
            H = hessian(surface(kind, c).conn, f, p)
            assert np.array_equal(H, H.T)


@pytest.mark.parametrize("kind,c", [("Mc", c) for c in CS] + [("M0c", c) for c in CS] + [("Z3", 0.0), ("flat", 0.0)])
def test_quasi_einstein_basis(rng, kind, c):
    s = surface(kind, c)
    for f in s.qe_basis:
        for p in rng.uniform(-3, 3, size=(100, 2)):
            assert np.abs(quasi_einstein_residual(s.conn, f, p)).max() < 1e-10


def test_quasi_einstein_negative_control():
    res = quasi_einstein_residual(surface("Mc", 0.0).conn, ScalarField.from_expr(x2), (0, 1))
    np.testing.assert_allclose(res, [[0, 0], [0, 1]], atol=1e-14)


def test_scalar_times_exp_derivatives(rng):
    g = ScalarField.from_expr(sp.sin(x1) * x2)
    f = ScalarField.from_expr(x1 * x2 - x2**2)
    ref = ScalarField.from_expr(sp.exp(x1 * x2 - x2**2) * sp.sin(x1) * x2)
    h = g.times_exp(f)
    for p in rng.uniform(-1, 1, size=(10, 2)):
        assert h.value(p) == pytest.approx(ref.value(p), rel=1e-12)
        np.testing.assert_allclose(h.grad(p), ref.grad(p), rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(h.hess(p), ref.hess(p), rtol=1e-12, atol=1e-14)


def test_point_validation():
    conn = surface("flat").conn
    with pytest.raises(ValueError):
        christoffel_at(conn, (1.0, float("nan")))
    with pytest.raises(ValueError):
        christoffel_at(conn, (1.0, 2.0, 3.0))
