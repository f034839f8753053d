import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from affinezoll import ChartDomainError, ScalarField, christoffel_at, quasi_einstein_residual
from affinezoll._symbolic import x1, x2
from affinezoll.surfaces import (
    ChartMap,
    InconclusiveSpanError,
    SingularJacobianError,
    connection_from_exprs,
    exp_chart,
    linear_chart,
    log_chart,
    make_surface,
    parse_surface_id,
    projective_modify,
    pullback_connection,
    pullback_scalar,
    qe_span_equal,
    sample_points,
    twist_chart,
    z3_chart,
    z3_rotation,
)

from conftest import surface


def nonzero(g, tol=0.0):
    return {(i, j, k): g[i, j, k] for i in range(2) for j in range(i, 2) for k in range(2) if abs(g[i, j, k]) > tol}


def test_mc0_only_g22_1():
    assert nonzero(christoffel_at(surface("Mc", 0.0).conn, (1.5, 0.3))) == {(1, 1, 0): 1.5}


def test_m0c_constant_symbols():
    for p in [(0, 0), (-3, 7)]:
        assert nonzero(christoffel_at(surface("M0c", 1.0).conn, p)) == {(0, 0, 0): 1.0, (1, 1, 0): 2.0, (1, 1, 1): 2.0}


def test_flat_surface():
    s = surface("flat")
    assert not christoffel_at(s.conn, (4, 5)).any()
    assert [f.value(np.array([2.0, 3.0])) for f in s.qe_basis] == [1, 2, 3]


def test_negative_c_rejected():
    with pytest.raises(ValueError, match="reflect"):
        make_surface("Mc", -1.0)


@pytest.mark.parametrize(
    "text,kind,c",
    [("Mc:1.0", "Mc", 1.0), ("M0c:0.5", "M0c", 0.5), ("Z3", "Z3", 0.0), ("flat", "flat", 0.0), ("mc:0", "Mc", 0.0)],
)
def test_parse_surface_id(text, kind, c):
    s = parse_surface_id(text)
    assert s.kind.value == kind and s.c == c


@pytest.mark.parametrize("text", ["Mc", "Z3:1", "torus", "Mc:-1"])
def test_parse_surface_id_errors(text):
    with pytest.raises(ValueError):
        parse_surface_id(text)


CHARTS = [exp_chart(), log_chart(), twist_chart(0.7), twist_chart(2.0), linear_chart(z3_rotation())]


@pytest.mark.parametrize("phi", CHARTS, ids=lambda m: m.label)
def test_chart_jacobian_matches_fd(rng, phi):
    h = 1e-4
    for p in rng.uniform(0.2, 2, size=(10, 2)):
        fd = np.stack([(phi(p + h * e) - phi(p - h * e)) / (2 * h) for e in np.eye(2)], axis=1)
        J = phi.jacobian(p)
        assert np.abs(fd - J).max() <= 10 * h * h * max(1.0, np.abs(phi.second_partials(p)).max() * 100)
        fd2 = np.stack([(phi.jacobian(p + h * e) - phi.jacobian(p - h * e)) / (2 * h) for e in np.eye(2)], axis=2)
        np.testing.assert_allclose(fd2, phi.second_partials(p), atol=1e-6)


@pytest.mark.parametrize("phi", CHARTS, ids=lambda m: m.label)
def test_chart_inverse(rng, phi):
    for p in rng.uniform(0.2, 2, size=(10, 2)):
        np.testing.assert_allclose(phi.inverse(phi(p)), p, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("c", [0.0, 0.5, 1.0, 3.0])
def test_exp_pullback_is_m0c(rng, c):
    pb = pullback_connection(surface("Mc", c).conn, exp_chart())
    for p in rng.uniform(-2, 2, size=(20, 2)):
        np.testing.assert_allclose(christoffel_at(pb, p), christoffel_at(surface("M0c", c).conn, p), atol=1e-12)


def test_identity_pullback(rng):
    conn = surface("Z3").conn
    pb = pullback_connection(conn, ChartMap.identity())
    for p in rng.uniform(-2, 2, size=(10, 2)):
        assert np.array_equal(christoffel_at(pb, p), christoffel_at(conn, p))


@pytest.mark.parametrize("c", [0.3, 1.0, 2.0])
def test_twist_pullback_is_projective_modification(rng, c):
    pb = pullback_connection(surface("Mc", c).conn, twist_chart(c))
    mod = projective_modify(surface("Mc", 0.0).conn, ScalarField.from_expr(c * x2))
    for p in rng.uniform(-2, 2, size=(20, 2)):
        g = christoffel_at(pb, p)
        np.testing.assert_allclose(g, christoffel_at(mod, p), atol=1e-12)
        expected = {(0, 1, 0): c, (1, 1, 0): p[0], (1, 1, 1): 2 * c}
        got = nonzero(g, 1e-13)
        assert got.keys() == expected.keys()
        for key, val in expected.items():
            assert got[key] == pytest.approx(val, abs=1e-12)


def test_singular_jacobian():
    fold = ChartMap.from_exprs([x1**2, x2], label="fold")
    pb = pullback_connection(surface("flat").conn, fold)
    with pytest.raises(SingularJacobianError):
        christoffel_at(pb, (0.0, 1.0))


def test_log_chart_domain_error():
    pb = pullback_connection(surface("M0c", 1.0).conn, log_chart())
    with pytest.raises(ChartDomainError, match="outside the chart domain"):
        christoffel_at(pb, (-1.0, 0.0))
    christoffel_at(pb, (1.0, 0.0))


@pytest.mark.parametrize(
    "outer,inner",
    [(exp_chart(), twist_chart(0.5)), (twist_chart(1.0), linear_chart([[1, 2], [0, 1]])), (linear_chart(z3_rotation()), exp_chart())],
    ids=["exp-twist", "twist-shear", "rot-exp"],
)
def test_pullback_functorial(rng, outer, inner):
    conn = surface("Mc", 1.0).conn
    direct = pullback_connection(conn, outer.after(inner))
    nested = pullback_connection(pullback_connection(conn, outer), inner)
    for p in rng.uniform(-1.5, 1.5, size=(20, 2)):
        np.testing.assert_allclose(christoffel_at(direct, p), christoffel_at(nested, p), atol=1e-9)


def test_projective_zero_is_identity(rng):
    conn = surface("Z3").conn
    mod = projective_modify(conn, ScalarField.constant(0.0))
    for p in rng.uniform(-2, 2, size=(10, 2)):
        assert np.array_equal(christoffel_at(mod, p), christoffel_at(conn, p))


def test_projective_m0_example():
    mod = projective_modify(surface("Mc", 0.0).conn, ScalarField.from_expr(2 * x2))
    assert nonzero(christoffel_at(mod, (0.5, 9.0))) == {(0, 1, 0): 2.0, (1, 1, 0): 0.5, (1, 1, 1): 4.0}


coeff = st.floats(-1.5, 1.5, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(coeff, coeff, coeff, coeff, st.floats(-2, 2), st.floats(-2, 2))
def test_projective_round_trip(a, b, d, e, px, py):
    expr = a * x1 + b * x2 + d * sp.sin(x1 * x2) + e * x1**2
    f = ScalarField.from_expr(expr)
    g = ScalarField.from_expr(-expr)
    conn = surface("Mc", 1.0).conn
    back = projective_modify(projective_modify(conn, f), g)
    p = (px, py)
    assert np.abs(christoffel_at(back, p) - christoffel_at(conn, p)).max() < 1e-12


def test_projective_transforms_qe_space():
    rng = np.random.default_rng(7)
    for _ in range(10):
        c = rng.uniform(0, 2)
        a, b, d = rng.uniform(-1, 1, size=3)
        f = ScalarField.from_expr(a * x1 + b * x2 + d * x1 * x2)
        base = surface("Mc", 0.0)
        mod = projective_modify(base.conn, f)
        points = rng.uniform(-2, 2, size=(5, 2))
        for gfun in base.qe_basis:
            for p in points:
                assert np.abs(quasi_einstein_residual(base.conn, gfun, p)).max() < 1e-10
                assert np.abs(quasi_einstein_residual(mod, gfun.times_exp(f), p)).max() < 1e-8
        base = surface("Mc", round(c, 3))
        mod = projective_modify(base.conn, f)
        for gfun in base.qe_basis:
            for p in points:
                assert np.abs(quasi_einstein_residual(mod, gfun.times_exp(f), p)).max() < 1e-8


def test_span_equal_self():
    b = surface("Mc", 1.0).qe_basis
    assert qe_span_equal(b, b)


def test_span_c0_vs_c1_differs():
    assert not qe_span_equal(surface("Mc", 0.0).qe_basis, surface("Mc", 1.0).qe_basis)


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_span_twisted_basis(c):
    phi = twist_chart(c)
    pulled = [pullback_scalar(f, phi) for f in surface("Mc", c).qe_basis]
    ecx2 = ScalarField.from_expr(c * x2)
    scaled = [f.times_exp(ecx2) for f in surface("Mc", 0.0).qe_basis]
    assert qe_span_equal(pulled, scaled)


def test_span_is_order_and_scale_independent():
    b = surface("Z3").qe_basis
    other = [ScalarField.from_expr(sp.exp(x2) - 3 * sp.exp(x1)), ScalarField.from_expr(2 * sp.exp(-x1 - x2)), b[0]]
    assert qe_span_equal(b, other)


def test_span_inconclusive():
    b = surface("flat").qe_basis
    with pytest.raises(InconclusiveSpanError):
        qe_span_equal(b, b, sample=sample_points(4))
    collinear = [(t, t) for t in np.linspace(-1, 1, 8)]
    with pytest.raises(InconclusiveSpanError, match="rank deficient"):
        qe_span_equal(b, b, sample=collinear)


def test_sample_points_reproducible():
    assert np.array_equal(sample_points(), sample_points())
    assert np.all(np.abs(sample_points(100)) <= 2)


def test_z3_rotation_exact():
    T = z3_rotation()
    assert T.tolist() == [[0, -1], [1, -1]]
    assert np.array_equal(T @ T @ T, np.eye(2, dtype=np.int64))
    assert (T @ [1, 0]).tolist() == [0, 1]
    assert (T @ T @ T @ [7, -3]).tolist() == [7, -3]


def test_z3_rotation_permutes_basis():
    basis = surface("Z3").qe_basis
    pulled = [pullback_scalar(f, z3_chart()) for f in basis]
    rng = np.random.default_rng(3)
    pts = rng.uniform(-2, 2, size=(20, 2))
    vals = np.array([[f.value(p) for f in basis] for p in pts])
    pvals = np.array([[f.value(p) for f in pulled] for p in pts])
    # each pulled-back element equals exactly one original element
    perm = [int(np.argmin(np.abs(vals - pvals[:, [i]]).max(axis=0))) for i in range(3)]
    # e^{x1} -> e^{x2} -> e^{-x1-x2} -> e^{x1}
    assert perm == [1, 2, 0]
    np.testing.assert_allclose(pvals, vals[:, perm], rtol=1e-13)
    assert qe_span_equal(basis, pulled)


def test_z3_matrix_itself_is_not_a_coordinate_symmetry():
    basis = surface("Z3").qe_basis
    pulled = [pullback_scalar(f, linear_chart(z3_rotation())) for f in basis]
    assert not qe_span_equal(basis, pulled)


def test_z3_connection_invariant(rng):
    conn = surface("Z3").conn
    pb = pullback_connection(conn, z3_chart())
    for p in rng.uniform(-2, 2, size=(10, 2)):
        np.testing.assert_allclose(christoffel_at(pb, p), christoffel_at(conn, p), atol=1e-14)


def test_custom_connection_from_exprs():
    conn = connection_from_exprs([[[x2, 0], [0, 0]], [[0, 0], [0, x1]]], "custom")
    g = christoffel_at(conn, (2.0, 3.0))
    assert g[0, 0, 0] == 3.0 and g[1, 1, 1] == 2.0
    assert conn.dgamma((2.0, 3.0))[1, 0, 0, 0] == 1.0
