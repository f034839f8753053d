"""Sympy -> numpy evaluators with exact derivatives."""
from __future__ import annotations

import numpy as np
import sympy as sp

x1, x2 = sp.symbols("x1 x2", real=True)
COORDS = (x1, x2)


def _flat_fn(exprs, shape):
    exprs = [sp.sympify(e) for e in exprs]
    fn = sp.lambdify(COORDS, exprs, modules="numpy")

    def call(p):
        return np.array(fn(float(p[0]), float(p[1])), dtype=float).reshape(shape)

    return call


def lambdify_scalar(expr):
    expr = sp.sympify(expr)
    grad = [sp.diff(expr, v) for v in COORDS]
    hess = [sp.diff(g, v) for g in grad for v in COORDS]
    value_fn = sp.lambdify(COORDS, expr, modules="numpy")
    return (
        lambda p: float(value_fn(float(p[0]), float(p[1]))),
        _flat_fn(grad, (2,)),
        _flat_fn(hess, (2, 2)),
    )


def lambdify_connection(gamma):
    """``gamma[i][j][k]`` nested sympy expressions -> (evaluate, partials, second_partials)."""
    flat = [sp.sympify(gamma[i][j][k]) for i in range(2) for j in range(2) for k in range(2)]
    d1 = [sp.diff(e, v) for v in COORDS for e in flat]
    d2 = [sp.diff(e, w, v) for w in COORDS for v in COORDS for e in flat]
    return (
        _flat_fn(flat, (2, 2, 2)),
        _flat_fn(d1, (2, 2, 2, 2)),
        _flat_fn(d2, (2, 2, 2, 2, 2)),
    )


def lambdify_map(components):
    """Chart map ``(phi1, phi2)`` -> (forward, jacobian, second_partials)."""
    comps = [sp.sympify(e) for e in components]
    jac = [sp.diff(e, v) for e in comps for v in COORDS]
    hes = [sp.diff(e, v, w) for e in comps for v in COORDS for w in COORDS]
    return _flat_fn(comps, (2,)), _flat_fn(jac, (2, 2)), _flat_fn(hes, (2, 2, 2))
