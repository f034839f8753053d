"""Curvature of M(c): Ricci tensor, its derivative and the invariant alpha.

The Ricci tensor of M(c) is 2 dx2 (x) dx2 at every point, and the ratio
alpha = (nabla rho)_222^2 / rho_22^3 is the constant 16 c^2 / (1 + c^2).
Distinct alpha values mean the surfaces are pairwise non-isomorphic.
"""
import numpy as np

from affinezoll import alpha_invariant, make_surface, nabla_ricci_at, ricci_at

for c in (0.0, 0.5, 1.0, 2.0):
    conn = make_surface("Mc", c).conn
    rho, _ = ricci_at(conn, (0.7, -1.3))
    nr = nabla_ricci_at(conn, (0.7, -1.3))
    print(f"c={c:<4} rho=\n{np.round(rho, 12)}")
    print(f"       (nabla rho)_222 = {nr[1, 1, 1]:+.6f}")
    print(f"       alpha = {alpha_invariant(conn, (0.7, -1.3)):.6f}  expected {16 * c**2 / (1 + c**2):.6f}")
