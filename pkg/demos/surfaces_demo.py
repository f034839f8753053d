"""The surface catalog and the quasi-Einstein bases attached to each surface.

Each catalog surface carries a basis of solutions f of H f + f rho_s = 0,
where H is the affine Hessian and rho_s the symmetric Ricci tensor.
"""
import numpy as np

from affinezoll import make_surface, quasi_einstein_residual
from affinezoll.surfaces import sample_points

pts = sample_points(8)
for kind, c in [("Mc", 0.0), ("Mc", 1.0), ("M0c", 1.0), ("Z3", 0.0)]:
    s = make_surface(kind, c)
    worst = max(np.abs(quasi_einstein_residual(s.conn, f, p)).max() for f in s.qe_basis for p in pts)
    print(f"{kind:>3}({c}) basis size {len(s.qe_basis)}  max residual {worst:.2e}")
