"""The affine symmetry group of M(c) and its Killing algebra.

Group elements are (alpha, beta, gamma, delta, sign). The four Killing fields
close under the bracket into a solvable four-dimensional Lie algebra.
"""
import numpy as np

from affinezoll import AffineMapParams, compose_T, invert_T, killing_basis, structure_constants
from affinezoll.symmetry import a412_basis_change, a412_table

c = 1.0
p = AffineMapParams(0.3, -1.0, 0.5, 2.0)
q = AffineMapParams(-0.7, 0.2, 1.1, -0.4, -1)
print("p * q =", compose_T(p, q, c))
print("p * p^-1 =", compose_T(p, invert_T(p, c), c))

basis = killing_basis(c)
pts = np.random.default_rng(0).uniform(-2, 2, (12, 2))
table = structure_constants(basis, pts)
print(f"Killing residual fit {table.fit_residual:.1e}, Jacobi defect {table.jacobi_defect():.1e}")

changed = table.change_basis(a412_basis_change(c))
print("after the change of basis, distance to the A4,12 table:", np.abs(changed.table - a412_table().table).max())
