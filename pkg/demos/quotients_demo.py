"""Cylinder and Moebius quotients of M(c) and the almost-Zoll sweep.

On quotients of M(0) every geodesic from a base point closes up except the two
horizontal ones, which are null for the Ricci tensor. For c > 0 geodesics
still return to the base point but with a different velocity.
"""
from affinezoll import TangentState, almost_zoll_sweep, classify_geodesic, cylinder, moebius

for q, base in [(cylinder(0.0), (0, 0)), (moebius(0.0), (1, 0)), (cylinder(1.0), (0, 0))]:
    rep = almost_zoll_sweep(q, base, 16)
    print(f"{q.name} over M({q.c}): {rep.summary_line()}")

r = classify_geodesic(cylinder(1.0), TangentState(0, 0, 1, 1))
print(f"M(1) cylinder, upward geodesic: {r.outcome.value} at t = {r.t_return:.6g}, velocity error {r.velocity_error:.3g}")
