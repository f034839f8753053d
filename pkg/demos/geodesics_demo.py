"""Geodesics of M(c): closed form against numerical integration.

For c = 0 geodesics with b != 0 are periodic in x2 up to a shift of 2 pi.
For c > 0 a geodesic heading down (b < 0) leaves every compact set in finite
time t = -1 / (2 b c); the integrator stops there with a speed blow-up.
"""
import math

import numpy as np

from affinezoll import TangentState, closed_form_geodesic, geodesic_domain, integrate_geodesic, make_surface

s = TangentState(0.0, 0.0, 1.0, 1.0)
g = closed_form_geodesic(0.0, s)
print("M(0) after one turn:", np.round(g.position(2 * math.pi), 12), "velocity", np.round(g.velocity(2 * math.pi), 12))

conn = make_surface("Mc", 0.0).conn
traj = integrate_geodesic(conn, s, 2 * math.pi)
print("integrated end point:", traj.final.position, "error", np.abs(traj.final.position - g.position(2 * math.pi)).max())

down = TangentState(0.0, 0.0, 1.0, -1.0)
print("M(1) domain for b = -1:", geodesic_domain(1.0, down))
traj = integrate_geodesic(make_surface("Mc", 1.0).conn, down, 1.0)
print(f"integration status {traj.status} at t = {traj.t[-1]:.6f}, speed {np.linalg.norm(traj.y[-1, 2:]):.3e}")
