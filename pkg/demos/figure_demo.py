"""Draw fans of M(0) geodesics through three base points.

Every geodesic from (u, v) with b = 1 passes through (-u, v + pi) at t = pi,
so each fan focuses at a single point.
"""
import sys

from affinezoll.figures import render_figure

out = sys.argv[1] if len(sys.argv) > 1 else "fans.svg"
render_figure([(0, 0), (1, 0), (2, 0)], out)
print("wrote", out)
