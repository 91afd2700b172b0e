"""
The cone over a round sphere
============================

dt^2 + t^2 exp(2 alpha)(dx1^2 + dx2^2), with the fiber a sphere of radius 2.
Every tangent model commutes, but the Ricci operator has two eigenvalues,
and the scalar curvature blows up like t^-2 as the radial geodesic reaches
the apex.
"""

import numpy as np

from pvmodels import decompose_pv, is_puffini_videv
from pvmodels.geometry import (
    blowup_exponent,
    chart_thm14,
    fiber_scalar_curvature,
    geodesic,
    riemann_model_at,
    scalar_curvature_at,
    sphere_alpha,
)

alpha = sphere_alpha(2.0)
chart = chart_thm14(alpha)
p0 = np.array([0.4, -0.7])

x = np.r_[1.0, p0]
m = riemann_model_at(chart, x)
print("commuting:", is_puffini_videv(m).verdict)
dec = decompose_pv(m)
print("blocks:", [(b.dim, round(b.eigenvalue.real, 6)) for b in dec.blocks])

tau_n = fiber_scalar_curvature(alpha, p0)
for t in (0.1, 0.5, 1.0, 2.0):
    tau = scalar_curvature_at(chart, np.r_[t, p0])
    print(f"t = {t:4}: tau = {tau:+.6f}, t^2 tau = {t * t * tau:+.6f}, (tau_N - 2) = {tau_n - 2:+.6f}")

trace = geodesic(chart, x, [-1.0, 0.0, 0.0], t_end=0.99, step=1e-3)
fit = blowup_exponent(trace)
print(f"fitted exponent of |tau| against t: {fit.exponent:.4f} (residual {fit.residual:.1e})")
print("energy drift:", np.ptp(trace.energies))

# the cone over the unit sphere is flat space in polar form
flat = chart_thm14(sphere_alpha(1.0))
print("unit sphere fiber, max |R|:", np.abs(riemann_model_at(flat, x).A).max())
