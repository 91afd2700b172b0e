"""
The four dimensional warped family
==================================

dx1^2 + dx2^2 + x1^2 dx3^2 + x1 (x1 + beta x2) dx4^2. The closed forms
quoted for this family (tau = 1/(x1 (x1 + beta x2)), a single independent
curvature component, commuting Jacobi operators) do not hold for the metric
as written; this script prints what the metric actually gives.
"""

import numpy as np

from pvmodels import is_puffini_videv
from pvmodels.geometry import (
    beta_invariant,
    blowup_exponent,
    chart_thm15,
    geodesic,
    riemann_model_at,
    scalar_curvature_at,
    warped_tau_closed_form,
)

for beta in (1.0, 2.0):
    chart = chart_thm15(beta)
    x = np.array([1.0, 1.0, 0.0, 0.0])
    print(f"beta = {beta:g}")
    print("  computed tau(1,1,0,0):", scalar_curvature_at(chart, x))
    print("  quoted closed form:   ", warped_tau_closed_form(beta, x))
    a = riemann_model_at(chart, x).A
    nz = {tuple(int(i) + 1 for i in idx) for idx in np.argwhere(np.abs(a) > 1e-12) if idx[0] < idx[1] and idx[2] < idx[3]}
    print("  nonzero components R_ijkl (i<j, k<l):", sorted(nz))
    print("  commuting:", is_puffini_videv(riemann_model_at(chart, x)).verdict)
    print("  det(Hessian of -ln tau on x1,x2) / tau^2:", beta_invariant(beta, x))
    trace = geodesic(chart, x, [-1.0, 0.0, 0.0, 0.0], t_end=0.99, step=1e-3)
    print("  fitted blowup exponent along x1 -> 0:", round(blowup_exponent(trace).exponent, 4))
