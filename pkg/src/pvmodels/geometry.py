"""Coordinate charts, Levi-Civita connection, curvature and geodesics.

Curvature convention: ``R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z -
nabla_[X,Y] Z`` and ``R_ijkl = <R(d_i, d_j) d_k, d_l>``; with it the round
sphere has ``R_1221 > 0`` and positive scalar curvature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .errors import BadParameter, Degenerate, DimensionMismatch, DomainError, InsufficientSamples, ZeroCurvature
from .linalg import inertia, make_space
from .model import Model0, curvature_tensor, scalar_curvature_of_model

INF = math.inf


@dataclass(frozen=True, eq=False)
class MetricChart:
    """Metric components ``g_ij(x)`` as expressions on an open coordinate box."""

    dim: int
    components: tuple
    domain: tuple
    label: str = ""

    def __post_init__(self):
        n = self.dim
        comps = tuple(tuple(row) for row in self.components)
        if len(comps) != n or any(len(row) != n for row in comps):
            raise DimensionMismatch(f"chart of dimension {n} needs {n}x{n} components")
        for i in range(n):
            for j in range(i + 1, n):
                if comps[i][j] != comps[j][i]:
                    raise DimensionMismatch(f"g[{i + 1}][{j + 1}] and g[{j + 1}][{i + 1}] differ")
        for row in comps:
            for e in row:
                if ex.max_var_index(e) >= n:
                    raise ex.VariableOutOfRange(f"component {e} uses a variable beyond x{n}")
        dom = tuple((float(lo), float(hi)) for lo, hi in self.domain)
        if len(dom) != n or any(lo >= hi for lo, hi in dom):
            raise DimensionMismatch(f"domain must list {n} intervals (lo < hi)")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "domain", dom)

    def contains(self, x):
        return all(lo < xi < hi for xi, (lo, hi) in zip(x, self.domain))

    def check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"point must have {self.dim} coordinates")
        if not self.contains(x):
            raise DomainError(f"point {x.tolist()} lies outside the chart domain {self.domain}")
        return x

    def metric(self, x):
        x = self.check_point(x)
        n = self.dim
        g = np.zeros((n, n))
        for i in range(n):
            for j in range(i, n):
                g[i, j] = g[j, i] = ex.evaluate(self.components[i][j], x)
        return g


def chart_from_strings(components, domain, label="custom"):
    """Chart from an ``n x n`` nested list of expression strings."""
    n = len(components)
    parsed = [[ex.parse(str(c), n) for c in row] for row in components]
    return MetricChart(n, tuple(tuple(r) for r in parsed), tuple(domain), label)


def _diag_chart(diag, domain, label):
    n = len(diag)
    zero = ex.Num(0.0)
    comps = tuple(tuple(diag[i] if i == j else zero for j in range(n)) for i in range(n))
    return MetricChart(n, comps, tuple(domain), label)


def chart_euclidean(n):
    one = ex.Num(1.0)
    return _diag_chart([one] * n, [(-INF, INF)] * n, f"euclidean R^{n}")


def chart_polar_plane():
    """``dr^2 + r^2 dtheta^2`` with ``r = x1 > 0``."""
    return _diag_chart([ex.Num(1.0), ex.parse("x1^2", 2)], [(0.0, INF), (-INF, INF)], "polar plane")


def sphere_alpha(radius):
    """Conformal exponent of the round sphere of ``radius`` in stereographic coordinates.

    ``exp(2 alpha) = 4 r^2 / (1 + x1^2 + x2^2)^2``; the sphere then has
    scalar curvature ``2 / r^2``.
    """
    if radius <= 0:
        raise BadParameter("radius must be positive")
    return ex.parse(f"ln({2.0 * radius!r}) - ln(1 + x1^2 + x2^2)", 2)


def chart_conformal_surface(alpha, label="conformal surface"):
    """``exp(2 alpha) (dx1^2 + dx2^2)`` on R^2."""
    if isinstance(alpha, str):
        alpha = ex.parse(alpha, 2)
    factor = ex.Call("exp", ex.BinOp("*", ex.Num(2.0), alpha))
    return _diag_chart([factor, factor], [(-INF, INF)] * 2, label)


def chart_sphere(radius):
    return chart_conformal_surface(sphere_alpha(radius), f"sphere r={radius}")


def fiber_scalar_curvature(alpha, point):
    """Scalar curvature ``-2 exp(-2 alpha) (alpha_11 + alpha_22)`` of a conformal surface."""
    if isinstance(alpha, str):
        alpha = ex.parse(alpha, 2)
    j = ex.eval_jet2(alpha, point)
    return -2.0 * math.exp(-2.0 * j.value) * (j.hess[0, 0] + j.hess[1, 1])


def chart_thm14(alpha, t_min=0.0, label="thm14"):
    """Cone-like warped product ``dt^2 + t^2 exp(2 alpha)(dx1^2 + dx2^2)``.

    ``alpha`` is an expression in the surface coordinates ``x1, x2``; in the
    chart the coordinates are ``(t, x1, x2) = (x1, x2, x3)``.
    """
    if isinstance(alpha, str):
        alpha = ex.parse(alpha, 2)
    if ex.max_var_index(alpha) >= 2:
        raise ex.VariableOutOfRange("alpha may only use x1 and x2")
    if t_min < 0:
        raise BadParameter("t_min must be non-negative")
    shifted = ex.shift_vars(alpha, 1)
    warp = ex.BinOp(
        "*",
        ex.Pow(ex.Var(0), 2.0),
        ex.Call("exp", ex.BinOp("*", ex.Num(2.0), shifted)),
    )
    return _diag_chart([ex.Num(1.0), warp, warp], [(t_min, INF), (-INF, INF), (-INF, INF)], label)


def chart_thm15(beta):
    """``dx1^2 + dx2^2 + x1^2 dx3^2 + x1 (x1 + beta x2) dx4^2`` on (0,inf)^2 x R^2."""
    beta = float(beta)
    if not beta > 0:
        raise BadParameter(f"beta must be positive, got {beta}")
    diag = [ex.Num(1.0), ex.Num(1.0), ex.parse("x1^2", 4), ex.parse(f"x1*(x1 + {beta!r}*x2)", 4)]
    return _diag_chart(diag, [(0.0, INF), (0.0, INF), (-INF, INF), (-INF, INF)], f"thm15 beta={beta:g}")


def warped_tau_closed_form(beta, x):
    """The closed-form scalar curvature ``1 / (x1 (x1 + beta x2))`` quoted for this family."""
    return 1.0 / (x[0] * (x[0] + beta * x[1]))


def metric_jets(chart, x):
    """``g``, ``dg[a, i, j] = d_a g_ij`` and ``ddg[a, b, i, j] = d_a d_b g_ij`` at ``x``."""
    x = chart.check_point(x)
    n = chart.dim
    g = np.zeros((n, n))
    dg = np.zeros((n, n, n))
    ddg = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i, n):
            e = chart.components[i][j]
            if ex.is_zero(e):
                continue
            jet = ex.eval_jet2(e, x)
            g[i, j] = g[j, i] = jet.value
            dg[:, i, j] = dg[:, j, i] = jet.grad
            ddg[:, :, i, j] = ddg[:, :, j, i] = jet.hess
    return g, dg, ddg


def _inverse(g):
    sv = np.linalg.svd(g, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise Degenerate("metric is degenerate at this point")
    return np.linalg.inv(g)


def _christoffel_from(gi, dg):
    # s[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
    s = dg.transpose(2, 0, 1) + dg.transpose(2, 1, 0) - dg
    return 0.5 * np.einsum("kl,lij->kij", gi, s), s


def christoffel(chart, x):
    """``Gamma[k, i, j]`` = Gamma^k_ij of the Levi-Civita connection."""
    g, dg, _ = metric_jets(chart, x)
    gam, _ = _christoffel_from(_inverse(g), dg)
    return gam


def _riemann_lower(g, dg, ddg):
    gi = _inverse(g)
    gam, s = _christoffel_from(gi, dg)
    # ds[a, l, i, j] = d_a (d_i g_jl + d_j g_il - d_l g_ij)
    ds = np.einsum("aijl->alij", ddg) + np.einsum("ajil->alij", ddg) - np.einsum("alij->alij", ddg)
    dgi = -np.einsum("ka,mab,bl->mkl", gi, dg, gi)
    dgam = 0.5 * (np.einsum("mkl,lij->mkij", dgi, s) + np.einsum("kl,mlij->mkij", gi, ds))
    # R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
    r_up = (
        np.einsum("iljk->lijk", dgam)
        - np.einsum("jlik->lijk", dgam)
        + np.einsum("lim,mjk->lijk", gam, gam)
        - np.einsum("ljm,mik->lijk", gam, gam)
    )
    return np.einsum("lp,pijk->ijkl", g, r_up)


def riemann_model_at(chart, x):
    """The 0-model ``(T_x M, g(x), R(x))``."""
    g, dg, ddg = metric_jets(chart, x)
    r = _riemann_lower(g, dg, ddg)
    p, q = inertia(g)
    return Model0(make_space(p, q, 0.5 * (g + g.T)), curvature_tensor(r, project=True))


def scalar_curvature_at(chart, x):
    return scalar_curvature_of_model(riemann_model_at(chart, x))


def covariant_hessian(chart, f, x):
    """``H_ij = d_i d_j f - Gamma^k_ij d_k f``."""
    if isinstance(f, str):
        f = ex.parse(f, chart.dim)
    x = chart.check_point(x)
    jet = ex.eval_jet2(f, x)
    gam = christoffel(chart, x)
    h = jet.hess - np.einsum("kij,k->ij", gam, jet.grad)
    return 0.5 * (h + h.T)


def psi_expression(beta):
    """``-ln|tau|`` for the closed-form ``tau = 1 / (x1 (x1 + beta x2))`` (positive on the domain)."""
    return ex.parse(f"-ln(1 / (x1*(x1 + {float(beta)!r}*x2)))", 4)


def beta_invariant(beta, x):
    """``det(H|span(d1, d2)) / tau^2`` with ``H`` the covariant Hessian of ``-ln|tau|``.

    Evaluates to ``beta^2`` for every point of the domain.
    """
    chart = chart_thm15(beta)
    x = chart.check_point(x)
    h = covariant_hessian(chart, psi_expression(beta), x)
    tau = warped_tau_closed_form(float(beta), x)
    return float(np.linalg.det(h[:2, :2]) / tau**2)


@dataclass(frozen=True, eq=False)
class GeodesicTrace:
    times: np.ndarray
    points: np.ndarray
    velocities: np.ndarray
    scalar_curvatures: np.ndarray
    energies: np.ndarray
    truncated: bool = False
    label: str = field(default="")

    def __len__(self):
        return len(self.times)

    def to_table(self):
        """Whitespace-separated columns ``t x1 .. xn tau``, one row per step."""
        n = self.points.shape[1]
        header = "t " + " ".join(f"x{i + 1}" for i in range(n)) + " tau"
        rows = [header]
        for t, p, tau in zip(self.times, self.points, self.scalar_curvatures):
            rows.append(" ".join(format(float(v), ".17g") for v in (t, *p, tau)))
        return "\n".join(rows) + "\n"


def _acceleration(chart, x, v):
    return -np.einsum("kij,i,j->k", christoffel(chart, x), v, v)


def geodesic(chart, x0, v0, t_end, step, record_curvature=True):
    """Integrate the geodesic equation with the classical fourth-order Runge-Kutta method.

    Stops early (``truncated=True``) when the next step would leave the chart
    domain or hit a degenerate metric.
    """
    if step <= 0:
        raise BadParameter("step must be positive")
    x = chart.check_point(x0)
    v = np.asarray(v0, dtype=float)
    if v.shape != x.shape:
        raise DimensionMismatch("velocity and point dimensions differ")
    n_steps = int(round(t_end / step))
    times, pts, vels, taus, energies = [], [], [], [], []

    def record(t, x, v):
        g = chart.metric(x)
        times.append(t)
        pts.append(x.copy())
        vels.append(v.copy())
        energies.append(float(v @ g @ v))
        taus.append(scalar_curvature_at(chart, x) if record_curvature else math.nan)

    record(0.0, x, v)
    truncated = False
    h = step
    for k in range(n_steps):
        try:
            k1x, k1v = v, _acceleration(chart, x, v)
            k2x, k2v = v + 0.5 * h * k1v, _acceleration(chart, x + 0.5 * h * k1x, v + 0.5 * h * k1v)
            k3x, k3v = v + 0.5 * h * k2v, _acceleration(chart, x + 0.5 * h * k2x, v + 0.5 * h * k2v)
            k4x, k4v = v + h * k3v, _acceleration(chart, x + h * k3x, v + h * k3v)
            xn = x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
            vn = v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
            if not chart.contains(xn):
                truncated = True
                break
            x, v = xn, vn
            record((k + 1) * h, x, v)
        except (DomainError, Degenerate):
            truncated = True
            break
    return GeodesicTrace(
        np.array(times),
        np.array(pts),
        np.array(vels),
        np.array(taus),
        np.array(energies),
        truncated,
        chart.label,
    )


@dataclass(frozen=True)
class BlowupFit:
    exponent: float
    residual: float
    n_samples: int
    blowup: bool


def blowup_exponent(trace, coordinate=0, distance=None, max_residual=1e-2, slack=0.05):
    """Fit ``ln|tau| = exponent * ln(d) + c`` along a trace.

    ``d`` is the distance-to-singularity parameter: by default the chosen
    coordinate of the trace points (``t`` on the cone, ``x1`` on the warped
    family). Blowup is declared when ``exponent <= -1 + slack`` and the rms
    residual is below ``max_residual``.
    """
    tau = np.asarray(trace.scalar_curvatures, dtype=float)
    d = np.asarray(trace.points[:, coordinate] if distance is None else distance, dtype=float)
    if len(tau) < 8:
        raise InsufficientSamples(f"need at least 8 samples, got {len(tau)}")
    if np.all(np.abs(tau) < 1e-12):
        raise ZeroCurvature("scalar curvature vanishes along the trace")
    if not np.all(np.diff(d) < 0) or np.any(d <= 0):
        raise InsufficientSamples("distance parameter must be positive and strictly decreasing")
    keep = np.abs(tau) >= 1e-12
    if keep.sum() < 8:
        raise InsufficientSamples("fewer than 8 samples with nonzero scalar curvature")
    lx, ly = np.log(d[keep]), np.log(np.abs(tau[keep]))
    design = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - ly) ** 2)))
    slope = float(coef[0])
    return BlowupFit(slope, resid, int(keep.sum()), slope <= -1.0 + slack and resid < max_residual)
