"""Symbolic curvature, used as an independent oracle for the numeric geometry code."""

import functools

import sympy as sp


def riemann_lower(g, xs):
    """``R_ijkl = <R(d_i, d_j) d_k, d_l>`` with ``R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``."""
    n = len(xs)
    gi = g.inv()
    gam = [[[sp.simplify(sum(gi[m, s] * (sp.diff(g[s, j], xs[k]) + sp.diff(g[s, k], xs[j]) - sp.diff(g[j, k], xs[s]))
                              for s in range(n)) / 2)
             for k in range(n)] for j in range(n)] for m in range(n)]
    r_up = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for m in range(n):
                    v = sp.diff(gam[m][j][k], xs[i]) - sp.diff(gam[m][i][k], xs[j])
                    v += sum(gam[p][j][k] * gam[m][i][p] - gam[p][i][k] * gam[m][j][p] for p in range(n))
                    r_up[i, j, k, m] = v
    return {(i, j, k, l): sp.simplify(sum(g[m, l] * r_up[i, j, k, m] for m in range(n)))
            for i in range(n) for j in range(n) for k in range(n) for l in range(n)}


def scalar_curvature(g, xs, r=None):
    n = len(xs)
    r = riemann_lower(g, xs) if r is None else r
    gi = g.inv()
    return sp.simplify(sum(gi[j, k] * gi[i, l] * r[i, j, k, l]
                           for i in range(n) for j in range(n) for k in range(n) for l in range(n)))


@functools.lru_cache(maxsize=None)
def thm15(beta):
    xs = sp.symbols("x1:5", real=True)
    x1, x2 = xs[0], xs[1]
    g = sp.diag(1, 1, x1**2, x1 * (x1 + beta * x2))
    r = riemann_lower(g, xs)
    return xs, r, scalar_curvature(g, xs, r)


def riemann_lower_at(g, xs, point):
    """Numeric ``R_ijkl`` at ``point`` from exact symbolic derivatives of the metric entries.

    Uses the lowered form
    ``R_ijkl = 1/2 (g_lj,ki + g_ki,lj - g_li,kj - g_kj,li) + g_mp (G^m_ki G^p_lj - G^m_kj G^p_li)``
    so that no symbolic inverse is needed.
    """
    import numpy as np

    n = len(xs)
    sub = dict(zip(xs, point))
    g0 = np.array([[float(g[a, b].subs(sub)) for b in range(n)] for a in range(n)])
    d1 = np.array([[[float(sp.diff(g[a, b], xs[c]).subs(sub)) for c in range(n)] for b in range(n)] for a in range(n)])
    d2 = np.array([[[[float(sp.diff(g[a, b], xs[c], xs[d]).subs(sub)) for d in range(n)] for c in range(n)]
                    for b in range(n)] for a in range(n)])
    gi = np.linalg.inv(g0)
    # first kind G_mjk = 1/2 (g_mj,k + g_mk,j - g_jk,m), then raise
    first = np.array([[[0.5 * (d1[m, j, k] + d1[m, k, j] - d1[j, k, m]) for k in range(n)] for j in range(n)]
                      for m in range(n)])
    gam = np.einsum("ms,sjk->mjk", gi, first)
    r = np.zeros((n,) * 4)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    v = 0.5 * (d2[l, j, k, i] + d2[k, i, l, j] - d2[l, i, k, j] - d2[k, j, l, i])
                    v += sum(g0[m, p] * (gam[m, k, i] * gam[p, l, j] - gam[m, k, j] * gam[p, l, i])
                             for m in range(n) for p in range(n))
                    r[i, j, k, l] = v
    return r
