import math

import numpy as np
import pytest
import sympy as sp

import sympy_oracle
from pvmodels import expr as ex
from pvmodels.errors import BadParameter, DimensionMismatch, DomainError, InsufficientSamples, ZeroCurvature
from pvmodels.geometry import (
    GeodesicTrace,
    beta_invariant,
    blowup_exponent,
    chart_euclidean,
    chart_from_strings,
    chart_polar_plane,
    chart_sphere,
    chart_thm14,
    chart_thm15,
    christoffel,
    covariant_hessian,
    fiber_scalar_curvature,
    geodesic,
    psi_expression,
    riemann_model_at,
    scalar_curvature_at,
    sphere_alpha,
    warped_tau_closed_form,
)


class TestCharts:
    def test_euclidean_flat(self):
        m = riemann_model_at(chart_euclidean(3), [0.1, 2.0, -1.0])
        assert np.abs(m.A).max() == 0.0

    def test_polar_flat_but_curved_coordinates(self):
        x = [2.0, 0.4]
        gam = christoffel(chart_polar_plane(), x)
        # Gamma^r_thth = -r, Gamma^th_rth = 1/r
        assert gam[0, 1, 1] == pytest.approx(-2.0)
        assert gam[1, 0, 1] == pytest.approx(0.5)
        assert np.abs(riemann_model_at(chart_polar_plane(), x).A).max() < 1e-12

    def test_domain_error(self):
        with pytest.raises(DomainError):
            chart_polar_plane().metric([-1.0, 0.0])

    def test_asymmetric_components(self):
        with pytest.raises(DimensionMismatch):
            chart_from_strings([["1", "x1"], ["0", "1"]], [(-1, 1), (-1, 1)])

    def test_bad_domain(self):
        with pytest.raises(DimensionMismatch):
            chart_from_strings([["1"]], [(1, 0)])

    def test_sphere_alpha_radius(self):
        with pytest.raises(BadParameter):
            sphere_alpha(0.0)

    def test_thm15_beta(self):
        with pytest.raises(BadParameter):
            chart_thm15(0.0)


class TestSphere:
    @pytest.mark.parametrize("radius", [1.0, 2.0, 0.5])
    def test_constant_scalar_curvature(self, radius):
        c = chart_sphere(radius)
        for x in [(0.0, 0.0), (0.3, -1.2), (2.0, 1.5)]:
            assert scalar_curvature_at(c, x) == pytest.approx(2.0 / radius**2, rel=1e-9)

    def test_fiber_formula_agrees(self):
        a = sphere_alpha(2.0)
        assert fiber_scalar_curvature(a, [0.4, 0.1]) == pytest.approx(0.5, rel=1e-12)

    def test_lorentz_signature_detected(self):
        c = chart_from_strings([["-1", "0"], ["0", "exp(2*x1)"]], [(-5, 5), (-5, 5)])
        m = riemann_model_at(c, [0.1, 0.2])
        assert (m.space.p, m.space.q) == (1, 1)


class TestAgainstSympy:
    def test_generic_3d_metric(self):
        comps = [["1 + x1^2", "0.3*x2", "0"], ["0.3*x2", "exp(x3)", "0.1*x1*x3"], ["0", "0.1*x1*x3", "2 + sin(x1)"]]
        chart = chart_from_strings(comps, [(-2, 2)] * 3)
        xs = sp.symbols("x1:4", real=True)
        x1, x2, x3 = xs
        g = sp.Matrix([[1 + x1**2, sp.Rational(3, 10) * x2, 0],
                       [sp.Rational(3, 10) * x2, sp.exp(x3), x1 * x3 / 10],
                       [0, x1 * x3 / 10, 2 + sp.sin(x1)]])
        expected = sympy_oracle.riemann_lower_at(g, xs, [0.3, -0.5, 0.7])
        got = riemann_model_at(chart, [0.3, -0.5, 0.7]).A
        np.testing.assert_allclose(got, expected, atol=1e-10)

    def test_thm15_tensor(self):
        xs, r, _ = sympy_oracle.thm15(sp.Integer(2))
        pt = [0.7, 1.3, 0.0, 0.0]
        expected = np.zeros((4,) * 4)
        for k, v in r.items():
            expected[k] = float(v.subs(dict(zip(xs, pt))))
        np.testing.assert_allclose(riemann_model_at(chart_thm15(2.0), pt).A, expected, atol=1e-11)


class TestThm15:
    # frozen from the symbolic oracle: tau = -(3 x1^2 + 6 x1 x2 + x2^2) / (2 x1^2 (x1 + x2)^2) at beta = 1
    def test_tau_frozen(self):
        assert scalar_curvature_at(chart_thm15(1.0), [1.0, 1.0, 0.0, 0.0]) == pytest.approx(-1.25, rel=1e-12)

    def test_tau_matches_symbolic(self):
        xs, _, tau = sympy_oracle.thm15(sp.Integer(1))
        for pt in [(0.5, 2.0), (3.0, 0.2)]:
            exp = float(tau.subs({xs[0]: pt[0], xs[1]: pt[1]}))
            assert scalar_curvature_at(chart_thm15(1.0), [*pt, 0.3, -1.0]) == pytest.approx(exp, rel=1e-10)

    def test_closed_form_helper(self):
        assert warped_tau_closed_form(1.0, [1.0, 1.0]) == 0.5

    def test_beta_invariant_is_beta_squared(self):
        # symbolic: det of the (x1, x2) block of Hess(-ln tau) divided by tau^2 reduces to beta^2
        for beta in (1.0, 2.0, 0.5):
            for x in ([1.0, 1.0, 0.0, 0.0], [0.3, 2.5, 1.0, -4.0]):
                assert beta_invariant(beta, x) == pytest.approx(beta**2, rel=1e-10)

    def test_beta_invariant_symbolic(self):
        b, x1, x2 = sp.symbols("b x1 x2", positive=True)
        tau = 1 / (x1 * (x1 + b * x2))
        psi = -sp.log(tau)
        # Christoffels with both lower indices in {x1, x2} vanish for this metric
        h = sp.Matrix([[sp.diff(psi, u, v) for v in (x1, x2)] for u in (x1, x2)])
        assert sp.simplify(h.det() / tau**2 - b**2) == 0

    def test_covariant_hessian_flat(self):
        # in Euclidean coordinates the covariant Hessian is the ordinary one
        h = covariant_hessian(chart_euclidean(2), "x1^2 * x2", [1.0, 2.0])
        np.testing.assert_allclose(h, [[4.0, 2.0], [2.0, 0.0]])

    def test_psi_expression(self):
        assert ex.evaluate(psi_expression(1.0), [1.0, 1.0, 0.0, 0.0]) == pytest.approx(math.log(2.0))


class TestThm14:
    def test_cone_scaling(self):
        # tau = (tau_N - 2) / t^2 for the cone over a surface N
        alpha = sphere_alpha(2.0)
        c = chart_thm14(alpha)
        for t in (0.1, 0.5, 2.0):
            assert scalar_curvature_at(c, [t, 0.3, -0.2]) == pytest.approx((0.5 - 2.0) / t**2, rel=1e-9)

    def test_unit_sphere_fiber_is_flat(self):
        c = chart_thm14(sphere_alpha(1.0))
        assert np.abs(riemann_model_at(c, [0.7, 0.2, 0.5]).A).max() < 1e-10

    def test_alpha_variable_check(self):
        with pytest.raises(ex.VariableOutOfRange):
            chart_thm14("x3")


class TestGeodesic:
    def test_straight_line(self):
        tr = geodesic(chart_euclidean(2), [0.0, 0.0], [1.0, 2.0], 1.0, 0.1)
        np.testing.assert_allclose(tr.points[-1], [1.0, 2.0], atol=1e-12)

    def test_sphere_energy_conserved(self):
        c = chart_sphere(1.0)
        tr = geodesic(c, [0.2, -0.1], [0.5, 0.8], 2.0, 1e-3, record_curvature=False)
        assert np.abs(tr.energies - tr.energies[0]).max() < 1e-10

    def test_sphere_great_circle_period(self):
        # unit sphere, unit speed: back to the start after time 2 pi
        c = chart_sphere(1.0)
        # the equator is the unit circle of the chart, where g = I
        x0 = np.array([1.0, 0.0])
        v0 = np.array([0.0, 1.0])
        tr = geodesic(c, x0, v0, 2 * math.pi, 2 * math.pi / 4000, record_curvature=False)
        assert not tr.truncated
        np.testing.assert_allclose(tr.points[-1], x0, atol=1e-8)

    def test_truncates_at_boundary(self):
        tr = geodesic(chart_polar_plane(), [1.0, 0.0], [-1.0, 0.0], 3.0, 0.01, record_curvature=False)
        assert tr.truncated
        assert tr.points[-1][0] > 0

    def test_table(self):
        tr = geodesic(chart_euclidean(2), [0.0, 0.0], [1.0, 0.0], 0.2, 0.1)
        lines = tr.to_table().splitlines()
        assert lines[0] == "t x1 x2 tau" and len(lines) == 4

    def test_bad_step(self):
        with pytest.raises(BadParameter):
            geodesic(chart_euclidean(1), [0.0], [1.0], 1.0, 0.0)


def _trace(d, tau):
    n = len(d)
    pts = np.column_stack([d, np.zeros(n)])
    return GeodesicTrace(np.arange(n), pts, pts, np.asarray(tau), np.ones(n))


class TestBlowup:
    def test_exact_power_law(self):
        d = np.linspace(1.0, 0.01, 40)
        fit = blowup_exponent(_trace(d, 3.0 * d**-2))
        assert fit.exponent == pytest.approx(-2.0, abs=1e-12)
        assert fit.blowup and fit.residual < 1e-12

    def test_mild_growth_not_blowup(self):
        d = np.linspace(1.0, 0.01, 40)
        assert not blowup_exponent(_trace(d, d**-0.5)).blowup

    def test_too_few(self):
        with pytest.raises(InsufficientSamples):
            blowup_exponent(_trace(np.linspace(1, 0.5, 5), np.ones(5)))

    def test_zero(self):
        with pytest.raises(ZeroCurvature):
            blowup_exponent(_trace(np.linspace(1, 0.5, 10), np.zeros(10)))

    def test_non_monotone(self):
        with pytest.raises(InsufficientSamples):
            blowup_exponent(_trace(np.linspace(0.5, 1, 10), np.ones(10)))

    def test_cone_geodesic(self):
        c = chart_thm14(sphere_alpha(2.0))
        tr = geodesic(c, [2.0, 0.3, 0.1], [-1.0, 0.0, 0.0], 1.95, 0.01)
        fit = blowup_exponent(tr)
        assert fit.exponent == pytest.approx(-2.0, abs=1e-6)
