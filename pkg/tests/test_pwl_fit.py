import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from ptlhen.pwl_fit import (
    DomainError,
    Pwl1D,
    PwlFitError,
    build_simplex_surface,
    chen_lmtd,
    fit_convex_planes,
    fit_pwl_1d,
    grid_triangulation,
    lmtd_exact,
    rmse,
    sample_box,
)

T_FULL = 8000.0


def _feed(case, name):
    return dict(case.performance.feed_flows)[name]


class TestFitPwl1D:
    def test_exact_line(self):
        xs = np.linspace(0, 3, 7)
        m = fit_pwl_1d(list(zip(xs, 2 * xs + 1)), 0.0)
        assert m.segments == 1
        assert rmse(m, list(zip(xs, 2 * xs + 1))) == pytest.approx(0.0, abs=1e-12)

    def test_h2o_budget(self, ref_case):
        p = _feed(ref_case, "H2O")
        m = fit_pwl_1d(p.samples, 0.0025, max_segments=2)
        assert m.segments <= 2 and rmse(m, p.samples) <= 0.0025

    def test_p_sys_budget(self, ref_case):
        s = ref_case.performance.p_sys.samples
        m = fit_pwl_1d(s, 0.0043, max_segments=3)
        assert m.segments <= 3 and rmse(m, s) <= 0.0043

    def test_unreachable_target(self):
        xs = np.linspace(0, 1, 7)
        with pytest.raises(PwlFitError, match="not reached"):
            fit_pwl_1d(list(zip(xs, np.sin(9 * xs))), 1e-6, max_segments=2)

    @pytest.mark.parametrize("samples", [[(0, 1)], [(0, 1), (0, 2), (1, 3)]])
    def test_bad_samples(self, samples):
        with pytest.raises(PwlFitError):
            fit_pwl_1d(samples, 0.01)

    @settings(max_examples=40, deadline=None)
    @given(ys=st.lists(st.floats(-5, 5), min_size=4, max_size=9), target=st.floats(0.0, 0.2))
    def test_target_met_or_error(self, ys, target):
        xs = np.linspace(0, 1, len(ys))
        s = list(zip(xs, ys))
        m = fit_pwl_1d(s, target)
        assert rmse(m, s) <= target + 1e-9
        assert m.segments <= len(ys) - 1

    def test_pwl_domain(self):
        p = Pwl1D.from_points([0, 1, 2], [0, 1, 0])
        assert p(0.5) == pytest.approx(0.5)
        with pytest.raises(DomainError):
            p(2.5)


class TestSimplexSurface:
    @pytest.mark.parametrize("n,expected", [(4, 18), (3, 8), (2, 2)])
    def test_simplex_count(self, n, expected):
        s = build_simplex_surface(lambda x, y: x * y + 1, (0, 1), (1, 2), n, n)
        assert s.n_simplices == expected == len(grid_triangulation(n, n))

    def test_affine_exact(self):
        s = build_simplex_surface(lambda x, y: 3 * x - 2 * y + 1, (0, 2), (-1, 1), 2, 2)
        assert s.rmse == pytest.approx(0.0, abs=1e-12)
        X, Y = np.meshgrid(np.linspace(0, 2, 9), np.linspace(-1, 1, 9))
        assert np.allclose(s(X.ravel(), Y.ravel()), 3 * X.ravel() - 2 * Y.ravel() + 1)

    def test_node_exact(self):
        s = build_simplex_surface(lambda h, p: h / p, (400, 700), (700, 1200), 4, 4)
        for i, x in enumerate(s.grid_x):
            for j, y in enumerate(s.grid_y):
                assert s(x, y) == pytest.approx(x / y, rel=1e-12)

    def test_outside_rectangle(self):
        s = build_simplex_surface(lambda x, y: x + y, (0, 1), (0, 1), 3, 3)
        with pytest.raises(DomainError):
            s(1.5, 0.5)

    def test_rmse_of_exact_model(self):
        s = build_simplex_surface(lambda x, y: x + y, (0, 1), (0, 1), 3, 3)
        pts = [(x, y, x + y) for x in s.grid_x for y in s.grid_y]
        assert rmse(s, pts) == 0.0

    def test_efficiency_surface_rmse(self, ref_boxes):
        s = build_simplex_surface(lambda h, p: h / p, ref_boxes.h_dot, ref_boxes.p_el, 4, 4)
        assert s.rmse <= 0.0061

    def test_cost_surface_rmse(self, ref_boxes):
        s = build_simplex_surface(lambda a, b: a / (T_FULL * b), ref_boxes.tac, ref_boxes.m_prod, 3, 3)
        assert s.rmse <= 0.0037


def _area(q, lm, u=0.5, beta=0.8):
    return (q / (u * lm)) ** beta


class TestPlaneEnvelope:
    def test_affine_single_plane(self):
        pts, vals = sample_box(lambda x, y: 2 * x + 3 * y - 1, [(0, 1), (0, 2)], 6)
        e = fit_convex_planes(pts, vals, 1)
        assert len(e.planes) == 1
        assert e.relative_gap == pytest.approx(0.0, abs=1e-9)
        assert e(0.3, 1.1) == pytest.approx(2 * 0.3 + 3 * 1.1 - 1)

    def test_area_term_gap_eight_planes(self):
        pts, vals = sample_box(_area, [(0, 200), (1, 100)], 10, [False, True])
        e = fit_convex_planes(pts, vals, 8)
        Q, L = np.meshgrid(np.linspace(0, 200, 50), np.linspace(1, 100, 50))
        f = _area(Q, L)
        gap = np.max(f - e(Q.ravel(), L.ravel()).reshape(Q.shape)) / f.max()
        assert len(e.planes) <= 8
        assert gap <= 0.05

    def test_area_term_gap_above_convex_limit(self):
        # concave in q: on the lmtd = 1 edge a convex underestimator is below the chord
        pts, vals = sample_box(_area, [(0, 200), (1, 100)], 10, [False, True])
        e = fit_convex_planes(pts, vals, 8)
        q = np.linspace(0, 200, 50)
        f = _area(q, 1.0)
        chord_gap = np.max(f - f[-1] * q / 200) / f.max()
        assert chord_gap == pytest.approx(0.082, abs=2e-3)
        assert np.max(f - e(q, np.ones_like(q))) / f.max() >= chord_gap - 1e-9

    def test_underestimates_samples(self):
        pts, vals = sample_box(_area, [(0, 200), (1, 100)], 10, [False, True])
        e = fit_convex_planes(pts, vals, 8)
        assert np.all(e(*pts.T) <= vals + 1e-7 * vals.max())

    def test_single_plane_matches_minimax_lp(self):
        pts, vals = sample_box(lambda x, y: x**2 + y**2, [(-1, 1), (-1, 1)], 7)
        e = fit_convex_planes(pts, vals, 1)
        # independent LP: min t  s.t.  a.x + b <= f,  f - a.x - b <= t
        n = len(vals)
        A = np.hstack([pts, np.ones((n, 1)), np.zeros((n, 1))])
        B = np.hstack([-pts, -np.ones((n, 1)), -np.ones((n, 1))])
        res = linprog([0, 0, 0, 1], A_ub=np.vstack([A, B]), b_ub=np.concatenate([vals, -vals]),
                      bounds=[(None, None)] * 4)
        assert e.max_underestimate_gap == pytest.approx(res.fun, rel=1e-6)

    def test_more_planes_never_worse(self):
        pts, vals = sample_box(_area, [(0, 200), (1, 100)], 8, [False, True])
        gaps = [fit_convex_planes(pts, vals, k).max_underestimate_gap for k in (1, 2, 4, 8)]
        assert all(a >= b - 1e-9 for a, b in zip(gaps, gaps[1:]))

    def test_no_planes(self):
        with pytest.raises(PwlFitError):
            fit_convex_planes([[0.0], [1.0]], [0.0, 1.0], 0)


class TestLmtd:
    @settings(max_examples=100, deadline=None)
    @given(a=st.floats(0.5, 500), b=st.floats(0.5, 500))
    def test_chen_never_above_exact(self, a, b):
        assert chen_lmtd(a, b) <= lmtd_exact(a, b) * (1 + 1e-9)

    @settings(max_examples=100, deadline=None)
    @given(a=st.floats(0.5, 500), r=st.floats(1.0, 5.0))
    def test_chen_tight_for_moderate_ratio(self, a, r):
        assert chen_lmtd(a, a * r) == pytest.approx(lmtd_exact(a, a * r), rel=0.01)

    def test_equal_approaches(self):
        assert chen_lmtd(10.0, 10.0) == pytest.approx(10.0)
