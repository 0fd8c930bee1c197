import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import dense_bilinear_error, enumerate_binaries, rel_close

from ptlhen.milp import OPTIMAL, SolveOptions, new_model, solve
from ptlhen.pwl_encode import (
    EncodingError,
    EncodingMisuse,
    bilinear_error_bound,
    encode_bilinear_product,
    encode_plane_envelope,
    encode_pwl1d,
    encode_simplex_surface,
    gray,
    n_bits,
)
from ptlhen.pwl_fit import PlaneEnvelope, Pwl1D, build_simplex_surface

EXACT = SolveOptions(mip_gap_target=0.0)


def _xy(m, lo=0.0, hi=4.0):
    return m.add_variable("x", lo, hi), m.add_variable("y", -100, 100)


class TestHelpers:
    @pytest.mark.parametrize("pieces,bits", [(1, 0), (2, 1), (3, 2), (8, 3), (18, 5)])
    def test_n_bits(self, pieces, bits):
        assert n_bits(pieces) == bits

    def test_gray_neighbours_differ_in_one_bit(self):
        for k in range(31):
            assert bin(gray(k) ^ gray(k + 1)).count("1") == 1


class TestPwl1D:
    def test_single_segment_is_linear(self):
        m = new_model()
        x, y = _xy(m)
        blk = encode_pwl1d(m, Pwl1D.from_points([0, 4], [1, 9]), x, y)
        assert blk.binaries_used == 0 and m.num_binaries == 0
        assert len(m.constraints) == 1

    def test_convex_in_minimized_cost(self):
        m = new_model()
        x, y = _xy(m)
        p = Pwl1D.from_points([0, 2, 4], [4, 1, 2])
        blk = encode_pwl1d(m, p, x, y, relaxation_safe=True)
        assert blk.binaries_used == 0
        s = solve(m, EXACT, bounds={x: (3, 3)}, objective=y)
        assert s[y] == pytest.approx(p(3.0))

    def test_nonconvex_three_segments(self):
        m = new_model()
        x, y = _xy(m)
        blk = encode_pwl1d(m, Pwl1D.from_points([0, 1, 2, 4], [0, 3, 1, 4]), x, y)
        assert blk.binaries_used == 2 and m.num_binaries == 2

    @settings(max_examples=30, deadline=None)
    @given(vals=st.lists(st.floats(-10, 10), min_size=3, max_size=9), t=st.floats(0, 1), sign=st.sampled_from([1, -1]))
    def test_exact_at_any_fixed_x(self, vals, t, sign):
        xs = np.linspace(0, 4, len(vals))
        p = Pwl1D.from_points(xs, vals)
        m = new_model()
        x, y = _xy(m)
        encode_pwl1d(m, p, x, y)
        x0 = 4 * t
        s = solve(m, EXACT, bounds={x: (x0, x0)}, objective=sign * y)
        assert s.status == OPTIMAL
        assert s[y] == pytest.approx(p(x0), abs=1e-7)

    @pytest.mark.parametrize("seed", range(5))
    def test_brute_force_matches(self, seed):
        rng = np.random.default_rng(seed)
        p = Pwl1D.from_points(np.linspace(0, 4, 6), rng.normal(size=6) * 5)
        m = new_model()
        x, y = _xy(m)
        blk = encode_pwl1d(m, p, x, y)
        c = rng.normal(size=2)
        obj = float(c[0]) * x + float(c[1]) * y
        milp = solve(m, EXACT, objective=obj).objective_value
        enum, _ = enumerate_binaries(m, obj, blk.binaries)
        nodes = min(float(c[0]) * a + float(c[1]) * b for a, b in zip(p.breakpoints, p.values))
        assert rel_close(milp, enum, 1e-6) and rel_close(milp, nodes, 1e-6)


class TestSimplexSurface:
    @pytest.mark.parametrize("n,simplices,bits", [(4, 18, 5), (3, 8, 3)])
    def test_binary_count(self, n, simplices, bits):
        s = build_simplex_surface(lambda a, b: a / b, (400, 700), (700, 1200), n, n)
        m = new_model()
        x1, x2, y = m.add_variable("a", 400, 700), m.add_variable("b", 700, 1200), m.add_variable("y", 0, 2)
        blk = encode_simplex_surface(m, s, x1, x2, y)
        assert s.n_simplices == simplices and blk.binaries_used == bits == m.num_binaries

    def test_vertex_exactness(self):
        s = build_simplex_surface(lambda a, b: a / b, (400, 700), (700, 1200), 4, 4)
        m = new_model()
        x1, x2, y = m.add_variable("a", 400, 700), m.add_variable("b", 700, 1200), m.add_variable("y", 0, 2)
        blk = encode_simplex_surface(m, s, x1, x2, y)
        for t, tri in enumerate(blk.simplices):
            fixed = {b: (float(blk.codes[t] >> l & 1),) * 2 for l, b in enumerate(blk.binaries)}
            for v, node in enumerate(tri):
                lam = blk.lambda_vars[3 * t + v]
                sol = solve(m, EXACT, bounds={**fixed, lam: (1.0, 1.0)}, objective=y)
                assert sol[y] == pytest.approx(s.node_value(node), abs=1e-12)
                assert (sol[x1], sol[x2]) == pytest.approx(s.node_xy(node), abs=1e-9)

    def test_node_lookup(self):
        s = build_simplex_surface(lambda a, b: a / b, (400, 700), (700, 1200), 4, 4)
        m = new_model()
        x1, x2, y = m.add_variable("a", 400, 700), m.add_variable("b", 700, 1200), m.add_variable("y", 0, 2)
        encode_simplex_surface(m, s, x1, x2, y)
        for (i, a), (j, b) in itertools.product(enumerate(s.grid_x), enumerate(s.grid_y)):
            for sign in (1, -1):
                sol = solve(m, EXACT, bounds={x1: (a, a), x2: (b, b)}, objective=sign * y)
                assert sol[y] == pytest.approx(s.node_values[i, j], rel=1e-6)

    def test_interior_point_matches_interpolant(self):
        s = build_simplex_surface(lambda a, b: a * b, (0, 1), (0, 1), 3, 3)
        m = new_model()
        x1, x2, y = m.add_variable("a", 0, 1), m.add_variable("b", 0, 1), m.add_variable("y", -1, 2)
        encode_simplex_surface(m, s, x1, x2, y)
        rng = np.random.default_rng(0)
        for a, b in rng.uniform(0, 1, size=(10, 2)):
            lo = solve(m, EXACT, bounds={x1: (a, a), x2: (b, b)}, objective=y)[y]
            hi = solve(m, EXACT, bounds={x1: (a, a), x2: (b, b)}, objective=-1 * y)[y]
            # the point lies in one simplex, or on a shared edge where both agree
            assert lo == pytest.approx(s(a, b), abs=1e-7) and hi == pytest.approx(s(a, b), abs=1e-7)

    def test_unbounded_input_rejected(self):
        s = build_simplex_surface(lambda a, b: a + b, (0, 1), (0, 1), 2, 2)
        m = new_model()
        with pytest.raises(EncodingError):
            encode_simplex_surface(m, s, m.add_variable("a"), m.add_variable("b", 0, 1), m.add_variable("y"))


class TestPlaneEnvelope:
    def test_affine_plane_pins_output(self):
        m = new_model()
        a, y = m.add_variable("a", 0, 10), m.add_variable("y", -100, 100)
        encode_plane_envelope(m, PlaneEnvelope(((2.0, 1.0),), 1), [a], y)
        s = solve(m, EXACT, bounds={a: (3, 3)}, objective=y)
        assert s[y] == pytest.approx(7.0)

    def test_eight_planes_no_binaries(self):
        m = new_model()
        a, y = m.add_variable("a", 0, 10), m.add_variable("y", -100, 100)
        e = PlaneEnvelope(tuple((float(k), -float(k * k)) for k in range(8)), 1)
        blk = encode_plane_envelope(m, e, [a], y)
        assert blk.n_constraints == 8 and m.num_binaries == 0

    def test_duplicate_planes_deduplicated(self):
        m = new_model()
        a, y = m.add_variable("a", 0, 10), m.add_variable("y", -100, 100)
        blk = encode_plane_envelope(m, PlaneEnvelope(((1.0, 0.0), (1.0, 0.0)), 1), [a], y)
        assert blk.n_constraints == 1

    def test_maximized_output_rejected(self):
        m = new_model()
        a, y = m.add_variable("a", 0, 10), m.add_variable("y", -100, 100)
        with pytest.raises(EncodingMisuse):
            encode_plane_envelope(m, PlaneEnvelope(((1.0, 0.0),), 1), [a], y, objective_sign=-1)

    def test_wrong_arity(self):
        m = new_model()
        a, y = m.add_variable("a", 0, 10), m.add_variable("y", -100, 100)
        with pytest.raises(EncodingError):
            encode_plane_envelope(m, PlaneEnvelope(((1.0, 1.0, 0.0),), 2), [a], y)


class TestBilinear:
    def test_grid_node_exact(self):
        m = new_model()
        x, y, z = m.add_variable("x", 0, 1), m.add_variable("y", 0, 1), m.add_variable("z", -1, 2)
        encode_bilinear_product(m, x, y, z, (3, 3))
        for sign in (1, -1):
            s = solve(m, EXACT, bounds={x: (0.5, 0.5), y: (0.5, 0.5)}, objective=sign * z)
            assert s[z] == pytest.approx(0.25, abs=1e-12)

    def test_fixed_factor_is_linear(self):
        m = new_model()
        x, y, z = m.add_variable("x", 2.5, 2.5), m.add_variable("y", 0, 4), m.add_variable("z", -100, 100)
        blk = encode_bilinear_product(m, x, y, z)
        assert blk.binaries_used == 0 and m.num_binaries == 0
        assert solve(m, EXACT, bounds={y: (3, 3)}, objective=z)[z] == pytest.approx(7.5)

    def test_cs1_error_bound(self):
        fb, db = (59.6, 94.4), (10.0, 800.0)
        bound = bilinear_error_bound(fb, db, 5, 5)
        assert bound == pytest.approx((94.4 - 59.6) / 4 * (800 - 10) / 4 / 4)
        dense = dense_bilinear_error(fb, db, 5, 5, n=81)
        assert dense <= bound * (1 + 1e-9)
        assert dense >= 0.99 * bound  # attained at diagonal midpoints

    def test_block_reports_bound(self):
        m = new_model()
        x, y, z = m.add_variable("x", 59.6, 94.4), m.add_variable("y", 10, 800), m.add_variable("z", 0, 1e5)
        blk = encode_bilinear_product(m, x, y, z, (5, 5))
        assert blk.max_error == pytest.approx(bilinear_error_bound((59.6, 94.4), (10, 800), 5, 5))
