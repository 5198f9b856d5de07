import numpy as np
import pytest

from swnehari.grid import (
    GridSpec,
    field_to_csv,
    gaussian_bump,
    gradient,
    h1v_inner,
    h1v_norm_sq,
    integrate,
    neg_laplacian,
    read_field,
    write_field,
)

from conftest import smooth_field


class TestGridSpec:
    def test_cell_centered_nodes_avoid_origin(self):
        g = GridSpec(4.0, 16, 3)
        assert g.h == 0.5
        assert np.min(np.abs(g.axis())) == pytest.approx(0.25)
        assert np.min(g.radius_sq()) > 0

    def test_rejects_bad_specs(self):
        with pytest.raises(ValueError):
            GridSpec(0.0, 16, 3)
        with pytest.raises(ValueError):
            GridSpec(4.0, 7, 3)  # odd
        with pytest.raises(ValueError):
            GridSpec(4.0, 2, 3)  # too small
        with pytest.raises(ValueError):
            GridSpec(4.0, 16, 4)


class TestIntegrate:
    def test_box_volume(self):
        for m in (4, 8, 12):
            g = GridSpec(4.0, m, 3)
            assert integrate(g, np.ones(g.shape)) == pytest.approx(512.0, rel=1e-14)

    def test_odd_function_exactly_zero(self):
        g = GridSpec(3.0, 8, 3)
        x1 = g.coords()[0] + np.zeros(g.shape)
        assert integrate(g, x1) == pytest.approx(0.0, abs=1e-13)

    def test_gaussian_against_analytic(self):
        g = GridSpec(8.0, 64, 3)
        val = integrate(g, np.exp(-g.radius_sq()))
        assert val == pytest.approx(np.pi**1.5, abs=1e-6)

    def test_linear_and_monotone(self):
        g = GridSpec(2.0, 8, 2)
        rng = np.random.default_rng(0)
        f, h = rng.random(g.shape), rng.random(g.shape)
        assert integrate(g, 2 * f + 3 * h) == pytest.approx(
            2 * integrate(g, f) + 3 * integrate(g, h), rel=1e-13
        )
        assert integrate(g, f) <= integrate(g, f + h)


class TestGradient:
    def test_constant_field(self):
        g = GridSpec(4.0, 8, 3)
        for comp in gradient(g, np.full(g.shape, 3.7)):
            np.testing.assert_allclose(comp, 0.0, atol=1e-14)

    def test_linear_field_exact(self):
        g = GridSpec(4.0, 8, 3)
        x2 = g.coords()[1] + np.zeros(g.shape)
        gx = gradient(g, x2)
        np.testing.assert_allclose(gx[1], 1.0, atol=1e-13)
        np.testing.assert_allclose(gx[0], 0.0, atol=1e-13)
        np.testing.assert_allclose(gx[2], 0.0, atol=1e-13)

    def test_second_order_convergence(self):
        errs = []
        for m in (32, 64):
            g = GridSpec(4.0, m, 1)
            x = g.axis()
            f = np.sin(np.pi * x / g.half_width)
            exact = (np.pi / g.half_width) * np.cos(np.pi * x / g.half_width)
            err = np.max(np.abs(gradient(g, f)[0][1:-1] - exact[1:-1]))
            errs.append(err)
        assert errs[0] / errs[1] > 3.4  # ~4x shrink per doubling

    def test_laplacian_is_gradient_adjoint(self):
        # defining contract: integrate((-Lap u) v) == integrate(grad u . grad v)
        g = GridSpec(3.0, 10, 2)
        rng = np.random.default_rng(1)
        for _ in range(5):
            u, v = rng.standard_normal(g.shape), rng.standard_normal(g.shape)
            lhs = integrate(g, neg_laplacian(g, u) * v)
            dots = sum(a * b for a, b in zip(gradient(g, u), gradient(g, v)))
            rhs = integrate(g, dots)
            assert lhs == pytest.approx(rhs, rel=1e-11)

    def test_laplacian_hand_stencil_small_grid(self):
        # hand-built D and D^T D on a 4-point axis must reproduce neg_laplacian
        g = GridSpec(2.0, 4, 1)
        h = g.h
        d = np.array(
            [
                [-1.5, 2.0, -0.5, 0.0],
                [-0.5, 0.0, 0.5, 0.0],
                [0.0, -0.5, 0.0, 0.5],
                [0.0, 0.5, -2.0, 1.5],
            ]
        ) / h
        rng = np.random.default_rng(2)
        u = rng.standard_normal(4)
        np.testing.assert_allclose(neg_laplacian(g, u), d.T @ (d @ u), rtol=1e-12)


class TestH1VInner:
    def test_constant_field_value(self):
        g = GridSpec(2.0, 8, 3)
        v0, cval = 1.3, 0.8
        val = h1v_inner(g, np.full(g.shape, cval), np.full(g.shape, cval), np.full(g.shape, v0))
        assert val == pytest.approx(v0 * cval**2 * 4.0**3, rel=1e-13)

    def test_symmetry_and_bilinearity(self):
        g = GridSpec(2.0, 8, 2)
        rng = np.random.default_rng(3)
        v = 1.0 + rng.random(g.shape)
        u, w = rng.standard_normal(g.shape), rng.standard_normal(g.shape)
        assert h1v_inner(g, u, w, v) == pytest.approx(h1v_inner(g, w, u, v), rel=1e-13)
        assert h1v_norm_sq(g, 3.0 * u, v) == pytest.approx(9.0 * h1v_norm_sq(g, u, v), rel=1e-13)

    def test_positive_definite(self):
        g = GridSpec(2.0, 8, 2)
        rng = np.random.default_rng(4)
        v = np.full(g.shape, 0.5)
        for _ in range(10):
            u = rng.standard_normal(g.shape)
            assert h1v_norm_sq(g, u, v) > 0

    def test_cauchy_schwarz(self):
        g = GridSpec(2.0, 8, 2)
        rng = np.random.default_rng(5)
        v = 0.5 + rng.random(g.shape)
        for _ in range(20):
            u, w = rng.standard_normal(g.shape), rng.standard_normal(g.shape)
            lhs = h1v_inner(g, u, w, v) ** 2
            rhs = h1v_norm_sq(g, u, v) * h1v_norm_sq(g, w, v)
            assert lhs <= rhs * (1 + 1e-12)


class TestSerialization:
    def test_binary_round_trip(self, tmp_path):
        g = GridSpec(4.0, 8, 3)
        rng = np.random.default_rng(6)
        f = rng.standard_normal(g.shape)
        path = tmp_path / "u.field"
        write_field(path, g, f)
        g2, f2 = read_field(path)
        assert g2 == g
        np.testing.assert_array_equal(f, f2)

    def test_header_layout(self, tmp_path):
        g = GridSpec(2.5, 4, 2)
        path = tmp_path / "u.field"
        write_field(path, g, np.zeros(g.shape))
        blob = path.read_bytes()
        assert len(blob) == 16 + 8 * 16  # <IdI header + 4^2 doubles
        assert int.from_bytes(blob[0:4], "little") == 2

    def test_rejects_shape_mismatch(self, tmp_path):
        g = GridSpec(2.0, 4, 2)
        with pytest.raises(ValueError):
            write_field(tmp_path / "bad.field", g, np.zeros((4, 5)))

    def test_rejects_nonfinite_on_read(self, tmp_path):
        g = GridSpec(2.0, 4, 1)
        f = np.zeros(g.shape)
        f[1] = np.inf
        path = tmp_path / "inf.field"
        write_field(path, g, f)
        with pytest.raises(ValueError):
            read_field(path)

    def test_csv_export(self, tmp_path):
        g = GridSpec(1.0, 4, 2)
        f = gaussian_bump(g)
        path = tmp_path / "u.csv"
        field_to_csv(path, g, f)
        lines = path.read_text().splitlines()
        assert lines[0] == "x1,x2,value"
        assert len(lines) == 1 + g.n_nodes
        first = [float(tok) for tok in lines[1].split(",")]
        assert first[:2] == [-0.75, -0.75]
        assert first[2] == pytest.approx(f[0, 0], rel=1e-15)


def test_gaussian_bump_peak_and_positivity():
    g = GridSpec(4.0, 16, 3)
    u = gaussian_bump(g, width=1.0)
    assert np.all(u > 0)
    assert np.max(u) == pytest.approx(np.exp(-3 * 0.25**2), rel=1e-12)


def test_smooth_field_deterministic():
    g = GridSpec(4.0, 8, 3)
    a = smooth_field(g, np.random.default_rng(7))
    b = smooth_field(g, np.random.default_rng(7))
    np.testing.assert_array_equal(a, b)
