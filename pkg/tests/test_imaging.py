import math
import statistics

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from firank.errors import DegenerateDistribution, EmptyGlcm, InvalidMask
from firank.imaging import (
    FEATURE_NAMES,
    Glcm,
    LesionImage,
    build_glcm,
    extract_all,
    fit_moment_ellipse,
    intensity_features,
    shape_features,
    texture_features,
    trace_boundary,
    traced_perimeter,
)
from firank.synth import disk_mask


def rect_mask(h, w, shape=(80, 80), at=(10, 10)):
    m = np.zeros(shape, dtype=int)
    m[at[0]:at[0] + h, at[1]:at[1] + w] = 1
    return m


def ramp_disk(shape=(70, 70), radius=25, offset=(0, 0)):
    mask = disk_mask(shape, (35 + offset[0], 35 + offset[1]), radius)
    yy, xx = np.mgrid[:shape[0], :shape[1]]
    pixels = 20.0 + 2.0 * (xx - offset[1]) + 0.03 * (yy - offset[0]) ** 2
    return pixels, mask


class TestIntensity:
    def test_symmetric(self):
        mean, median, std, mx, mn, kurt, skew = intensity_features([1, 2, 3])
        assert (mean, median, std, mx, mn) == (2, 2, 1, 3, 1)
        assert skew == 0

    def test_hand_moments(self):
        # beta = (-1,-1,-1,3): m2 = 3, m3 = 6, m4 = 21
        mean, median, std, mx, mn, kurt, skew = intensity_features([0, 0, 0, 4])
        assert mean == 1
        assert median == 0
        assert std == pytest.approx(2.0)
        assert skew == pytest.approx(6 / 3 ** 1.5)
        assert kurt == pytest.approx(21 / 9)

    def test_constant_rejected(self):
        with pytest.raises(DegenerateDistribution):
            intensity_features([5, 5, 5])

    def test_against_statistics_module(self):
        x = np.random.default_rng(3).gamma(2.0, 3.0, size=101)
        mean, median, std, *_ = intensity_features(x)
        assert mean == pytest.approx(statistics.fmean(x))
        assert median == pytest.approx(statistics.median(x))
        assert std == pytest.approx(statistics.stdev(x))

    def test_even_median(self):
        assert intensity_features([1, 2, 4, 10])[1] == 3.0


class TestEllipse:
    def test_rectangle_axis_ratio(self):
        M, m, _ = fit_moment_ellipse(rect_mask(10, 40))
        # variance of a uniform run of w unit pixels is w**2/12 with the pixel-area term
        assert M == pytest.approx(4 * math.sqrt(40 ** 2 / 12))
        assert M / m == pytest.approx(4.0, rel=0.02)

    def test_disk_ratio(self):
        M, m, _ = fit_moment_ellipse(disk_mask((80, 80), (40, 40), 20))
        assert M / m == pytest.approx(1.0, rel=0.02)

    def test_rotation(self):
        mask = rect_mask(7, 23) | disk_mask((80, 80), (20, 35), 6)
        a = fit_moment_ellipse(mask)
        b = fit_moment_ellipse(np.rot90(mask))
        assert a[0] == pytest.approx(b[0], abs=1e-9)
        assert a[1] == pytest.approx(b[1], abs=1e-9)

    def test_single_row_not_degenerate(self):
        M, m, _ = fit_moment_ellipse(rect_mask(1, 20))
        assert m == pytest.approx(4 * math.sqrt(1 / 12))


class TestPerimeter:
    @pytest.mark.parametrize("h,w", [(50, 50), (10, 40), (4, 4), (1, 20)])
    def test_rectangle_closed_form(self, h, w):
        expected = 2 * (w - 1) + 2 * (h - 1)
        assert traced_perimeter(rect_mask(h, w)) == pytest.approx(expected)

    def test_diamond_all_diagonal(self):
        r = 12
        yy, xx = np.mgrid[:40, :40]
        mask = (abs(yy - 20) + abs(xx - 20) <= r).astype(int)
        assert traced_perimeter(mask) == pytest.approx(4 * r * math.sqrt(2))

    def test_plus_shape_by_hand(self):
        m = np.zeros((7, 7), dtype=int)
        m[1:6, 2:5] = 1
        m[2:5, 1:6] = 1
        # 4 diagonal corner cuts and 4 straight edges of length 2
        assert traced_perimeter(m) == pytest.approx(4 * math.sqrt(2) + 8)

    def test_chain_is_closed_8_path(self):
        chain = trace_boundary(disk_mask((50, 50), (25, 25), 12))
        pts = np.array(chain + chain[:1])
        steps = np.abs(np.diff(pts, axis=0)).max(axis=1)
        assert np.all(steps == 1)

    def test_linear_growth(self):
        ws = np.array([10, 20, 40])
        p = np.array([traced_perimeter(rect_mask(w, w)) for w in ws])
        slope, intercept = np.polyfit(ws, p, 1)
        np.testing.assert_allclose(slope * ws + intercept, p, rtol=0.05)
        assert np.all(np.diff(p) > 0)


class TestShape:
    def test_square(self):
        area, perim, circ, elong, form = shape_features(rect_mask(50, 50))
        assert area == 2500
        assert circ == pytest.approx(math.pi / 4, abs=0.05)
        assert elong == pytest.approx(1.0)
        assert form == pytest.approx(perim * elong / (8 * area))

    def test_disk(self):
        area, perim, circ, elong, form = shape_features(disk_mask((80, 80), (40, 40), 30))
        assert 0.85 <= circ <= 1.1
        assert elong == pytest.approx(1.0, abs=0.03)

    def test_translation(self):
        a = shape_features(disk_mask((90, 90), (40, 40), 20))
        b = shape_features(disk_mask((90, 90), (47, 33), 20))
        assert a == b

    def test_spacing_scales_area_and_perimeter(self):
        mask = rect_mask(20, 30)
        px = shape_features(mask)
        mm = shape_features(mask, pixel_spacing=0.084)
        assert mm[0] == pytest.approx(px[0] * 0.084 ** 2)
        assert mm[1] == pytest.approx(px[1] * 0.084)
        assert mm[2] == pytest.approx(px[2])
        assert mm[3] == px[3]

    def test_invalid_masks(self):
        with pytest.raises(InvalidMask):
            shape_features(rect_mask(3, 3))
        two = rect_mask(5, 5) | rect_mask(5, 5, at=(30, 30))
        with pytest.raises(InvalidMask):
            shape_features(two)


class TestGlcm:
    def test_constant(self):
        g = build_glcm(np.full((3, 3), 7.0))
        assert g.table[0, 0] == 1.0
        assert g.table.sum() == 1.0

    def test_hand_pairs(self):
        g = build_glcm(np.array([[0, 255, 0, 255]]), levels=2)
        np.testing.assert_allclose(g.table, [[0, 2 / 3], [1 / 3, 0]])

    def test_pairs_need_both_ends_in_mask(self):
        img = np.array([[0, 255, 0, 255]])
        mask = np.array([[1, 1, 0, 1]])
        # only (1,2) survives
        g = build_glcm(img, mask, levels=2)
        np.testing.assert_allclose(g.table, [[0, 1], [0, 0]])

    def test_no_pairs(self):
        with pytest.raises(EmptyGlcm):
            build_glcm(np.array([[1.0, 2.0]]), np.array([[1, 0]]))

    def test_loop_oracle(self):
        rng = np.random.default_rng(11)
        img = rng.uniform(0, 100, size=(9, 12))
        mask = rng.random((9, 12)) < 0.7
        L = 5
        g = build_glcm(img, mask, levels=L)
        lo, hi = img[mask].min(), img[mask].max()
        counts = np.zeros((L, L))
        for r in range(9):
            for c in range(11):
                if mask[r, c] and mask[r, c + 1]:
                    a = min(int((img[r, c] - lo) / (hi - lo) * L), L - 1)
                    b = min(int((img[r, c + 1] - lo) / (hi - lo) * L), L - 1)
                    counts[a, b] += 1
        np.testing.assert_allclose(g.table, counts / counts.sum(), atol=1e-15)

    @pytest.mark.parametrize("angle,step", [(45, (-1, 1)), (90, (-1, 0)), (135, (-1, -1))])
    def test_other_angles(self, angle, step):
        img = np.arange(16.0).reshape(4, 4)
        g = build_glcm(img, levels=16, angle_deg=angle)
        n_pairs = (4 - abs(step[0])) * (4 - abs(step[1]))
        assert g.table.sum() == pytest.approx(1.0)
        assert np.count_nonzero(g.table) == n_pairs


class TestTexture:
    def test_point_mass(self):
        t = np.zeros((4, 4))
        t[0, 0] = 1
        assert texture_features(Glcm(t, 4, 1, 0)) == (0.0, 0.0, 0.0)

    def test_off_diagonal(self):
        t = np.array([[0, 0.5], [0.5, 0]])
        contrast, corr, entropy = texture_features(Glcm(t, 2, 1, 0))
        assert contrast == pytest.approx(1.0)
        assert entropy == pytest.approx(1.0)
        assert corr == pytest.approx(-1.0)

    def test_uniform_entropy_max(self):
        L = 32
        contrast, corr, entropy = texture_features(Glcm(np.full((L, L), 1 / L ** 2), L, 1, 0))
        assert entropy == pytest.approx(2 * math.log2(L))
        assert corr == pytest.approx(0.0, abs=1e-12)

    def test_diagonal_correlation_one(self):
        t = np.diag([0.25, 0.25, 0.5])
        assert texture_features(Glcm(t, 3, 1, 0))[1] == pytest.approx(1.0)


class TestExtract:
    def test_constant_disk_rejected(self):
        mask = disk_mask((40, 40), (20, 20), 10)
        with pytest.raises(DegenerateDistribution):
            extract_all(np.full((40, 40), 9.0), mask)

    def test_ramp_disk_against_scratch_oracle(self):
        pixels, mask = ramp_disk()
        fv = extract_all(pixels, mask)
        v = fv.as_array()
        assert v.shape == (15,)
        assert np.all(np.isfinite(v))
        assert fv[13] == fv.t_contrast > 0

        x = pixels[mask == 1]
        mu = sum(x) / len(x)
        b = [xi - mu for xi in x]
        m2 = sum(t ** 2 for t in b) / len(b)
        assert fv.i_mean == pytest.approx(mu)
        assert fv.i_std_dev == pytest.approx(math.sqrt(sum(t ** 2 for t in b) / (len(b) - 1)))
        assert fv.i_kurtosis == pytest.approx(sum(t ** 4 for t in b) / len(b) / m2 ** 2)
        assert fv.i_skewness == pytest.approx(sum(t ** 3 for t in b) / len(b) / m2 ** 1.5)
        assert fv.s_area == mask.sum()
        assert fv.s_circularity == pytest.approx(4 * math.pi * fv.s_area / fv.s_perimeter ** 2)
        assert fv.s_form == pytest.approx(fv.s_perimeter * fv.s_elongation / (8 * fv.s_area))

        # GLCM texture from dictionaries of pair counts
        lo, hi = x.min(), x.max()
        level = lambda val: min(int((val - lo) / (hi - lo) * 32), 31) + 1  # noqa: E731
        pairs = {}
        for r, c in zip(*np.nonzero(mask)):
            if c + 1 < mask.shape[1] and mask[r, c + 1]:
                key = (level(pixels[r, c]), level(pixels[r, c + 1]))
                pairs[key] = pairs.get(key, 0) + 1
        total = sum(pairs.values())
        P = {k: v / total for k, v in pairs.items()}
        assert fv.t_contrast == pytest.approx(sum((i - j) ** 2 * p for (i, j), p in P.items()))
        assert fv.t_entropy == pytest.approx(-sum(p * math.log2(p) for p in P.values()))
        mx = sum(i * p for (i, _), p in P.items())
        my = sum(j * p for (_, j), p in P.items())
        sx = math.sqrt(sum((i - mx) ** 2 * p for (i, _), p in P.items()))
        sy = math.sqrt(sum((j - my) ** 2 * p for (_, j), p in P.items()))
        corr = (sum(i * j * p for (i, j), p in P.items()) - mx * my) / (sx * sy)
        assert fv.t_correlation == pytest.approx(corr)

    def test_deterministic(self):
        pixels, mask = ramp_disk()
        a = extract_all(pixels, mask).as_array()
        b = extract_all(pixels.copy(), mask.copy()).as_array()
        assert np.array_equal(a, b)

    def test_translation_invariance(self):
        a = extract_all(*ramp_disk()).as_array()
        b = extract_all(*ramp_disk(offset=(6, -4))).as_array()
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-9)

    def test_lesion_image_type(self):
        pixels, mask = ramp_disk()
        lesion = LesionImage(pixels, mask, pixel_spacing=0.084)
        fv = extract_all(lesion)
        assert fv.s_area == pytest.approx(mask.sum() * 0.084 ** 2)
        assert FEATURE_NAMES[12] == "t_contrast"


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 50), st.floats(-100, 100))
def test_intensity_affine_equivariance(a, b):
    pixels, mask = ramp_disk()
    f = extract_all(pixels, mask)
    g = extract_all(a * pixels + b, mask)
    for name in ("i_mean", "i_median", "i_maximum", "i_minimum"):
        assert getattr(g, name) == pytest.approx(a * getattr(f, name) + b, rel=1e-9, abs=1e-9)
    assert g.i_std_dev == pytest.approx(a * f.i_std_dev, rel=1e-9)
    assert g.i_kurtosis == pytest.approx(f.i_kurtosis, rel=1e-9)
    assert g.i_skewness == pytest.approx(f.i_skewness, rel=1e-9, abs=1e-12)
    for name in ("t_contrast", "t_correlation", "t_entropy"):
        assert getattr(g, name) == pytest.approx(getattr(f, name), rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_glcm_marginals_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    img = rng.uniform(0, 255, size=(20, 20))
    g = build_glcm(img, levels=int(rng.integers(2, 33)))
    assert g.px.sum() == pytest.approx(1.0, abs=1e-12)
    assert g.py.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(g.table >= 0)
    assert g.table.sum() == pytest.approx(1.0, abs=1e-12)
