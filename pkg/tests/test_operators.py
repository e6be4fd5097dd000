import math

import numpy as np
import pytest

from splinelike.errors import DomainError, GridMismatchError
from splinelike.fundamental import QuadratureConfig, build_table, fundamental_value
from splinelike.operators import (
    Interpolant,
    SampleSequence,
    grid,
    interpolate,
    lp_distance,
    lp_tail_bound,
    mixed_hilbert,
    nearest_index,
    whittaker,
)
from splinelike.spectral import FamilySpec
from splinelike.specfun import sinc

Q = QuadratureConfig(target=1e-6)


def hilbert_loop(offset, coeffs, x):
    mx = math.floor(x + 0.5)
    total = 0.0
    for i, c in enumerate(coeffs):
        k = offset + i
        if k != mx:
            total += c / (x - k)
    return total


class TestSampleSequence:
    def test_indexing(self):
        s = SampleSequence(-2, [1.0, 2.0, 3.0])
        assert s[-2] == 1.0 and s[0] == 3.0 and s[5] == 0.0
        assert list(s.indices) == [-2, -1, 0]

    def test_norms(self):
        s = SampleSequence(0, [3.0, -4.0])
        assert s.norm(2) == pytest.approx(5.0)
        assert s.norm(1) == 7.0
        assert s.norm(math.inf) == 4.0
        assert SampleSequence.zeros().norm(2) == 0.0
        with pytest.raises(DomainError):
            s.norm(0.5)

    def test_arithmetic(self):
        a = SampleSequence(0, [1.0, 2.0])
        b = SampleSequence(1, [5.0])
        c = a + b.scaled(2.0)
        assert c.offset == 0 and c.coefficients == (1.0, 12.0)
        assert a.shifted(3)[3] == 1.0


class TestInterpolate:
    def test_delta(self):
        spec = FamilySpec.poisson(2)
        assert interpolate(SampleSequence.delta(3), spec, 4.625, Q) == fundamental_value(spec, 1.625, Q)

    def test_zero(self):
        assert interpolate(SampleSequence.zeros(), FamilySpec.gaussian(1), 0.3, Q) == 0.0

    def test_interpolates_at_integers(self):
        rng = np.random.default_rng(7)
        s = SampleSequence(-5, rng.normal(size=11))
        for spec in (FamilySpec.spline(2), FamilySpec.multiquadric_ii(2.0)):
            interp = Interpolant(s, spec, Q)
            for m in range(-7, 8):
                assert interp(m) == pytest.approx(s[m], abs=interp.error_bound())

    def test_cosine_recovery(self):
        s = SampleSequence.from_function(lambda k: math.cos(2 * k), -40, 40)
        assert interpolate(s, FamilySpec.gaussian(64), 0.5, Q) == pytest.approx(math.cos(1.0), abs=0.02)

    def test_from_table(self):
        spec = FamilySpec.gaussian(2)
        table = build_table(spec, (-6.0, 0.25, 49), Q)
        s = SampleSequence(-1, [0.5, -1.0, 2.0])
        assert interpolate(s, table, 0.75) == pytest.approx(interpolate(s, spec, 0.75, Q), abs=1e-15)
        with pytest.raises(DomainError):
            interpolate(s, table, 0.1)


class TestWhittaker:
    def test_examples(self):
        assert whittaker(SampleSequence.delta(0), 0.5) == pytest.approx(2 / math.pi)
        s = SampleSequence(-3, [0.1, -2.0, 3.5, 4.0])
        for m in range(-3, 1):
            assert whittaker(s, float(m)) == pytest.approx(s[m], abs=1e-15)

    def test_sinc_shift_recovery(self):
        s = SampleSequence.from_function(lambda k: sinc(k - 0.25), -200, 200)
        assert whittaker(s, 0.25) == pytest.approx(1.0, abs=5e-3)

    def test_vectorized(self):
        s = SampleSequence(0, [1.0, 1.0])
        xs = np.array([0.0, 0.5, 1.0])
        assert np.allclose(whittaker(s, xs), [whittaker(s, x) for x in xs])

    def test_shift_equivariance(self):
        rng = np.random.default_rng(3)
        s = SampleSequence(-4, rng.normal(size=9))
        for x in np.arange(-6, 6, 0.125):
            assert whittaker(s.shifted(5), x) == whittaker(s, x - 5)

    def test_boundedness_witness(self):
        # the sinc translates are orthonormal, so the window norm stays below 1
        rng = np.random.default_rng(11)
        xs = grid(60.0, 1 / 16)
        norms = []
        for _ in range(50):
            c = rng.normal(size=41)
            c /= np.linalg.norm(c)
            w = whittaker(SampleSequence(-20, c), xs)
            norms.append(lp_distance(w, np.zeros_like(w), 2, 60.0, 1 / 16))
        assert max(norms) <= 1.0 + 1e-3


class TestMixedHilbert:
    def test_examples(self):
        assert mixed_hilbert(SampleSequence.delta(0), 2.3) == pytest.approx(1 / 2.3)
        assert mixed_hilbert(SampleSequence.delta(0), 0.3) == 0.0

    def test_half_integer_convention(self):
        assert nearest_index(1.5) == 2
        assert nearest_index(-0.5) == 0
        assert nearest_index(0.4999) == 0
        assert mixed_hilbert(SampleSequence.delta(2), 1.5) == 0.0
        assert mixed_hilbert(SampleSequence.delta(1), 1.5) == pytest.approx(2.0)

    def test_random_against_loop(self):
        rng = np.random.default_rng(5)
        c = rng.normal(size=21)
        s = SampleSequence(-10, c)
        assert mixed_hilbert(s, 3.7) == pytest.approx(hilbert_loop(-10, c, 3.7), abs=1e-12)

    def test_integer_point(self):
        s = SampleSequence(0, [1.0, 1.0, 1.0])
        assert mixed_hilbert(s, 1.0) == pytest.approx(1.0 - 1.0)

    def test_non_finite(self):
        with pytest.raises(DomainError):
            mixed_hilbert(SampleSequence.delta(0), math.nan)


class TestLpDistance:
    def test_identical(self):
        g = np.sin(grid(3.0, 0.5))
        for p in (1, 2, 3.5, math.inf):
            assert lp_distance(g, g, p, 3.0, 0.5) == 0.0

    def test_indicator(self):
        h = 1e-6
        xs = grid(1.0, h)
        g = ((xs >= 0) & (xs <= 1)).astype(float)
        assert lp_distance(g, np.zeros_like(g), 2, 1.0, h) == pytest.approx(1.0, abs=1e-6)

    def test_refinement(self):
        def dist(h):
            xs = grid(10.0, h)
            return lp_distance(sinc(xs), sinc(xs - 1e-3), 2, 10.0, h)
        assert dist(1 / 16) == pytest.approx(dist(1 / 160), rel=0.01)

    def test_sup(self):
        xs = grid(2.0, 0.5)
        assert lp_distance(xs, np.zeros_like(xs), math.inf, 2.0, 0.5) == 2.0

    def test_mismatch(self):
        with pytest.raises(GridMismatchError):
            lp_distance(np.zeros(5), np.zeros(6), 2, 1.0, 0.5)
        with pytest.raises(GridMismatchError):
            lp_distance(np.zeros(4), np.zeros(4), 2, 1.0, 0.5)
        with pytest.raises(GridMismatchError):
            grid(1.0, 0.3)

    def test_bad_order(self):
        with pytest.raises(DomainError):
            lp_distance(np.zeros(5), np.zeros(5), 0.5, 1.0, 0.5)

    def test_tail_bound(self):
        # 2 C^p (1 + T)^(1 - p) / (p - 1), then the p-th root
        assert lp_tail_bound(1.0, 2.0, 10.0) == pytest.approx(math.sqrt(2 / 11))
        assert lp_tail_bound(2.0, math.inf, 3.0) == 0.5
        assert lp_tail_bound(1.0, 1.0, 3.0) == math.inf
