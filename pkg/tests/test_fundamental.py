import math

import numpy as np
import pytest
from scipy import integrate

from splinelike.errors import DomainError, ToleranceError
from splinelike.fundamental import (
    FundamentalTable,
    QuadratureConfig,
    build_table,
    fundamental_value,
    fundamental_values,
    fundamental_with_error,
    l_hat_partition,
    l_hat_ratio,
    truncation_bound,
)
from splinelike.spectral import FamilySpec
from splinelike.specfun import sinc

Q = QuadratureConfig(target=1e-6)


def hat(x):
    return np.maximum(0.0, 1.0 - np.abs(x))


def gaussian_reference(alpha, x):
    # direct periodization and adaptive quadrature, no ratio form
    def integrand(xi):
        j = np.arange(-30, 31)
        p = np.sum(np.exp(-alpha * (xi + 2 * np.pi * j) ** 2))
        return np.exp(-alpha * xi * xi) / p
    val, _ = integrate.quad(integrand, 0.0, 12.0, weight="cos", wvar=x, limit=400)
    return val / math.pi


class TestLHat:
    def test_spline_endpoint(self):
        assert l_hat_ratio(FamilySpec.spline(1), 0, math.pi) == pytest.approx(4 / math.pi ** 2, rel=1e-12)

    def test_spline_origin(self):
        assert l_hat_ratio(FamilySpec.spline(1), 0, 0.0) == 1.0

    def test_gaussian_tiny_but_finite(self):
        v = l_hat_ratio(FamilySpec.gaussian(64), 1, 0.1)
        assert 0.0 <= v < 1e-100

    def test_gaussian_against_direct_sum(self):
        u, m = 0.7, 1
        xi = u + 2 * math.pi * m
        direct = math.exp(-xi * xi) / sum(math.exp(-(u + 2 * math.pi * j) ** 2) for j in range(-6, 7))
        assert l_hat_ratio(FamilySpec.gaussian(1), m, u) == pytest.approx(direct, rel=1e-13)

    def test_range(self, zoo_spec):
        for u in np.linspace(-math.pi, math.pi, 9):
            for m in (-2, 0, 3):
                assert 0.0 <= l_hat_ratio(zoo_spec, m, u) <= 1.0

    def test_partition_of_unity(self, zoo_spec):
        u = np.linspace(-math.pi, math.pi, 129)
        assert np.max(np.abs(l_hat_partition(zoo_spec, u) - 1.0)) <= 1e-10

    def test_domain(self):
        with pytest.raises(DomainError):
            l_hat_ratio(FamilySpec.gaussian(1), 0, 3.5)


class TestFundamentalValue:
    def test_cardinal_at_zero_and_seven(self):
        spec = FamilySpec.gaussian(4)
        assert fundamental_value(spec, 0.0, Q) == pytest.approx(1.0, abs=1e-6)
        assert fundamental_value(spec, 7.0, Q) == pytest.approx(0.0, abs=1e-6)

    def test_close_to_sinc_for_large_alpha(self):
        assert fundamental_value(FamilySpec.gaussian(64), 0.5, Q) == pytest.approx(2 / math.pi, abs=0.01)

    @pytest.mark.parametrize("x", [0.3, 1.7, 4.25, 11.0])
    def test_gaussian_reference(self, x):
        for alpha in (1.0, 4.0):
            assert fundamental_value(FamilySpec.gaussian(alpha), x, Q) == pytest.approx(
                gaussian_reference(alpha, x), abs=2e-6)

    def test_spline_degree_one_is_hat(self):
        xs = np.linspace(-6.0, 6.0, 97)
        got = fundamental_values(FamilySpec.spline(1), xs, Q)
        assert np.max(np.abs(got - hat(xs))) < 1e-5

    def test_lattice_sum_matches_explicit_panels(self):
        spec = FamilySpec.spline(2)
        explicit = QuadratureConfig(target=1e-5, panels=80)
        for x in (0.0, 0.4, 1.5, 3.25, 7.9):
            assert fundamental_value(spec, x, Q) == pytest.approx(
                fundamental_value(spec, x, explicit), abs=2e-5)

    def test_exact_evenness(self, zoo_spec):
        for x in (0.1, 0.75, 2.5, 9.3):
            assert fundamental_value(zoo_spec, x, Q) == fundamental_value(zoo_spec, -x, Q)

    def test_error_estimate_within_target(self):
        val, err = fundamental_with_error(FamilySpec.poisson(1), 3.3, Q)
        assert 0.0 <= err <= Q.target

    def test_panel_budget_too_small(self):
        with pytest.raises(ToleranceError):
            fundamental_value(FamilySpec.poisson(1), 0.5, QuadratureConfig(target=1e-12, panels=1))

    @pytest.mark.parametrize("spec", [FamilySpec.poisson(1), FamilySpec.spline(2)])
    def test_target_below_rounding_floor(self, spec):
        with pytest.raises(ToleranceError):
            fundamental_value(spec, 0.5, QuadratureConfig(target=1e-17))

    def test_truncation_bound_decreases(self):
        spec = FamilySpec.multiquadric_i(1, 1.0)
        assert truncation_bound(spec, 8) < truncation_bound(spec, 4)

    def test_non_finite(self):
        with pytest.raises(DomainError):
            fundamental_value(FamilySpec.gaussian(1), math.inf)

    @pytest.mark.parametrize("bad", [dict(target=0.0), dict(panels=0), dict(tail_tol=-1.0),
                                     dict(points_per_panel=0)])
    def test_config_validation(self, bad):
        with pytest.raises(DomainError):
            QuadratureConfig(**bad)


class TestTable:
    def test_poisson_cardinality(self):
        table = build_table(FamilySpec.poisson(2), (-10.0, 0.125, 161), Q)
        errs = table.integer_errors()
        assert len(errs) == 21
        assert max(errs.values()) <= table.error_bound

    def test_hat_oracle(self):
        table = build_table(FamilySpec.spline(1), (-10.0, 0.125, 161), Q)
        assert np.max(np.abs(table.values - hat(table.x))) < 5e-3

    def test_single_point(self):
        table = build_table(FamilySpec.gaussian(1), (0.0, 1.0, 1), Q)
        assert table.values[0] == pytest.approx(1.0, abs=Q.target)

    def test_decay_constant(self):
        table = build_table(FamilySpec.gaussian(2), (-40.0, 0.25, 321), Q)
        assert np.all(np.abs(table.values) * (1 + np.abs(table.x)) <= table.decay_constant)

    def test_threads_bit_identical(self):
        spec = FamilySpec.multiquadric_ii(2.0)
        one = build_table(spec, (-5.0, 0.1, 101), Q, jobs=1)
        many = build_table(spec, (-5.0, 0.1, 101), Q, jobs=4)
        assert np.array_equal(one.values, many.values)

    def test_csv_round_trip(self, tmp_path):
        table = build_table(FamilySpec.poisson(1), (-2.0, 0.5, 9), Q)
        path = tmp_path / "l.csv"
        table.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,value"
        assert len(lines) == 10
        x, v = FundamentalTable.read_csv(path)
        assert np.array_equal(x, table.x) and np.array_equal(v, table.values)

    def test_bad_grid(self):
        with pytest.raises(DomainError):
            build_table(FamilySpec.gaussian(1), (0.0, 0.0, 5))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            FundamentalTable(FamilySpec.gaussian(1), 0.0, 1.0, 3, np.zeros(2), 1e-6)


GRIDS = {
    "spline": [FamilySpec.spline(k) for k in range(1, 7)],
    "gaussian": [FamilySpec.gaussian(a) for a in (1, 2, 4, 8, 16, 32, 64)],
    "poisson": [FamilySpec.poisson(a) for a in (1, 2, 4, 8, 16, 32)],
    "mq1": [FamilySpec.multiquadric_i(k, 1.0) for k in range(1, 7)],
    "mq2": [FamilySpec.multiquadric_ii(c) for c in (1, 2, 4, 8, 16)],
}
# sup |sinc(x)| (1 + |x|), the constant of the limit
SINC_CONSTANT = float(np.max(np.abs(sinc(np.linspace(0, 40, 640001))) * (1 + np.linspace(0, 40, 640001))))


def decay_constants(family):
    return [build_table(s, (-40.0, 1 / 16, 1281), Q).decay_constant for s in GRIDS[family]]


@pytest.mark.parametrize("family", ["gaussian", "poisson", "mq1", "mq2"])
def test_decay_constant_growth_below_ten_percent(family):
    cs = decay_constants(family)
    assert max(cs) <= 1.10 * min(cs)


def test_spline_decay_constants_rise_from_hat_to_sinc():
    # the hat function has C = 1 exactly and the limit has C ~ 1.125,
    # so the spline grid cannot stay within 10 percent
    cs = decay_constants("spline")
    assert cs[0] == pytest.approx(1.0, abs=1e-6)
    assert all(c <= SINC_CONSTANT * (1 + 1e-4) for c in cs)
    assert max(cs[1:]) <= 1.10 * min(cs[1:])


@pytest.mark.parametrize("family", list(GRIDS))
def test_single_decay_constant_bounds_every_family(family):
    assert max(decay_constants(family)) <= SINC_CONSTANT * (1 + 1e-4)


@pytest.mark.parametrize("family", list(GRIDS))
@pytest.mark.parametrize("x", [0.25, 0.5, 1.5, 3.7])
def test_pointwise_distance_to_sinc_decreases(family, x):
    errs = [abs(fundamental_value(s, x, Q) - sinc(x)) for s in GRIDS[family]]
    assert all(b < a for a, b in zip(errs, errs[1:]))
