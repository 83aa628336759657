import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from risudn.config import PointProcessConfig
from risudn.ppp import (
    GAMMA_35,
    active_bs_probability,
    make_drop_rng,
    realization_from_json,
    realization_to_json,
    ris_in_cell_probability,
    sample_hppp,
    sample_realization,
    voronoi_area_pdf,
)


class TestSampleHppp:
    def test_zero_intensity_gives_empty(self, rng):
        assert len(sample_hppp(0.0, 10.0, rng)) == 0

    def test_invalid_arguments(self, rng):
        with pytest.raises(ValueError):
            sample_hppp(-1.0, 10.0, rng)
        with pytest.raises(ValueError):
            sample_hppp(1.0, 0.0, rng)

    def test_mean_count(self, rng):
        lam, R, n = 0.01, 100.0, 10000
        counts = [len(sample_hppp(lam, R, rng)) for _ in range(n)]
        expected = lam * math.pi * R * R  # 314.159
        assert abs(np.mean(counts) / expected - 1.0) < 0.02

    def test_radius_marginal_ks(self, rng):
        lam, R = 0.01, 100.0
        radii = np.concatenate([sample_hppp(lam, R, rng).r for _ in range(50)])
        # CDF of the radial-generation law is (x/R)^2
        res = stats.kstest(radii, lambda x: (x / R) ** 2)
        assert res.pvalue > 0.01

    def test_angle_marginal_ks(self, rng):
        radii = [sample_hppp(0.01, 100.0, rng) for _ in range(30)]
        angles = np.concatenate([p.theta for p in radii])
        res = stats.kstest(angles, stats.uniform(loc=0, scale=2 * math.pi).cdf)
        assert res.pvalue > 0.01

    def test_counts_poisson_chi_square(self, rng):
        lam, R = 0.02, 20.0  # mean ~ 25
        mean = lam * math.pi * R * R
        counts = np.array([len(sample_hppp(lam, R, rng)) for _ in range(10000)])
        lo, hi = int(mean - 4 * math.sqrt(mean)), int(mean + 4 * math.sqrt(mean))
        edges = list(range(lo, hi + 1))
        observed = np.array([(counts == k).sum() for k in edges], dtype=float)
        observed = np.append(observed, (counts < lo).sum() + (counts > hi).sum())
        expected = np.array([stats.poisson.pmf(k, mean) for k in edges]) * counts.size
        expected = np.append(expected, counts.size - expected.sum())
        keep = expected > 5
        chi = ((observed[keep] - expected[keep]) ** 2 / expected[keep]).sum()
        pval = 1 - stats.chi2.cdf(chi, keep.sum() - 1)
        assert pval > 0.01

    def test_seed_reproducibility(self):
        a = sample_hppp(0.05, 30.0, make_drop_rng(7, 3))
        b = sample_hppp(0.05, 30.0, make_drop_rng(7, 3))
        assert np.array_equal(a.r, b.r) and np.array_equal(a.theta, b.theta)
        c = sample_hppp(0.05, 30.0, make_drop_rng(7, 4))
        assert not (len(a) == len(c) and np.array_equal(a.r, c.r))


class TestVoronoiAreaPdf:
    def test_zero_at_origin(self):
        assert voronoi_area_pdf(0.0) == 0.0

    def test_normalization(self):
        from scipy.integrate import quad

        val, _ = quad(voronoi_area_pdf, 0, np.inf)
        assert abs(val - 1.0) < 1e-6

    def test_value_at_one(self):
        # 3.5^3.5/Gamma(3.5) * exp(-3.5)
        expected = 3.5**3.5 / GAMMA_35 * math.exp(-3.5)
        assert abs(voronoi_area_pdf(1.0) - expected) < 1e-12
        assert abs(expected - 0.7189) < 5e-4

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            voronoi_area_pdf(-0.1)


class TestActiveBsProbability:
    def test_no_ues(self):
        p, lam = active_bs_probability(0.0, 0.01)
        assert p == 0.0 and lam == 0.0

    def test_equal_intensities(self):
        p, lam = active_bs_probability(0.01, 0.01)
        assert abs(p - 0.58506) < 1e-5
        assert abs(lam - 0.58506 * 0.01) < 1e-7

    def test_dense_ue_limit(self):
        p, _ = active_bs_probability(1e6, 0.01)
        assert p > 0.9999

    def test_zero_bs_rejected(self):
        with pytest.raises(ValueError):
            active_bs_probability(0.01, 0.0)

    @given(
        lu=st.floats(1e-6, 10.0), ln=st.floats(1e-6, 10.0),
        factor=st.floats(1.01, 4.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotonicity(self, lu, ln, factor):
        p0, _ = active_bs_probability(lu, ln)
        p_up, _ = active_bs_probability(lu * factor, ln)
        p_dn, _ = active_bs_probability(lu, ln * factor)
        assert p_up >= p0 >= p_dn


class TestRisInCell:
    def test_exact_coefficient_at_zero(self):
        assert abs(ris_in_cell_probability(0.01, 0.0) - 1.0) < 1e-12

    def test_literal_coefficient_at_zero(self):
        val = ris_in_cell_probability(0.01, 0.0, exact_coefficient=False)
        assert abs(val - 0.3 * GAMMA_35) < 1e-12
        assert abs(val - 0.99700) < 5e-5

    def test_far_limit(self):
        assert ris_in_cell_probability(0.01, 1e4) < 1e-12

    def test_monotone_decreasing(self):
        d = np.linspace(0, 50, 40)
        vals = ris_in_cell_probability(0.01, d)
        assert np.all(np.diff(vals) <= 1e-15)
        vals2 = ris_in_cell_probability(0.02, d[1:])
        assert np.all(vals2 <= ris_in_cell_probability(0.01, d[1:]) + 1e-15)

    def test_negative_distance_rejected(self):
        with pytest.raises(ValueError):
            ris_in_cell_probability(0.01, -1.0)


class TestRealizationJson:
    def test_round_trip(self, rng):
        cfg = PointProcessConfig(lambda_n=0.02, lambda_m=0.03, lambda_u=0.05, radius_R=20.0)
        real = sample_realization(cfg, rng)
        back = realization_from_json(realization_to_json(real))
        assert np.allclose(back.bs.r, real.bs.r)
        assert np.allclose(back.ris.theta, real.ris.theta)
        assert np.allclose(back.kappa, real.kappa)
        assert back.radius_R == real.radius_R

    def test_kappa_range(self, rng):
        cfg = PointProcessConfig(lambda_n=0.01, lambda_m=0.05, lambda_u=0.01, radius_R=30.0)
        real = sample_realization(cfg, rng)
        assert np.all((real.kappa >= 0) & (real.kappa < 2 * math.pi))

    def test_unknown_schema_rejected(self):
        with pytest.raises(ValueError):
            realization_from_json('{"schema": "other", "bs": [], "ris": [], "ue": [], "radius": 1}')
