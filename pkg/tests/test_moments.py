import math

import numpy as np
import pytest
from scipy.integrate import quad

from risudn.analytic.moments import mean_interference_power, mean_signal_power
from risudn.config import FadingSpec, QuadratureConfig


SPEC = FadingSpec(varsigma=1, alpha=4.0, Q=10)


class TestSignalMoment:
    def test_no_ris_reduces_to_direct_only(self):
        sm = mean_signal_power(SPEC, 0.01, 0.0, 1.0)
        f = lambda d: 2 * math.pi * 0.01 * d * math.exp(-math.pi * 0.01 * d * d)
        direct, _ = quad(lambda d: (1 + d) ** (-4) * f(d), 0, np.inf)
        assert sm.cross == sm.coherent == sm.incoherent == 0.0
        assert abs(sm.total / direct - 1.0) < 1e-3

    def test_ris_terms_nonnegative(self):
        base = mean_signal_power(SPEC, 0.01, 0.0, 1.0).total
        with_ris = mean_signal_power(SPEC, 0.01, 0.02, 1.0)
        assert with_ris.total >= base
        assert min(with_ris.cross, with_ris.coherent, with_ris.incoherent) >= 0.0

    def test_monotone_in_lambda_m(self):
        vals = [mean_signal_power(SPEC, 0.01, lm, 1.0).total for lm in (0.0, 0.005, 0.01, 0.02)]
        assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))

    def test_scales_with_p_tr(self):
        a = mean_signal_power(SPEC, 0.01, 0.01, 1.0).total
        b = mean_signal_power(SPEC, 0.01, 0.01, 2.5).total
        assert abs(b / a - 2.5) < 1e-9

    def test_literal_mode_differs_but_same_structure(self):
        e = mean_signal_power(SPEC, 0.01, 0.01, 1.0, mode="exact")
        l = mean_signal_power(SPEC, 0.01, 0.01, 1.0, mode="literal")
        assert e.direct == pytest.approx(l.direct)
        assert e.total != l.total


class TestInterferenceMoment:
    def test_vanishes_with_intensity(self):
        im = mean_interference_power(SPEC, 1e-7, 0.01, 1.0)
        assert im["total"] < 1e-5

    def test_no_ris_keeps_direct_term_only(self):
        im = mean_interference_power(SPEC, 0.01, 0.0, 1.0)
        assert im["i2"] == 0.0
        # 2 pi l' (1/6 - F(4, pi l'))
        from risudn.analytic.special import func_F

        expected = 2 * math.pi * 0.01 * (1 / 6 - func_F(4.0, math.pi * 0.01))
        assert abs(im["i1"] / expected - 1.0) < 1e-9

    def test_i2_proportional_to_q_lambda_m(self):
        base = mean_interference_power(SPEC, 0.01, 0.01, 1.0)["i2"]
        doubled_q = mean_interference_power(FadingSpec(1, 4.0, 20), 0.01, 0.01, 1.0)["i2"]
        doubled_lm = mean_interference_power(SPEC, 0.01, 0.02, 1.0)["i2"]
        assert abs(doubled_q / base - 2.0) < 1e-6
        assert abs(doubled_lm / base - 2.0) < 1e-6

    def test_additivity_is_structural(self):
        im = mean_interference_power(SPEC, 0.01, 0.01, 1.0)
        assert im["total"] == im["i1"] + im["i2"]


class TestQuadratureStability:
    def test_refinement_changes_little(self):
        q0 = QuadratureConfig()
        q1 = QuadratureConfig(n_radial=2 * q0.n_radial, n_angle=2 * q0.n_angle,
                              n_dist=2 * q0.n_dist)
        a = mean_signal_power(SPEC, 0.01, 0.01, 1.0, quad=q0).total
        b = mean_signal_power(SPEC, 0.01, 0.01, 1.0, quad=q1).total
        assert abs(a / b - 1.0) < 0.01
