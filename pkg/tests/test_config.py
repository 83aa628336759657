import math

import pytest

from risudn.config import (
    ExperimentConfig,
    FadingSpec,
    PointProcessConfig,
    PowerModel,
    QuadratureConfig,
    db_to_linear,
    dbm_to_watt,
    linear_to_db,
    load_experiment_config,
)


class TestConversions:
    def test_db_round_trip(self):
        assert abs(db_to_linear(10.0) - 10.0) < 1e-12
        assert abs(linear_to_db(db_to_linear(-17.3)) + 17.3) < 1e-9

    def test_dbm(self):
        assert abs(dbm_to_watt(30.0) - 1.0) < 1e-12
        assert abs(dbm_to_watt(0.0) - 1e-3) < 1e-15


class TestValidation:
    def test_point_process_invariants(self):
        with pytest.raises(ValueError):
            PointProcessConfig(lambda_n=-1.0)
        with pytest.raises(ValueError):
            PointProcessConfig(radius_R=0.0)

    def test_fading_integral_shape(self):
        with pytest.raises(ValueError):
            FadingSpec(varsigma=0)
        with pytest.raises(ValueError):
            FadingSpec(varsigma=2, alpha=2.0)
        with pytest.raises(ValueError):
            FadingSpec(Q=0)

    def test_power_model(self):
        with pytest.raises(ValueError):
            PowerModel(P_tr=0.0)

    def test_quadrature(self):
        with pytest.raises(ValueError):
            QuadratureConfig(rel_tol=2.0)

    def test_active_intensity(self):
        cfg = PointProcessConfig(lambda_n=0.01, lambda_u=0.01)
        assert abs(cfg.active_bs_fraction - 0.58506) < 1e-5
        assert abs(cfg.lambda_active - 0.0058506) < 1e-7

    def test_window_radius(self):
        cfg = ExperimentConfig(lambda_active=0.01, guard_factor=3.0)
        assert abs(cfg.window_radius() - 3.0 / math.sqrt(math.pi * 0.01)) < 1e-12


class TestTomlLoading:
    def test_overrides_win(self, tmp_path):
        path = tmp_path / "exp.toml"
        path.write_text(
            "[network]\nlambda_active = 0.05\nlambda_m = 0.01\n"
            "[run]\nseed = 1\nn_drops = 10\n"
        )
        cfg = load_experiment_config(str(path), {"run.seed": 77, "run.n_drops": None})
        assert cfg.seed == 77
        assert cfg.n_drops == 10

    def test_active_intensity_derived_from_pair(self, tmp_path):
        path = tmp_path / "exp.toml"
        path.write_text("[network]\nlambda_n = 0.01\nlambda_u = 0.01\nlambda_m = 0.0\n")
        cfg = load_experiment_config(str(path))
        assert abs(cfg.lambda_active - 0.0058506) < 1e-7

    def test_dbm_power_converted_once(self, tmp_path):
        path = tmp_path / "exp.toml"
        path.write_text("[power]\nP_tr_dbm = 20.0\n")
        cfg = load_experiment_config(str(path))
        assert abs(cfg.power.P_tr - 0.1) < 1e-12
