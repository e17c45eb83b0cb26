import numpy as np
import pytest
from numpy.testing import assert_allclose

from branchline import objective as obj
from branchline import sade, surrogate as sg
from branchline.errors import TopologyMismatchError, ValidationError
from branchline.microstrip import Substrate

SUB_THIN = Substrate(2.2, 0.0009, 0.508)


def constant_model(outputs, n_inputs=6, topology="folded"):
    """Zero-weight model whose denormalized output is always ``outputs``."""
    return sg.MlpModel(
        topology=topology,
        layer_sizes=(n_inputs, 4, 6),
        activation="tanh",
        weights=[np.zeros((n_inputs, 4)), np.zeros((4, 6))],
        biases=[np.zeros(4), np.zeros(6)],
        x_offset=np.zeros(n_inputs),
        x_scale=np.ones(n_inputs),
        y_offset=np.asarray(outputs, dtype=float),
        y_scale=np.ones(6),
    )


ON_TARGET = [-30.0, -3.0, -3.0, -30.0, -45.0, -135.0]  # meets a 3 dB / 90 deg spec


class TestLossTerms:
    def test_exact_targets_give_zero(self):
        spec = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0)
        b = obj.loss_terms(ON_TARGET, spec)
        assert b.l_cf == b.l_pd == b.l_is == b.l_rc == 0.0
        assert b.total == 0.0

    def test_linearity_in_weights(self):
        spec = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.5,
                              alpha=1.0, beta=1.0, gamma=1.0, lam=1.0)
        pred = list(ON_TARGET)
        b = obj.loss_terms(pred, spec)
        assert_allclose(b.total, 0.5)
        assert_allclose(b.l_cf, 0.5)

    def test_isolation_hinge(self):
        spec = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0)
        pred = list(ON_TARGET)
        pred[3] = -15.0
        b = obj.loss_terms(pred, spec)
        assert_allclose(b.l_is, 5.0)

    def test_hinges_vanish_below_threshold(self):
        spec = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0)
        pred = list(ON_TARGET)
        pred[0] = -60.0
        pred[3] = -55.0
        b = obj.loss_terms(pred, spec)
        assert b.l_is == 0.0 and b.l_rc == 0.0

    def test_wrap_symmetry(self):
        spec = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0)
        pred = list(ON_TARGET)
        pred[4] = -45.0
        base = obj.loss_terms(pred, spec).l_pd
        pred[4] = -45.0 + 360.0
        # stored phases are wrapped, but the loss itself must be periodic
        assert_allclose(obj.loss_terms(pred, spec).l_pd, base, atol=1e-12)

    def test_total_composition(self):
        spec = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0,
                              alpha=2.0, beta=0.5, gamma=3.0, lam=4.0)
        pred = [-18.0, -3.0, -3.2, -16.0, -44.0, -135.0]
        b = obj.loss_terms(pred, spec)
        assert_allclose(
            b.total,
            2.0 * b.l_cf + 0.5 * b.l_pd + 3.0 * b.l_is + 4.0 * b.l_rc,
            rtol=1e-15,
        )

    def test_nonfinite_rejected(self):
        spec = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0)
        with pytest.raises(ValidationError):
            obj.loss_terms([np.nan] * 6, spec)


class TestDesignSpecValidation:
    def test_bad_frequency(self):
        with pytest.raises(ValidationError):
            obj.DesignSpec(f0_ghz=0.0, coupling_target_db=3.0)

    def test_negative_weight(self):
        with pytest.raises(ValidationError):
            obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0, alpha=-1.0)

    def test_all_zero_weights(self):
        with pytest.raises(ValidationError):
            obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0,
                           alpha=0.0, beta=0.0, gamma=0.0, lam=0.0)


class TestObjectiveFn:
    def test_constant_on_target_model_gives_zero(self):
        spec = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0, hinge_margin_db=5.0)
        model = constant_model(ON_TARGET)
        assert obj.objective_fn(np.ones(5), spec, model) == 0.0

    def test_band_check_order_invariance(self):
        model = constant_model([-22.0, -3.0, -3.4, -21.0, -40.0, -140.0])
        a = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0,
                           band_check_ghz=(-0.15, 0.15))
        b = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0,
                           band_check_ghz=(0.15, -0.15))
        x = np.full(5, 0.5)
        assert_allclose(obj.objective_fn(x, a, model), obj.objective_fn(x, b, model))

    def test_hinge_margin_tightens_search_only(self):
        pred = list(ON_TARGET)
        pred[0] = -22.0  # only 2 dB below the -20 spec line
        model = constant_model(pred)
        loose = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0, hinge_margin_db=0.0)
        tight = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0, hinge_margin_db=5.0)
        assert obj.objective_fn(np.ones(5), loose, model) == 0.0
        assert obj.objective_fn(np.ones(5), tight, model) == pytest.approx(3.0)

    def test_weight_scaling_preserves_argmin(self):
        # exact power-of-two scaling keeps every comparison identical
        data_model = constant_model(ON_TARGET)

        def run_with(spec):
            cfg = sade.SadeConfig(pop_size=12, generations=20, seed=6)
            lo = np.array([1.5, 5.0, 0.3, 0.1, 1.2])
            hi = np.array([3.0, 12.0, 2.0, 2.0, 1.8])
            return sade.run(
                lambda x: obj.objective_fn(x, spec, data_model),
                sade.Bounds(lo, hi),
                cfg,
            )

        base = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=4.0,
                              alpha=1.0, beta=0.25, gamma=1.0, lam=1.0)
        scaled = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=4.0,
                                alpha=4.0, beta=1.0, gamma=4.0, lam=4.0)
        r1, r2 = run_with(base), run_with(scaled)
        assert np.array_equal(r1.x_star, r2.x_star)
        assert_allclose(r2.f_star, 4.0 * r1.f_star, rtol=1e-12)


class TestDiscover:
    def test_topology_mismatch(self, folded_tiny_model):
        spec = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0)
        cfg = sade.SadeConfig(pop_size=10, generations=5, seed=0)
        with pytest.raises(TopologyMismatchError):
            obj.discover(spec, "cascaded", folded_tiny_model, cfg, SUB_THIN)

    def test_smoke_discovery_within_bounds(self, folded_tiny_model):
        spec = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0)
        cfg = sade.SadeConfig(pop_size=20, generations=25, seed=4)
        out = obj.discover(spec, "folded", folded_tiny_model, cfg, SUB_THIN)
        from branchline.couplers import bounds_arrays

        lo, hi = bounds_arrays("folded")
        assert np.all(out.result.x_star >= lo) and np.all(out.result.x_star <= hi)
        assert out.report.metrics.coupling_db > 0.0
        assert out.result.f_star == min(out.result.history)

    def test_best_not_worse_than_final_population(self, folded_tiny_model):
        spec = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=3.0)
        cfg = sade.SadeConfig(pop_size=15, generations=20, seed=5)
        from branchline.couplers import bounds_arrays

        lo, hi = bounds_arrays("folded")
        b = sade.Bounds(lo, hi)
        fn = lambda x: obj.objective_fn(x, spec, folded_tiny_model)
        state = sade.init_state(fn, b, cfg)
        for _ in range(cfg.generations):
            state = sade.step(state, fn, cfg, b)
        assert state.best_f <= np.min(state.fitness) + 1e-15

    def test_impossible_coupling_completes_and_flags(self, folded_tiny_model):
        spec = obj.DesignSpec(f0_ghz=1.0, coupling_target_db=0.5)
        cfg = sade.SadeConfig(pop_size=15, generations=15, seed=1)
        out = obj.discover(spec, "folded", folded_tiny_model, cfg, SUB_THIN)
        assert not out.report.met_coupling
