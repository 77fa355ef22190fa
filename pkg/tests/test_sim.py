import math
from dataclasses import replace

import numpy as np
import pytest

from ase_lab.models import (Deterministic, ElevatedPowerLaw, MinPowerLaw, Rayleigh,
                            ShiftedPowerLaw, StretchedExp)
from ase_lab.sim import (SimConfig, auto_radius, block_rng, draw_batch, estimate_metrics,
                         lambda_sweep, mean_interference_target, resolve_window,
                         sample_realization, sinr_from_distances, window_truncation_bias)

from conftest import urban_composite

L2 = ShiftedPowerLaw(1, 1, 4)


def small(model=L2, lam=1.0, **kw):
    kw.setdefault("realizations", 4000)
    kw.setdefault("block_size", 1000)
    return SimConfig(model, Rayleigh(), lam, **kw)


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(lam=0.0), dict(n0=-1.0), dict(realizations=50),
                                    dict(far_field="exact"), dict(theta0_list=(-1.0,)),
                                    dict(window_radius=0.1), dict(seed=-1)])
    def test_validation(self, kw):
        base = dict(model=L2, fading=Rayleigh(), lam=1.0)
        base.update(kw)
        with pytest.raises(ValueError):
            SimConfig(**base)

    def test_default_noise(self):
        assert small(model=ElevatedPowerLaw(1, 2, 4)).noise == pytest.approx(1e-6 / 16)


class TestSingleRealization:
    def test_single_link(self):
        s = sinr_from_distances(MinPowerLaw(1, 1, 4), [1.0], 0.01, Deterministic())
        assert s.sinr == pytest.approx(100.0)
        assert s.interference == 0.0

    def test_two_links(self):
        s = sinr_from_distances(MinPowerLaw(1, 1, 4), [2.0, 1.0], 0.0, Deterministic())
        assert s.r0 == 1.0
        assert s.sinr == pytest.approx(16.0)

    def test_sample_realization(self):
        s = sample_realization(small(), block_rng(0, 0))
        assert s.sinr > 0 and s.interference >= 0 and s.r0 > 0


class TestWindow:
    @pytest.mark.parametrize("model", [L2, ElevatedPowerLaw(1, 1, 4), StretchedExp(1, 1, 1)])
    def test_auto_radius_rule(self, model):
        lam = 0.5
        R = auto_radius(model, lam)
        gamma = model.gamma_closed_form()
        assert model.gamma_tail(R) <= 1e-3 * gamma * (1 + 1e-9)
        assert lam * math.pi * R * R >= 50 * (1 - 1e-12)

    def test_cap_and_far_field(self):
        w = resolve_window(small(lam=1e3))
        assert w.expected_points == pytest.approx(400.0)
        assert w.far_mean == pytest.approx(window_truncation_bias(L2, 1e3, w.radius))
        assert w.far_var > 0

    def test_no_far_field_keeps_auto_radius(self):
        w = resolve_window(small(lam=1.0, far_field="none"))
        assert w.radius == pytest.approx(auto_radius(L2, 1.0))
        assert w.far_mean == 0.0

    def test_nearest_point_is_serving(self):
        w = resolve_window(small(lam=2.0, far_field="none"))
        b = draw_batch(L2, Deterministic(), 2.0, w, 2000, block_rng(1, 0))
        np.testing.assert_allclose(b.signal, L2.eval(b.r0))
        # the nearest of a Poisson field: P(r0 > x) = exp(-lam pi x^2)
        x = 0.3
        assert np.mean(b.r0 > x) == pytest.approx(math.exp(-2.0 * math.pi * x * x), abs=0.035)


class TestMetrics:
    def test_ordering_and_zero_threshold(self):
        est = estimate_metrics(small(theta0_list=(0.0, 0.3, 1.0, 4.0)))
        assert est.constrained_ase[0.0] == est.ase
        for t in (0.3, 1.0, 4.0):
            assert est.potential_throughput[t] <= est.constrained_ase[t] <= est.ase
        cov = [est.coverage[t] for t in (0.0, 0.3, 1.0, 4.0)]
        assert cov == sorted(cov, reverse=True)

    def test_potential_throughput_definition(self):
        est = estimate_metrics(small(theta0_list=(1.0,)))
        assert est.potential_throughput[1.0] == pytest.approx(1.0 * est.coverage[1.0])

    def test_determinism(self):
        a = estimate_metrics(small(seed=17))
        b = estimate_metrics(small(seed=17), workers=3)
        assert a == b
        c = estimate_metrics(small(seed=18))
        assert c.ase != a.ase

    def test_composite_runs(self):
        est = estimate_metrics(small(model=urban_composite(), lam=0.01))
        assert est.ase > 0

    def test_mean_received_power(self):
        lam = 2.0
        R = math.sqrt(400 / (math.pi * lam))
        est = estimate_metrics(small(lam=lam, window_radius=R, far_field="none", realizations=20_000))
        target = mean_interference_target(L2, lam)
        corrected = est.total_power_mean + window_truncation_bias(L2, lam, R)
        assert abs(corrected - target) < 4 * est.total_power_se


class TestSweep:
    def test_grid_checks(self):
        with pytest.raises(ValueError):
            lambda_sweep(small(), [1, 10, 100])
        with pytest.raises(ValueError):
            lambda_sweep(small(), [1, 10, 5, 1000])
        with pytest.raises(ValueError):
            lambda_sweep(small(), [1, 2, 3, 4])

    def test_rows(self):
        rows = lambda_sweep(small(realizations=1000), [0.1, 1, 10, 100])
        assert [r.lam for r in rows] == [0.1, 1, 10, 100]
        assert len({r.analytic_limit for r in rows}) == 1
        assert rows[0].analytic_limit == pytest.approx(3 / (math.pi * math.log(2)))
        assert rows[0].estimate == estimate_metrics(replace(small(realizations=1000), lam=0.1))
