import math
import warnings

import numpy as np
import pytest

from ase_lab.models import (Clamp, ContinuityWarning, Deterministic, ElevatedPowerLaw, ExpDecay,
                            InversePoly, LogNormalUnitMean, LosNlosComposite, MinPowerLaw,
                            MultiSlope, NakagamiM, Rayleigh, ShiftedPowerLaw, StretchedExp,
                            UnboundedPowerLaw, check_feasibility, eval_pathloss,
                            fading_from_dict, l_zero, pathloss_from_dict, sample_fading,
                            sample_link_gain)

from conftest import table1_models, three_slope, urban_composite


class TestEvaluation:
    def test_min_power_law_cap_region(self):
        assert eval_pathloss(MinPowerLaw(1, 1, 4), 0.5) == 1.0

    def test_min_power_law_tail(self):
        assert eval_pathloss(MinPowerLaw(1, 1, 4), 2.0) == 0.0625

    def test_stretched_exp_at_origin(self):
        assert eval_pathloss(StretchedExp(1, 1, 1), 0.0) == 1.0

    def test_formulas(self):
        r = np.array([0.0, 0.3, 1.0, 7.5])
        np.testing.assert_allclose(ShiftedPowerLaw(2, 1.5, 3).eval(r), 2 * (1.5 + r) ** -3.0)
        np.testing.assert_allclose(InversePoly(2, 1.5, 3).eval(r), 2 / (1.5 + r**3))
        np.testing.assert_allclose(ElevatedPowerLaw(2, 1.5, 3).eval(r), 2 * (2.25 + r * r) ** -1.5)
        np.testing.assert_allclose(StretchedExp(2, 0.5, 1.5).eval(r), 2 * np.exp(-0.5 * r**1.5))

    def test_negative_distance_rejected(self):
        with pytest.raises(ValueError):
            eval_pathloss(ShiftedPowerLaw(1, 1, 4), -0.1)

    def test_scalar_in_scalar_out(self):
        assert isinstance(ElevatedPowerLaw(1, 1, 4).eval(1.0), float)

    def test_min_power_law_continuous_at_crossover(self):
        m = MinPowerLaw(3.0, 2.0, 4.0)
        rc = 2.0 ** (-1 / 4)
        assert m.crossover == pytest.approx(rc)
        assert m.eval(rc * (1 - 1e-12)) == pytest.approx(3.0 * 2.0, rel=1e-9)
        assert m.eval(rc * (1 + 1e-12)) == pytest.approx(3.0 * 2.0, rel=1e-9)

    def test_two_slope_reproduces_min_power_law(self):
        ms = MultiSlope.continuous(1.0, (0.0, 4.0), (1.0,))
        mp = MinPowerLaw(1.0, 1.0, 4.0)
        r = np.concatenate([[0.0], np.logspace(-4, 4, 999)])
        np.testing.assert_allclose(ms.eval(r), mp.eval(r), rtol=1e-12)

    def test_multislope_segments(self):
        m = three_slope()
        assert m.amplitudes == pytest.approx((1.0, 1.0, 10.0))
        assert m.eval(0.5) == 1.0
        assert m.eval(2.0) == pytest.approx(2.0**-3)
        assert m.eval(20.0) == pytest.approx(10 * 20.0**-4)

    def test_multislope_discontinuity_warns(self):
        with pytest.warns(ContinuityWarning):
            MultiSlope((1.0, 2.0), (0.0, 4.0), (1.0,))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            MultiSlope((1.0, 16.0), (0.0, 4.0), (2.0,))

    @pytest.mark.parametrize("bad", [dict(boundaries=(2.0, 1.0)), dict(boundaries=(0.0, 1.0))])
    def test_multislope_boundaries_validated(self, bad):
        with pytest.raises(ValueError):
            MultiSlope((1, 1, 1), (0, 3, 4), **bad)

    @pytest.mark.parametrize("ctor", [lambda: ShiftedPowerLaw(0, 1, 4), lambda: InversePoly(1, -1, 4),
                                      lambda: StretchedExp(1, 1, 2.5), lambda: NakagamiM(0.4),
                                      lambda: ElevatedPowerLaw(1, 1, math.nan)])
    def test_parameter_validation(self, ctor):
        with pytest.raises(ValueError):
            ctor()


class TestLZero:
    def test_values(self):
        assert l_zero(ShiftedPowerLaw(2, 1, 4)) == 2.0
        assert l_zero(ElevatedPowerLaw(1, 2, 4)) == 0.0625
        assert l_zero(UnboundedPowerLaw(1, 4)) == math.inf


class TestFeasibility:
    def test_unbounded_fails_property_1(self):
        rep = check_feasibility(UnboundedPowerLaw(1, 4))
        assert not rep.feasible and rep.failed_property == 1

    def test_eta_two_fails_property_3(self):
        rep = check_feasibility(ShiftedPowerLaw(1, 1, 2))
        assert not rep.feasible and rep.failed_property == 3
        assert rep.gamma == math.inf

    def test_shifted_power_law_feasible(self):
        rep = check_feasibility(ShiftedPowerLaw(1, 1, 4))
        assert rep.feasible and rep.failed_property is None
        assert rep.gamma == pytest.approx(1 / 6, rel=1e-9)

    def test_nonmonotone_multislope_fails_property_2(self):
        with pytest.warns(ContinuityWarning):
            m = MultiSlope((1.0, 5.0), (0.0, 4.0), (1.0,))
        rep = check_feasibility(m)
        assert rep.failed_property == 2

    @pytest.mark.parametrize("name", ["L1", "L2", "L3", "L4", "L5"])
    def test_bounded_by_l_zero(self, name):
        m = table1_models()[name]
        r = np.concatenate([[0.0], np.logspace(-3, 6, 1000)])
        g = m.eval(r)
        assert np.all(g >= 0) and np.all(g <= m.l_zero() * (1 + 1e-12))

    def test_composite_feasible(self):
        rep = check_feasibility(urban_composite())
        assert rep.feasible


class TestComposite:
    def test_average_between_branches(self):
        m = urban_composite()
        r = np.logspace(-2, 4, 500)
        lo = np.minimum(m.los.eval(r), m.nlos.eval(r))
        hi = np.maximum(m.los.eval(r), m.nlos.eval(r))
        g = m.eval(r)
        assert np.all(g >= lo * (1 - 1e-12)) and np.all(g <= hi * (1 + 1e-12))

    def test_always_los(self, rng):
        m = urban_composite()
        m1 = LosNlosComposite(m.los, m.nlos, Clamp(1e9))
        r = np.full(1000, 50.0)
        np.testing.assert_array_equal(sample_link_gain(m1, r, rng), m.los.eval(r))

    def test_los_fraction(self, rng):
        m = urban_composite()
        m1 = LosNlosComposite(m.los, m.nlos, ExpDecay(1.0))
        r = np.full(100_000, math.log(2))
        frac = np.mean(sample_link_gain(m1, r, rng) == m.los.eval(math.log(2)))
        assert abs(frac - 0.5) < 0.01

    def test_mismatched_elevation_rejected(self):
        m = urban_composite()
        other = MultiSlope.continuous(0.1, (3.0, 4.0), (30.0,), elevation=2.0)
        with pytest.raises(ValueError):
            LosNlosComposite(m.los, other, ExpDecay(18.0))

    def test_deterministic_variants_sample_equals_eval(self, rng):
        for m in table1_models().values():
            assert sample_link_gain(m, 1.0, rng) == eval_pathloss(m, 1.0)


class TestFading:
    def test_deterministic(self, rng):
        assert sample_fading(Deterministic(), rng) == 1.0

    def test_rayleigh_mean(self, rng):
        assert abs(sample_fading(Rayleigh(), rng, 1_000_000).mean() - 1) < 0.005

    def test_nakagami_half_mean(self, rng):
        assert abs(sample_fading(NakagamiM(0.5), rng, 1_000_000).mean() - 1) < 0.01

    @pytest.mark.parametrize("fading", [Deterministic(), Rayleigh(), NakagamiM(0.5), NakagamiM(3.0),
                                        LogNormalUnitMean(4.0)])
    def test_unit_mean_within_five_se(self, fading, rng):
        x = np.asarray(fading.sample(rng, 1_000_000), dtype=float)
        assert np.all(np.isfinite(x)) and np.all(x >= 0)
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert abs(x.mean() - 1) <= 5 * se + 1e-15
        assert np.mean(x * x) == pytest.approx(fading.second_moment(), rel=0.05)

    @pytest.mark.parametrize("fading", [Deterministic(), Rayleigh(), NakagamiM(2.0),
                                        LogNormalUnitMean(6.0)])
    def test_mean_complement_matches_sampling(self, fading, rng):
        x = fading.sample(rng, 400_000)
        for s in (0.1, 1.0, 10.0):
            emp = np.mean(1 - np.exp(-s * x))
            assert fading.mean_complement(s) == pytest.approx(emp, abs=5e-3)

    @pytest.mark.parametrize("fading", [Rayleigh(), NakagamiM(2.0), LogNormalUnitMean(6.0)])
    def test_survival_matches_sampling(self, fading, rng):
        x = fading.sample(rng, 400_000)
        for y in (0.2, 1.0, 3.0):
            assert fading.survival(y) == pytest.approx(np.mean(x >= y), abs=5e-3)


class TestSerialization:
    @pytest.mark.parametrize("model", list(table1_models().values())
                             + [three_slope(), urban_composite(), UnboundedPowerLaw(2, 3)])
    def test_round_trip(self, model):
        assert pathloss_from_dict(model.to_dict()) == model

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown path-loss kind"):
            pathloss_from_dict({"kind": "Nope"})
        with pytest.raises(ValueError):
            pathloss_from_dict({"kind": "ShiftedPowerLaw", "A": 1})
        with pytest.raises(ValueError):
            fading_from_dict({"kind": "Rician"})

    def test_fading_round_trip(self):
        for f in (Deterministic(), Rayleigh(), NakagamiM(2.0), LogNormalUnitMean(8.0)):
            assert fading_from_dict(f.to_dict()) == f
