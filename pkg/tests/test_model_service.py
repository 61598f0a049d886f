"""Tests for the model service and model specification types."""
import numpy as np
import pytest

from models import (FracOrder, ModelSpec, Nonlinearity, Potential, PotentialFamily,
                    critical_exponent)
from services.spectral_service import sharp_sobolev_constant

T = np.linspace(0.0, 6.0, 601)


class TestNonlinearity:
    """g, G and zeta for the power family."""

    def test_g_is_odd(self, models):
        nl = Nonlinearity()
        assert np.array_equal(models.g_eval(nl, -T), -models.g_eval(nl, T))

    def test_G_is_primitive(self, models):
        """Central differences of G reproduce g."""
        nl = Nonlinearity(m=1.5, a=0.7, p=2.5)
        t = T[1:-1]
        slope = (models.G_eval(nl, t + 1e-6) - models.G_eval(nl, t - 1e-6)) / 2e-6
        assert np.max(np.abs(slope - models.g_eval(nl, t))) < 1e-5

    def test_zeta_is_first_zero(self):
        """G(zeta) = 0 and G > 0 beyond it."""
        nl = Nonlinearity()
        assert nl.zeta == pytest.approx(np.sqrt(2.0))
        assert abs(float(nl.G(nl.zeta))) < 1e-12
        assert float(nl.G(nl.zeta + 1.0)) > 0
        assert float(nl.G(0.5 * nl.zeta)) < 0

    @pytest.mark.parametrize('kwargs, message', [
        ({'m': 0.0}, 'm must be positive'),
        ({'a': -1.0}, 'a must be positive'),
        ({'p': 1.0}, 'p must exceed 1'),
        ({'truncation_cap': 0.0}, 'truncation cap must be positive'),
    ])
    def test_invalid_parameters(self, kwargs, message):
        with pytest.raises(ValueError, match=message):
            Nonlinearity(**kwargs)


class TestTruncate:
    """Truncation beyond the cap."""

    def test_without_cap_is_identity(self, models):
        nl = Nonlinearity()
        truncated = models.truncate(nl)
        assert truncated.truncated
        assert np.array_equal(truncated.g(T), nl.g(T))

    def test_cap_zeroes_g(self, models):
        """g vanishes beyond t0 and G is frozen there."""
        truncated = models.truncate(Nonlinearity(truncation_cap=2.0))
        beyond = T[T > 2.0]
        assert np.all(truncated.g(beyond) == 0.0)
        assert truncated.G(beyond) == pytest.approx(float(truncated.G(2.0)))

    def test_cap_is_inert_until_truncated(self):
        """An untruncated nonlinearity ignores its cap."""
        nl = Nonlinearity(truncation_cap=2.0)
        assert nl.active_cap is None
        assert float(nl.g(3.0)) == pytest.approx(24.0)


class TestSplit:
    """g = g1 - g2 with nonnegative parts."""

    def test_identity(self, models):
        split = models.split(Nonlinearity())
        t = np.concatenate([-T, T])
        assert np.max(np.abs(split.g1(t) - split.g2(t) - Nonlinearity().g(t))) < 1e-12

    def test_signs(self, models):
        split = models.split(Nonlinearity(m=2.0, p=4.0))
        assert np.min(split.g1(T)) >= 0.0
        assert np.min(split.g2(T)) >= 0.0
        assert np.min(split.G1(T)) >= 0.0
        assert np.min(split.G2(T)) >= 0.0

    def test_primitives(self, models):
        """G1 - G2 = G."""
        nl = Nonlinearity(m=0.8, a=1.3, p=2.2)
        split = models.split(nl)
        assert np.max(np.abs(split.G1(T) - split.G2(T) - nl.G(T))) < 1e-10

    def test_truncated_primitives(self, models):
        """G1 - G2 = G also after truncation."""
        nl = models.truncate(Nonlinearity(truncation_cap=1.5))
        split = models.split(nl)
        assert np.max(np.abs(split.G1(T) - split.G2(T) - nl.G(T))) < 1e-10


class TestEpsilonBound:
    """G1 <= C/2* |t|^2* + eps G2."""

    def test_cubic_closed_form(self, models):
        """For p = 3, N = 2, s = 0.6 the constant is (5/6)/sqrt(6 eps)."""
        split = models.split(Nonlinearity())
        constant, t = models.epsilon_bound(split, 0.5, 2, 0.6)
        assert constant == pytest.approx(5.0 / 6.0 / np.sqrt(3.0), rel=1e-8)
        assert t == pytest.approx(np.sqrt(3.0), rel=1e-2)

    def test_witness_has_no_violation(self, models):
        split = models.split(Nonlinearity())
        constant = models.epsilon_bound_constant(split, 0.25, 2, 0.6)
        t, gap = models.epsilon_bound_witness(split, 0.25, 2, 0.6, constant)
        assert gap <= 1e-9 * max(1.0, float(split.G1(t)))

    def test_smaller_constant_is_violated(self, models):
        split = models.split(Nonlinearity())
        constant = models.epsilon_bound_constant(split, 0.5, 2, 0.6)
        _, gap = models.epsilon_bound_witness(split, 0.5, 2, 0.6, 0.9 * constant)
        assert gap > 0

    def test_epsilon_range(self, models):
        with pytest.raises(ValueError, match="epsilon must lie in"):
            models.epsilon_bound(models.split(Nonlinearity()), 1.0, 2, 0.6)

    def test_needs_finite_critical_exponent(self, models):
        with pytest.raises(ValueError, match="no finite critical exponent"):
            models.epsilon_bound(models.split(Nonlinearity()), 0.5, 1, 0.6)


class TestCriticalExponent:

    def test_values(self):
        assert critical_exponent(2, 0.6) == 5.0
        assert critical_exponent(3, 0.5) == 3.0
        assert critical_exponent(1, 0.6) == float('inf')

    def test_subcriticality(self, canonical_model):
        assert canonical_model.is_subcritical()
        assert not canonical_model.with_nonlinearity(Nonlinearity(p=4.0)).is_subcritical()


class TestRadialLqNorm:

    def test_gaussian(self, models):
        """||exp(-r^2)||_2 = sqrt(pi/2) in two dimensions."""
        norm = models.radial_lq_norm(lambda r: np.exp(-r ** 2), 2, 2.0)
        assert norm == pytest.approx(np.sqrt(np.pi / 2.0), rel=1e-8)


class TestCheckAssumptions:
    """Sampled structural checks."""

    def test_canonical_model_passes(self, models, canonical_model, grid_2d):
        report = models.check_assumptions(canonical_model, grid_2d, sharp_sobolev_constant(2, 0.6))
        assert report.failed() == []
        assert report.passed()
        assert report.v2_quantity == 0.0

    def test_zero_potential_fails_positivity(self, models, free_model, grid_2d):
        report = models.check_assumptions(free_model, grid_2d, sharp_sobolev_constant(2, 0.6))
        assert not report['V1'].satisfied
        assert report.passed('g1', 'g2', 'g3', 'g4')

    def test_supercritical_power_fails_growth(self, models, canonical_model, grid_2d):
        model = canonical_model.with_nonlinearity(Nonlinearity(p=5.0))
        report = models.check_assumptions(model, grid_2d, sharp_sobolev_constant(2, 0.6))
        assert 'g3' in report.failed()
        assert 'g3_prime' in report.failed()

    def test_gaussian_potential_fails_virial_lower_bound(self, models, canonical_model, grid_2d):
        """N V + <grad V, x> turns negative for a Gaussian well."""
        model = canonical_model.with_potential(Potential(PotentialFamily.GAUSSIAN, 0.5, 1.0))
        checks = models.check_virial(model, grid_2d)
        assert checks['V5'].satisfied
        assert not checks['V6'].satisfied

    def test_sobolev_estimate_must_be_positive(self, models, canonical_model, grid_2d):
        with pytest.raises(ValueError, match="Sobolev estimate must be positive"):
            models.check_assumptions(canonical_model, grid_2d, 0.0)

    def test_report_serializes(self, models, canonical_model, grid_2d):
        report = models.check_assumptions(canonical_model, grid_2d, 1.0)
        data = report.to_dict()
        assert set(data['checks']) >= {'g1', 'g2', 'g3', 'g4', 'V1', 'V2', 'V3', 'V4', 'V5', 'V6'}


class TestModelSpec:

    def test_from_dict(self):
        model = ModelSpec.from_dict({'dim': 2, 's': 0.6, 'potential': {'family': 'gaussian'}})
        assert model.order == FracOrder(0.6)
        assert model.potential.family == PotentialFamily.GAUSSIAN
        assert model.nonlinearity == Nonlinearity()

    def test_invalid_potential(self):
        with pytest.raises(ValueError, match="potential exponent must be positive"):
            Potential(beta=0.0)

    def test_without_potential(self, canonical_model):
        assert canonical_model.without_potential().potential.is_zero
