"""Tests for the resolvent kernel service."""
import numpy as np
import pytest
from scipy import special

from errors import PreconditionError, RadiusCoverageError
from models import BoxGrid, FracOrder, KernelMethod, KernelProfile, RealField
from utils.validators import validate_kernel_profile


def _half_order_kernel(r):
    """K(r) = g(r)/pi for N = 1, s = 1/2, with g the auxiliary sine-cosine integral."""
    si, ci = special.sici(r)
    return (-ci * np.cos(r) - (si - np.pi / 2.0) * np.sin(r)) / np.pi


@pytest.fixture
def random_fields():
    rng = np.random.default_rng(11)
    grid = BoxGrid(2, 4.0, 32)
    return [RealField(grid, rng.normal(size=grid.shape)) for _ in range(10)]


class TestConvolveKernel:
    """u -> K * u by the symbol 1/(1+|xi|^2s)."""

    def test_resolvent_identity(self, kernel, random_fields):
        for u in random_fields:
            back = kernel.resolvent_apply(kernel.convolve_kernel(u, 0.6), 0.6)
            assert (back - u).norm() / u.norm() < 1e-10

    def test_contraction(self, kernel, random_fields):
        for u in random_fields:
            assert kernel.convolve_kernel(u, 0.6).norm() <= u.norm()

    def test_constant_is_fixed(self, kernel, grid_2d):
        """The zero mode has symbol 1."""
        u = RealField(grid_2d, np.full(grid_2d.shape, 2.5))
        assert np.max(np.abs(kernel.convolve_kernel(u, 0.4).values - 2.5)) < 1e-12


class TestKernelValue1D:

    @pytest.mark.parametrize('r', [0.5, 1.0, 2.0, 5.0, 10.0])
    def test_half_order_closed_form(self, kernel, r):
        assert kernel.kernel_value_1d(r, 0.5) == pytest.approx(_half_order_kernel(r), rel=1e-5)

    def test_needs_positive_radius(self, kernel):
        with pytest.raises(PreconditionError, match="needs r > 0"):
            kernel.kernel_value_1d(0.0, 0.5)


class TestKernelProfile:
    """Quadrature and grid profiles."""

    def test_quadrature_profile_shape(self, kernel):
        """Positive and non-increasing on [0.1, 10]."""
        profile = kernel.kernel_profile(1, 0.5, radii=np.geomspace(0.1, 10.0, 40))
        assert profile.method == KernelMethod.QUADRATURE_1D
        ok, message = validate_kernel_profile(profile)
        assert ok, message

    def test_grid_matches_quadrature(self, kernel):
        """Grid and quadrature profiles agree within 1% on [1, 5]."""
        grid = kernel.kernel_grid(1, 20.0)
        profile = kernel.kernel_profile(1, 0.5, grid=grid, r_max=5.0)
        keep = profile.radii >= 1.0
        expected = _half_order_kernel(profile.radii[keep])
        assert np.max(np.abs(profile.values[keep] / expected - 1.0)) < 1e-2

    def test_grid_profile_is_isotropic(self, kernel):
        """Lattice shells agree to 1% in two dimensions on a fine grid."""
        profile = kernel.kernel_profile(2, 0.9, grid=kernel.kernel_grid(2, 3.0, 0.05), r_max=3.0)
        keep = profile.radii >= 1.0
        assert profile.method == KernelMethod.GRID_FFT
        assert np.all(profile.values[keep] > 0)
        assert np.max(profile.shell_spread[keep]) < 1e-2

    def test_kernel_grid(self, kernel):
        grid = kernel.kernel_grid(2, 10.0)
        assert grid.half_width == 30.0
        assert grid.points_per_axis % 2 == 0
        assert grid.spacing <= 0.1 + 1e-12

    def test_radii_need_one_dimension(self, kernel):
        with pytest.raises(ValueError, match="only available for N = 1"):
            kernel.kernel_profile(2, 0.5, radii=[1.0, 2.0])

    def test_grid_dimension_mismatch(self, kernel, grid_2d):
        with pytest.raises(ValueError, match="does not match"):
            kernel.kernel_profile(1, 0.5, grid=grid_2d)

    def test_radii_must_increase(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            KernelProfile(FracOrder(0.5), 1, [1.0, 0.5], [0.2, 0.3], KernelMethod.QUADRATURE_1D)

    def test_rising_profile_is_reported(self):
        """Shape is left to the validator: a rising profile builds but is flagged."""
        profile = KernelProfile(FracOrder(0.5), 1, [1.0, 2.0, 3.0], [0.3, 0.4, 0.1],
                                KernelMethod.GRID_FFT)
        ok, message = validate_kernel_profile(profile)
        assert not ok
        assert "increases after r=1" in message

    def test_negative_profile_is_reported(self):
        profile = KernelProfile(FracOrder(0.5), 1, [1.0, 2.0], [0.3, -0.1], KernelMethod.GRID_FFT)
        ok, message = validate_kernel_profile(profile)
        assert not ok
        assert "not positive at r=2" in message

    def test_rows(self):
        profile = KernelProfile(FracOrder(0.5), 1, [1.0, 2.0], [0.3, 0.1], KernelMethod.GRID_FFT)
        assert profile.rows()[1] == {'r': 2.0, 'K': 0.1, 'method': 'grid_fft'}


class TestProfileMass:

    def test_exponential_profile(self, kernel):
        """int_R exp(-|x|) = 2."""
        radii = np.linspace(0.0, 40.0, 4001)
        profile = KernelProfile(FracOrder(0.5), 1, radii, np.exp(-radii), KernelMethod.QUADRATURE_1D)
        assert kernel.profile_mass(profile) == pytest.approx(2.0, rel=1e-8)
        assert kernel.profile_mass(profile, 1.0) == pytest.approx(2.0 * (1.0 - np.exp(-1.0)), rel=1e-8)


class TestKernelMass:
    """int K over |x| <= R, which tends to the zero-mode symbol 1."""

    def test_line_quadrature(self, kernel):
        """N = 1, s = 1/2: the r^-2 tail beyond R = 40 holds under 2% of the mass."""
        mass = kernel.kernel_mass(1, 0.5, 40.0)
        assert 0.98 < mass < 1.0

    def test_line_quadrature_grows_with_radius(self, kernel):
        assert kernel.kernel_mass(1, 0.5, 10.0) < kernel.kernel_mass(1, 0.5, 40.0)

    def test_lattice_sum_over_whole_box(self, kernel):
        """Summing every lattice point recovers the zero-mode symbol exactly."""
        assert kernel.kernel_mass(2, 0.6, 100.0, BoxGrid(2, 8.0, 64)) == pytest.approx(1.0, abs=1e-10)

    def test_lattice_sum_below_one_inside_box(self, kernel):
        mass = kernel.kernel_mass(2, 0.6, 4.0, BoxGrid(2, 8.0, 64))
        assert 0.5 < mass < 1.0

    def test_needs_grid_beyond_line(self, kernel):
        with pytest.raises(ValueError, match="pass a grid"):
            kernel.kernel_mass(2, 0.6, 40.0)

    def test_grid_dimension_mismatch(self, kernel, grid_2d):
        with pytest.raises(ValueError, match="does not match"):
            kernel.kernel_mass(1, 0.5, 4.0, grid_2d)


class TestKernelDecayReport:
    """Weighted sup norms and the tail exponent."""

    def test_half_order_tail(self, kernel):
        """Tail exponent within 10% of -(N + 2s) = -2."""
        profile = kernel.kernel_profile(1, 0.5, radii=np.geomspace(0.1, 40.0, 80))
        report = kernel.kernel_decay_report(profile)
        assert report.tail_target == -2.0
        assert report.tail_window == pytest.approx((10.0, 40.0))
        assert report.tail_relative_error < 0.1
        assert 0 < report.far_weighted_sup < np.inf
        assert 0 < report.near_weighted_sup < np.inf
        assert set(report.lq) == {'plain', 'weighted', 'outside'}

    def test_needs_radius_coverage(self, kernel):
        profile = kernel.kernel_profile(1, 0.5, radii=np.geomspace(0.2, 10.0, 20))
        with pytest.raises(RadiusCoverageError, match="profile covers"):
            kernel.kernel_decay_report(profile)
