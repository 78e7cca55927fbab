"""
Unit tests for quantized traversal times.

Covers:
- Exact roots of the exit condition and their 2 pi / omega family
- Low-frequency closed forms (plain, binomial, energy-level)
- High-frequency quadratic: roots, discriminant identity, ratio, A = 0 case
"""

import math

import pytest
import hypothesis.strategies as st
from hypothesis import given, settings

from engine.barrier_model import BarrierConfig
from engine.channel_spectrum import build_spectrum
from engine.errors import BarrierDomainError, SingularityError
from engine.traversal_time import (
    Regime,
    exact_family,
    high_freq_ratio,
    quadratic_coefficients,
    quadratic_residual,
    traversal_exact,
    traversal_high,
    traversal_low,
    traversal_low_approx,
    traversal_low_energy,
)


class TestExactSolver:
    """Tests for traversal_exact() and exact_family()."""

    def test_reference_root(self):
        """n=2, m=1, N=10: smallest root arccos(0.1) - arccos(0.2) = 0.10119."""
        roots = traversal_exact(2, 1, 10, 1.0)
        assert roots[0] == pytest.approx(math.acos(0.1) - math.acos(0.2), abs=1e-15)
        assert roots[0] == pytest.approx(0.10119, abs=1e-5)
        assert roots == tuple(sorted(roots))

    def test_edge_to_centre_is_quarter_period(self):
        """n = N, m = 0 gives omega T = pi / 2."""
        assert traversal_exact(5, 0, 5, 2.0)[0] == pytest.approx(math.pi / 4, abs=1e-15)

    def test_roots_satisfy_exit_condition(self):
        """(n/N) cos(wT) - sqrt(1 - (n/N)^2) sin(wT) = m/N at every root."""
        n, m, big_n = 3, 1, 7
        for t in traversal_exact(n, m, big_n, 1.0):
            lhs = (n / big_n) * math.cos(t) - math.sqrt(1 - (n / big_n) ** 2) * math.sin(t)
            assert lhs == pytest.approx(m / big_n, abs=1e-12)

    def test_family_shifts_by_period(self):
        """exact_family(k) adds k periods."""
        base = traversal_exact(2, 1, 10, 0.5)
        shifted = exact_family(2, 1, 10, 0.5, 2)
        for a, b in zip(base, shifted):
            assert b - a == pytest.approx(2 * 2 * math.pi / 0.5, rel=1e-14)

    @pytest.mark.parametrize("n, m", [(2, 2), (2, 3), (11, 1), (2, -1)])
    def test_index_violations(self, n, m):
        """m < n <= N and m >= 0 are enforced."""
        with pytest.raises(BarrierDomainError):
            traversal_exact(n, m, 10, 1.0)


class TestLowFrequency:
    """Tests for traversal_low(), traversal_low_approx() and traversal_low_energy()."""

    def test_reference_value(self):
        """n=2, m=1, N=10, tau=1 gives 10 / sqrt(96)."""
        solution = traversal_low(2, 1, 10, 1.0)
        assert solution.t_plus == pytest.approx(10 / math.sqrt(96), abs=1e-14)
        assert solution.t_plus == pytest.approx(1.02062, abs=1e-5)
        assert solution.regime is Regime.LOW

    def test_absorption_equals_emission(self):
        """t_plus and t_minus are bit-equal."""
        for n in range(1, 10):
            for m in range(n):
                solution = traversal_low(n, m, 10, 0.3)
                assert solution.t_plus == solution.t_minus

    def test_agrees_with_exact_root(self):
        """At omega = 1 (tau = 0.1) the gap to the exact root is below 1%."""
        low = traversal_low(2, 1, 10, 0.1).t_plus
        exact = traversal_exact(2, 1, 10, 1.0)[0]
        assert low == pytest.approx(0.102062, abs=1e-6)
        assert abs(low - exact) / exact < 0.01

    def test_converges_as_frequency_drops(self):
        """Relative gap to the exact root is within 2% whenever omega T <= 0.1."""
        big_n = 200
        for n in (2, 5, 10):
            m = n - 1
            exact = traversal_exact(n, m, big_n, 1.0)[0]
            assert exact <= 0.1
            low = traversal_low(n, m, big_n, 1.0 / big_n).t_plus
            assert abs(low - exact) / exact <= 0.02

    def test_top_channel_is_singular(self):
        """n = N makes the denominator vanish."""
        with pytest.raises(SingularityError):
            traversal_low(10, 1, 10, 1.0)

    def test_binomial_form(self):
        """|n - m| (1 + n^2 / 2N^2) tau = 1.02 at n=2, m=1, N=10."""
        approx = traversal_low_approx(2, 1, 10, 1.0)
        assert approx == pytest.approx(1.02, abs=1e-15)
        assert abs(approx - traversal_low(2, 1, 10, 1.0).t_plus) == pytest.approx(6.2e-4, abs=1e-4)

    def test_binomial_form_warns_for_large_n(self, caplog):
        """n above N/4 is outside the expansion's comfort zone."""
        with caplog.at_level("WARNING"):
            traversal_low_approx(5, 1, 10, 1.0)
        assert any("binomial" in record.message for record in caplog.records)

    def test_energy_form_matches(self):
        """Writing the times through the channel energies gives the same numbers."""
        spectrum = build_spectrum(BarrierConfig(v0=20.0, b=1.0, e_incident=10.0, v1=1.0, omega=0.1))
        plain = traversal_low(2, 1, 10, spectrum.tau)
        energy = traversal_low_energy(2, 1, spectrum)
        assert energy.t_plus == pytest.approx(plain.t_plus, abs=1e-12)
        assert energy.t_minus == pytest.approx(plain.t_minus, abs=1e-12)
        assert energy.t_minus > 0

    @settings(max_examples=200, deadline=None)
    @given(big_n=st.integers(min_value=2, max_value=40), data=st.data())
    def test_energy_form_randomized(self, big_n, data):
        """Energy-level and index forms agree on random (n, m, N)."""
        n = data.draw(st.integers(min_value=1, max_value=big_n - 1))
        m = data.draw(st.integers(min_value=0, max_value=n - 1))
        omega = data.draw(st.floats(min_value=0.01, max_value=2.0))
        spectrum = build_spectrum(BarrierConfig(v0=100.0, b=1.0, e_incident=20.0, v1=big_n * omega, omega=omega))
        plain = traversal_low(n, m, spectrum.n_max, spectrum.tau)
        energy = traversal_low_energy(n, m, spectrum)
        assert energy.t_plus == pytest.approx(plain.t_plus, rel=1e-12)
        assert energy.t_minus == pytest.approx(plain.t_minus, rel=1e-12)


class TestHighFrequency:
    """Tests for traversal_high() and high_freq_ratio()."""

    def test_reference_roots(self):
        """n=2, m=1, N=3: A=4, B=2 sqrt 5, C=3."""
        a, b, c = quadratic_coefficients(2, 1, 3)
        assert (a, c) == (4.0, 3.0)
        assert b == pytest.approx(2 * math.sqrt(5), abs=1e-15)
        solution = traversal_high(2, 1, 3, 1.0)
        assert solution.tan_theta_plus == pytest.approx((-2 * math.sqrt(5) + 2 * math.sqrt(2)) / 4, abs=1e-14)
        assert solution.tan_theta_minus == pytest.approx((-2 * math.sqrt(5) - 2 * math.sqrt(2)) / 4, abs=1e-14)
        assert solution.tan_theta_plus == pytest.approx(-0.41093, abs=1e-5)
        assert solution.tan_theta_minus == pytest.approx(-1.82514, abs=1e-5)
        assert solution.discriminant == pytest.approx(8.0, abs=1e-12)

    def test_ratio_routes_agree(self):
        """The index ratio equals tan(theta+) / tan(theta-)."""
        solution = traversal_high(2, 1, 3, 1.0)
        assert solution.ratio == pytest.approx(0.22515, abs=1e-5)
        assert solution.ratio == pytest.approx(solution.tan_theta_plus / solution.tan_theta_minus, abs=1e-12)

    def test_degenerate_quadratic(self):
        """N^2 = n^2 + m^2 leaves the single linear root -C / 2B = -7/24."""
        solution = traversal_high(4, 3, 5, 1.0)
        assert solution.degenerate
        assert solution.tan_theta_plus == pytest.approx(-7 / 24, abs=1e-15)
        assert solution.tan_theta_minus is None
        assert solution.t_minus is None
        assert solution.absorption_shorter is None

    def test_ratio_special_values(self):
        """The ratio hits 0 at (4, 3, 5) and turns negative at (9, 7, 10)."""
        assert high_freq_ratio(4, 3, 5) == 0.0
        assert high_freq_ratio(9, 7, 10) == pytest.approx(-0.1206, abs=1e-4)

    def test_branch_sets_durations(self):
        """T = (arctan(tan theta) + branch pi) / omega is positive for branch >= 1."""
        first = traversal_high(2, 1, 3, 2.0, branch=1)
        second = traversal_high(2, 1, 3, 2.0, branch=2)
        assert first.t_plus == pytest.approx((math.atan(first.tan_theta_plus) + math.pi) / 2.0, abs=1e-15)
        assert second.t_plus - first.t_plus == pytest.approx(math.pi / 2.0, abs=1e-14)
        assert first.t_plus > 0 and first.t_minus > 0
        assert first.absorption_shorter is not None

    def test_non_positive_branch_rejected(self):
        """branch = 0 gives negative durations for negative tangents."""
        with pytest.raises(BarrierDomainError):
            traversal_high(2, 1, 3, 1.0, branch=0)

    @pytest.mark.parametrize("n, m, big_n", [(3, 3, 5), (5, 1, 5), (2, 0, 5)])
    def test_index_violations(self, n, m, big_n):
        """0 < m < n < N is required."""
        with pytest.raises(BarrierDomainError):
            traversal_high(n, m, big_n, 1.0)

    def test_algebra_over_full_grid(self):
        """Discriminant identity, root residuals and ratio < 1 for every 0 < m < n < N <= 50."""
        for big_n in range(3, 51):
            for n in range(2, big_n):
                for m in range(1, n):
                    a, b, c = quadratic_coefficients(n, m, big_n)
                    disc = b * b - a * c
                    expected = m * m * (big_n * big_n - m * m)
                    assert abs(disc - expected) <= 1e-9 * expected
                    solution = traversal_high(n, m, big_n, 1.0)
                    scale = max(abs(a), abs(b), abs(c))
                    assert abs(quadratic_residual(solution.tan_theta_plus, n, m, big_n)) <= 1e-9 * scale
                    if not solution.degenerate:
                        assert abs(quadratic_residual(solution.tan_theta_minus, n, m, big_n)) <= 1e-9 * scale * max(
                            1.0, solution.tan_theta_minus ** 2
                        )
                    assert high_freq_ratio(n, m, big_n) < 1.0

    def test_record_columns(self):
        """Records carry the documented columns."""
        record = traversal_high(2, 1, 3, 1.0).to_record(1.0)
        assert list(record) == [
            "n", "m", "N", "omega", "regime", "t_plus", "t_minus",
            "tan_theta_plus", "tan_theta_minus", "ratio",
        ]
        assert record["regime"] == "high-frequency"
