"""
Unit tests for the finite channel spectrum.

Covers:
- Channel count, energies and ordering
- Energy-circle identity, symmetry and band bounds (randomized)
- Degenerate and non-integral V1/alpha handling
- Density of states and its band-centre sentinel
- Entry times and the continuous-time helpers
"""

import math

import pytest
import hypothesis.strategies as st
from hypothesis import given, settings
from numpy.testing import assert_allclose

from engine.barrier_model import BarrierConfig
from engine.channel_spectrum import (
    UNBOUNDED,
    ChannelClass,
    build_spectrum,
    channel_count,
    circle_residual,
    density_of_states,
    density_of_states_at_time,
    energy_at_time,
    entry_time,
    is_unbounded,
    snapshot_height,
)
from engine.errors import BarrierDomainError


class TestBuildSpectrum:
    """Tests for build_spectrum()."""

    def test_reference_energies(self, circle_barrier):
        """V1 = 1, alpha = 0.25 around E_N = 5 gives N = 4 and the nine circle levels."""
        spectrum = build_spectrum(circle_barrier)
        assert spectrum.n_max == 4
        assert len(spectrum.channels) == 9
        offsets = [math.sqrt(16 - n * n) / 4 for n in range(4)]
        expected = sorted([5.0] + [5.0 + s * o for o in offsets for s in (1, -1)])
        assert_allclose([ch.energy for ch in spectrum.channels], expected, atol=1e-12)
        assert_allclose(offsets, [1.0, 0.9682458, 0.8660254, 0.6614378], atol=1e-7)

    def test_band_edges_are_exact(self, circle_barrier):
        """The n = 0 channels sit exactly on E_N +- V1."""
        spectrum = build_spectrum(circle_barrier)
        assert spectrum.channel(0, 1).energy == 6.0
        assert spectrum.channel(0, -1).energy == 4.0

    def test_elastic_channel(self, circle_barrier):
        """The n = N channel sits at E_N with sign + and the unmodulated height."""
        elastic = build_spectrum(circle_barrier).channel(4)
        assert elastic.energy == 5.0
        assert elastic.sign == 1
        assert elastic.snapshot_height == 10.0

    def test_timeon(self, circle_barrier):
        """tau = 1 / (N omega), so N omega tau = 1."""
        spectrum = build_spectrum(circle_barrier)
        assert spectrum.tau == 1.0
        assert spectrum.n_max * spectrum.omega * spectrum.tau == 1.0

    def test_degenerate_spectrum(self):
        """V1 < alpha leaves only the elastic channel, with a notice."""
        spectrum = build_spectrum(BarrierConfig(v0=2.0, b=1.0, e_incident=1.0, v1=0.1, omega=1.0))
        assert spectrum.n_max == 0
        assert spectrum.is_degenerate
        assert spectrum.tau is None
        assert len(spectrum.channels) == 1
        assert any("degenerate" in notice for notice in spectrum.notices)

    def test_non_integral_ratio_notice(self):
        """V1 / alpha = 4.4 uses N = 4 and says so."""
        spectrum = build_spectrum(BarrierConfig(v0=10.0, b=1.0, e_incident=5.0, v1=1.1, omega=0.25))
        assert spectrum.n_max == 4
        assert any("not integral" in notice for notice in spectrum.notices)
        assert spectrum.radius == pytest.approx(1.0, abs=1e-15)

    def test_ratio_just_below_integer(self):
        """0.3 / 0.1 evaluates below 3 in floating point but still counts as N = 3."""
        assert channel_count(0.3, 0.1) == 3
        assert channel_count(0.1, 1.0) == 0

    def test_doubling_v1_doubles_n(self):
        """Doubling V1 at fixed omega doubles N and the band half-width."""
        a = build_spectrum(BarrierConfig(v0=10.0, b=1.0, e_incident=5.0, v1=1.0, omega=0.25))
        b = build_spectrum(BarrierConfig(v0=10.0, b=1.0, e_incident=5.0, v1=2.0, omega=0.25))
        assert b.n_max == 2 * a.n_max
        assert b.radius == 2 * a.radius

    def test_closed_channels_are_flagged(self):
        """Channels at or below zero energy stay in the spectrum as closed."""
        spectrum = build_spectrum(BarrierConfig(v0=10.0, b=1.0, e_incident=0.5, v1=1.0, omega=0.25))
        closed = [ch for ch in spectrum.channels if ch.classification is ChannelClass.CLOSED]
        assert closed
        assert all(ch.energy <= 0 for ch in closed)
        assert len(spectrum.open_channels()) == len(spectrum.channels) - len(closed)

    def test_over_barrier_classification(self):
        """Channels at or above V0 are open-overbarrier."""
        spectrum = build_spectrum(BarrierConfig(v0=5.5, b=1.0, e_incident=5.0, v1=1.0, omega=0.25))
        over = [ch for ch in spectrum.channels if ch.classification is ChannelClass.OPEN_OVERBARRIER]
        assert over
        assert all(ch.energy >= 5.5 for ch in over)

    def test_unknown_channel_lookup(self, circle_barrier):
        """Looking up n > N is a domain error."""
        with pytest.raises(BarrierDomainError):
            build_spectrum(circle_barrier).channel(9, 1)

    def test_records(self, circle_barrier):
        """Records carry n alpha and the classification string."""
        records = build_spectrum(circle_barrier).to_records()
        assert len(records) == 9
        assert records[0]["classification"] == "open-subbarrier"
        assert records[0]["n_alpha"] == 0.0

    @settings(max_examples=300, deadline=None)
    @given(
        ratio=st.integers(min_value=1, max_value=60),
        excess=st.floats(min_value=0.0, max_value=0.99),
        omega=st.floats(min_value=0.01, max_value=3.0),
        e_n=st.floats(min_value=0.1, max_value=50.0),
    )
    def test_circle_identity_and_bounds(self, ratio, excess, omega, e_n):
        """Every channel lies on the circle, inside the band, and offsets are symmetric."""
        v1 = (ratio + excess) * omega
        cfg = BarrierConfig(v0=max(2.0 * e_n, v1) + 1.0, b=1.0, e_incident=e_n, v1=v1, omega=omega)
        spectrum = build_spectrum(cfg)
        assert len(spectrum.channels) == 2 * spectrum.n_max + 1
        scale = max(1.0, spectrum.radius ** 2)
        for ch in spectrum.channels:
            assert abs(circle_residual(ch, spectrum)) <= 1e-12 * scale
            assert e_n - v1 - 1e-12 <= ch.energy <= e_n + v1 + 1e-12
        offsets = sorted(ch.energy - e_n for ch in spectrum.channels)
        assert_allclose(offsets, [-o for o in reversed(offsets)], atol=1e-12 * max(1.0, spectrum.radius))


class TestDensityOfStates:
    """Tests for density_of_states() and its continuous form."""

    def test_band_edge_value(self):
        """n = 4, alpha = omega = 0.25 gives 4.0."""
        assert density_of_states(4, 0.25, 0.25) == 4.0

    def test_even_in_n(self):
        """rho(-n) = rho(n)."""
        assert density_of_states(-4, 0.25, 0.25) == density_of_states(4, 0.25, 0.25)

    def test_band_centre_sentinel(self):
        """n = 0 returns the unbounded sentinel, not infinity."""
        value = density_of_states(0, 0.25, 0.25)
        assert value is UNBOUNDED
        assert str(value) == "unbounded"

    def test_is_unbounded(self):
        """Only the sentinel is unbounded; its string form and infinity are not."""
        assert is_unbounded(density_of_states(0, 0.25, 0.25))
        assert not is_unbounded(density_of_states(4, 0.25, 0.25))
        assert not is_unbounded("unbounded")
        assert not is_unbounded(math.inf)

    def test_product_identity(self):
        """rho(n) * |n alpha omega| = 1 for n != 0."""
        for n in range(-20, 21):
            if n:
                assert density_of_states(n, 0.3, 0.3) * abs(n * 0.3 * 0.3) == pytest.approx(1.0, abs=1e-15)

    def test_continuous_form(self):
        """At t = 0 the continuous density is 1 / (omega V1)."""
        assert density_of_states_at_time(0.0, 1.0, 0.25) == 4.0
        assert density_of_states_at_time(0.0, 0.0, 0.25) is UNBOUNDED


class TestEntryTimes:
    """Tests for entry_time(), snapshot_height() and energy_at_time()."""

    @pytest.fixture
    def ten_level(self):
        return build_spectrum(BarrierConfig(v0=20.0, b=1.0, e_incident=10.0, v1=10.0, omega=1.0))

    def test_elastic_entered_at_peak(self, ten_level):
        """n = N is entered at t = 0."""
        assert entry_time(10, ten_level) == 0.0

    def test_band_centre_quarter_period(self, ten_level):
        """n = 0 is entered at pi / (2 omega)."""
        assert entry_time(0, ten_level) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_arccos_value(self, ten_level):
        """n = 2, N = 10 gives arccos(0.2) = 1.36944."""
        assert entry_time(2, ten_level) == pytest.approx(1.369438406, abs=1e-9)

    def test_out_of_range(self, ten_level):
        """n > N would need |cos| > 1."""
        with pytest.raises(BarrierDomainError):
            entry_time(11, ten_level)

    def test_snapshot_heights(self, circle_barrier):
        """Snapshot heights are V0 shifted by the channel offset."""
        assert snapshot_height(circle_barrier, 0, 1) == 11.0
        assert snapshot_height(circle_barrier, 0, -1) == 9.0
        assert snapshot_height(circle_barrier, 4, 1) == 10.0

    def test_energy_harmonic(self, circle_barrier):
        """E(t) reaches E0 + V1 a quarter period in."""
        t = math.pi / (2 * circle_barrier.omega)
        assert energy_at_time(t, circle_barrier) == pytest.approx(6.0, abs=1e-12)
        assert energy_at_time(0.0, circle_barrier) == 5.0
