"""
Quantized barrier-traversal times.

An electron enters through channel n at time t_n (cos omega t_n = n/N) and
leaves through channel m < n at t_m = t_n + T (cos omega t_m = m/N). Taking
sin omega t_n = +sqrt(1 - (n/N)^2):

    (n/N) cos(omega T) - sqrt(1 - (n/N)^2) sin(omega T) = m/N

- traversal_exact(): every root omega T in [0, 2 pi)
- traversal_low(), traversal_low_approx(), traversal_low_energy(): omega T << 1
- traversal_high(), high_freq_ratio(): tan(omega T) roots of
  A tan^2 + 2B tan + C = 0 with A = N^2 - n^2 - m^2, B = n sqrt(N^2 - n^2), C = n^2 - m^2

Durations are positive magnitudes; the absorption (+) / emission (-) label is
carried by the t_plus / t_minus fields rather than by a sign.
"""
import math
import logging
logger = logging.getLogger(__name__)
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

from engine.channel_spectrum import ChannelSpectrum
from engine.errors import BarrierDomainError, SingularityError

_DEGENERATE_A = 1e-12


class Regime(str, Enum):
    EXACT = "exact"
    LOW = "low-frequency"
    HIGH = "high-frequency"


@dataclass(frozen=True)
class TraversalSolution:
    n: int
    m: int
    n_max: int
    regime: Regime
    t_plus: Optional[float]
    t_minus: Optional[float]
    tan_theta_plus: Optional[float] = None
    tan_theta_minus: Optional[float] = None
    branch: Optional[int] = None
    ratio: Optional[float] = None
    discriminant: Optional[float] = None
    degenerate: bool = False

    @property
    def absorption_shorter(self) -> Optional[bool]:
        """Ordering of the two durations for this branch (None when one is missing)."""
        if self.t_plus is None or self.t_minus is None:
            return None
        return self.t_plus < self.t_minus

    def to_record(self, omega: float) -> Dict:
        return {
            "n": self.n,
            "m": self.m,
            "N": self.n_max,
            "omega": omega,
            "regime": self.regime.value,
            "t_plus": self.t_plus,
            "t_minus": self.t_minus,
            "tan_theta_plus": self.tan_theta_plus,
            "tan_theta_minus": self.tan_theta_minus,
            "ratio": self.ratio,
        }


def _check_indices(n: int, m: int, n_max: int, *, strict_top: bool = False, positive_m: bool = False) -> None:
    low = 1 if positive_m else 0
    if not (low <= m < n <= n_max):
        raise BarrierDomainError(f"need {low} <= m < n <= N, got n={n} m={m} N={n_max}")
    if strict_top and n == n_max:
        raise SingularityError(f"n = N = {n_max}: denominator (N - n)^(1/2) vanishes")


def _check_positive(name: str, value: float) -> None:
    if not value > 0:
        raise BarrierDomainError(f"{name} must be positive, got {value}")


def traversal_exact(n: int, m: int, n_max: int, omega: float) -> Tuple[float, ...]:
    """
    Both roots of the exact exit condition with omega T in [0, 2 pi), divided
    by omega and sorted ascending. Adding 2 pi k / omega to either root gives
    the remaining solutions (see exact_family).
    """
    _check_indices(n, m, n_max)
    _check_positive("omega", omega)
    a_n = math.acos(n / n_max)
    a_m = math.acos(m / n_max)
    roots = sorted({(a_m - a_n) % (2.0 * math.pi), (2.0 * math.pi - a_m - a_n) % (2.0 * math.pi)})
    return tuple(r / omega for r in roots)


def exact_family(n: int, m: int, n_max: int, omega: float, k: int) -> Tuple[float, ...]:
    period = 2.0 * math.pi / omega
    return tuple(t + k * period for t in traversal_exact(n, m, n_max, omega))


def traversal_low(n: int, m: int, n_max: int, tau: float) -> TraversalSolution:
    _check_indices(n, m, n_max, strict_top=True)
    _check_positive("tau", tau)
    t = abs(n - m) * n_max * tau / (math.sqrt(n_max + n) * math.sqrt(n_max - n))
    return TraversalSolution(n=n, m=m, n_max=n_max, regime=Regime.LOW, t_plus=t, t_minus=t)


def traversal_low_approx(n: int, m: int, n_max: int, tau: float) -> float:
    """Binomial form |n - m| (1 + n^2 / 2N^2) tau, meant for n << N."""
    _check_indices(n, m, n_max)
    _check_positive("tau", tau)
    if n > n_max / 4.0:
        logger.warning(f"n={n} > N/4={n_max / 4.0:g}: binomial expansion loses accuracy")
    return abs(n - m) * (1.0 + n * n / (2.0 * n_max * n_max)) * tau


def traversal_low_energy(n: int, m: int, spectrum: ChannelSpectrum) -> TraversalSolution:
    """Low-frequency times written against the channel energies: +-|n - m| / (E_n(+-) - E_N)."""
    n_max = spectrum.n_max
    _check_indices(n, m, n_max, strict_top=True)
    e_plus = spectrum.channel(n, 1).energy - spectrum.e_elastic
    e_minus = spectrum.channel(n, -1).energy - spectrum.e_elastic
    if e_plus == 0.0 or e_minus == 0.0:
        raise SingularityError(f"channel n={n} coincides with the elastic level")
    return TraversalSolution(
        n=n,
        m=m,
        n_max=n_max,
        regime=Regime.LOW,
        t_plus=abs(n - m) / e_plus,
        t_minus=-abs(n - m) / e_minus,
    )


def quadratic_coefficients(n: int, m: int, n_max: int) -> Tuple[float, float, float]:
    a = float(n_max * n_max - n * n - m * m)
    b = n * math.sqrt((n_max - n) * (n_max + n))
    c = float(n * n - m * m)
    return a, b, c


def high_freq_ratio(n: int, m: int, n_max: int) -> float:
    """tan(omega T+) / tan(omega T-) expressed through the channel indices; always < 1."""
    _check_indices(n, m, n_max, positive_m=True)
    if n == n_max:
        raise BarrierDomainError(f"need n < N, got n = N = {n_max}")
    p = n * math.sqrt((n_max - n) * (n_max + n))
    q = m * math.sqrt((n_max - m) * (n_max + m))
    return (p - q) / (p + q)


def traversal_high(n: int, m: int, n_max: int, omega: float, branch: int = 1) -> TraversalSolution:
    """
    Roots tan(theta+-) of the high-frequency quadratic, with
    theta = arctan(tan theta) + branch * pi and T = theta / omega.

    omega T >> 1 corresponds to branch >= 1; the branch is left to the caller.
    When A = 0 (N^2 = n^2 + m^2) the quadratic collapses to 2B tan + C = 0 and
    only the + root exists; the result is flagged `degenerate`.
    """
    _check_indices(n, m, n_max, positive_m=True)
    if n == n_max:
        raise BarrierDomainError(f"need n < N, got n = N = {n_max}")
    _check_positive("omega", omega)
    a, b, c = quadratic_coefficients(n, m, n_max)
    disc = b * b - a * c
    root = m * math.sqrt((n_max - m) * (n_max + m))
    ratio = high_freq_ratio(n, m, n_max)

    # q = -(B + sqrt(disc)); B > 0 for 0 < n < N so no cancellation
    q = -(b + root)
    tan_plus = c / q
    degenerate = abs(a) <= _DEGENERATE_A * max(abs(b), abs(c), 1.0)
    if degenerate:
        logger.info(f"A = 0 at n={n} m={m} N={n_max}: single linear root")
        tan_minus = None
    else:
        tan_minus = q / a

    t_plus = (math.atan(tan_plus) + branch * math.pi) / omega
    t_minus = None if tan_minus is None else (math.atan(tan_minus) + branch * math.pi) / omega
    for label, value in (("t_plus", t_plus), ("t_minus", t_minus)):
        if value is not None and value <= 0:
            raise BarrierDomainError(f"branch {branch} gives non-positive {label}={value}; choose branch >= 1")

    return TraversalSolution(
        n=n,
        m=m,
        n_max=n_max,
        regime=Regime.HIGH,
        t_plus=t_plus,
        t_minus=t_minus,
        tan_theta_plus=tan_plus,
        tan_theta_minus=tan_minus,
        branch=branch,
        ratio=ratio,
        discriminant=disc,
        degenerate=degenerate,
    )


def quadratic_residual(tan_theta: float, n: int, m: int, n_max: int) -> float:
    a, b, c = quadratic_coefficients(n, m, n_max)
    return a * tan_theta * tan_theta + 2.0 * b * tan_theta + c
