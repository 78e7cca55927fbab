"""
Quantized channel spectrum of a time-modulated barrier.

Matching the temporal parts of the free-space and barrier wave functions gives
the condition V1 cos(omega t_n) = n alpha. Its real solutions define a finite
set of 2N+1 scattering channels whose energies lie on a circle of radius
N alpha centred on the elastic level:

    E_n(+-) = E_N +- sqrt(N^2 - n^2) alpha,    n = 0..N
    (E_n - E_N)^2 + (n alpha)^2 = (N alpha)^2

Time is quantized in units of the timeon tau = 1 / (N omega).
"""
import math
import logging
logger = logging.getLogger(__name__)
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

from engine.barrier_model import BarrierConfig
from engine.errors import BarrierDomainError, ConfigValidationError

_RATIO_SLACK = 1e-9


class ChannelClass(str, Enum):
    OPEN_SUBBARRIER = "open-subbarrier"
    OPEN_OVERBARRIER = "open-overbarrier"
    CLOSED = "closed"


class _Unbounded:
    """Band-centre density of states. Serializes as the string 'unbounded'."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNBOUNDED"

    def __str__(self) -> str:
        return "unbounded"


UNBOUNDED = _Unbounded()
Density = Union[float, _Unbounded]


def is_unbounded(value: object) -> bool:
    return isinstance(value, _Unbounded)


@dataclass(frozen=True)
class Channel:
    n: int
    sign: int  # +1 absorption side, -1 emission side; the elastic channel uses +1
    energy: float
    classification: ChannelClass
    snapshot_height: float

    @property
    def sign_symbol(self) -> str:
        return "+" if self.sign > 0 else "-"

    @property
    def is_open(self) -> bool:
        return self.classification is not ChannelClass.CLOSED


@dataclass(frozen=True)
class ChannelSpectrum:
    n_max: int
    alpha: float
    omega: float
    tau: Optional[float]
    e_elastic: float
    radius: float
    channels: Tuple[Channel, ...]
    notices: Tuple[str, ...] = ()

    @property
    def is_degenerate(self) -> bool:
        return self.n_max == 0

    def channel(self, n: int, sign: int = 1) -> Channel:
        if n == self.n_max:
            sign = 1
        for ch in self.channels:
            if ch.n == n and ch.sign == sign:
                return ch
        raise BarrierDomainError(f"no channel n={n} sign={sign:+d} (N={self.n_max})")

    def open_channels(self) -> List[Channel]:
        return [ch for ch in self.channels if ch.is_open]

    def to_records(self) -> List[Dict]:
        return [
            {
                "n": ch.n,
                "sign": ch.sign_symbol,
                "n_alpha": ch.n * self.alpha,
                "energy": ch.energy,
                "classification": ch.classification.value,
                "snapshot_height": ch.snapshot_height,
            }
            for ch in self.channels
        ]


def classify(energy: float, v0: float) -> ChannelClass:
    if energy <= 0.0:
        return ChannelClass.CLOSED
    if energy >= v0:
        return ChannelClass.OPEN_OVERBARRIER
    return ChannelClass.OPEN_SUBBARRIER


def channel_count(v1: float, omega: float) -> int:
    """N = floor(V1 / alpha), tolerant of ratios like 0.3/0.1 landing just below an integer."""
    if omega <= 0:
        raise ConfigValidationError("modulation frequency must be positive", field="omega")
    if v1 < 0:
        raise ConfigValidationError("modulation amplitude must be non-negative", field="v1")
    return int(math.floor(v1 / omega + _RATIO_SLACK))


def _level_offset(n: int, n_max: int, radius: float) -> float:
    # sqrt(N^2 - n^2) alpha written against the clamped radius so n = 0 sits on the band edge
    return radius * math.sqrt((n_max - n) * (n_max + n)) / n_max


def snapshot_height(cfg: BarrierConfig, n: int, sign: int) -> float:
    """Height V0 +- sqrt(N^2 - n^2) alpha of the instantaneously static barrier for channel (n, sign)."""
    n_max = channel_count(cfg.v1, cfg.omega)
    if n_max == 0:
        return cfg.v0
    if not 0 <= n <= n_max:
        raise BarrierDomainError(f"channel index {n} outside [0, {n_max}]")
    radius = min(n_max * cfg.omega, cfg.v1)
    return cfg.v0 + (1 if sign >= 0 else -1) * _level_offset(n, n_max, radius)


def build_spectrum(cfg: BarrierConfig) -> ChannelSpectrum:
    if cfg.e_incident <= 0:
        raise ConfigValidationError("incident energy must be positive", field="e_incident")
    alpha = cfg.omega
    n_max = channel_count(cfg.v1, cfg.omega)
    e_n = cfg.e_incident
    notices: List[str] = []

    elastic = Channel(
        n=n_max,
        sign=1,
        energy=e_n,
        classification=classify(e_n, cfg.v0),
        snapshot_height=cfg.v0,
    )
    if n_max == 0:
        msg = f"degenerate spectrum: V1={cfg.v1} < alpha={alpha}, no sidebands (static barrier)"
        logger.warning(msg)
        notices.append(msg)
        return ChannelSpectrum(
            n_max=0, alpha=alpha, omega=cfg.omega, tau=None, e_elastic=e_n,
            radius=0.0, channels=(elastic,), notices=tuple(notices),
        )

    if abs(n_max * alpha - cfg.v1) > 1e-9 * cfg.v1:
        msg = (
            f"V1/alpha={cfg.v1 / alpha:.12g} is not integral; using N={n_max}, "
            f"tau=1/(N omega)={1.0 / (n_max * cfg.omega):.12g} instead of 1/V1={1.0 / cfg.v1:.12g}"
        )
        logger.warning(msg)
        notices.append(msg)

    radius = min(n_max * alpha, cfg.v1)
    channels = [elastic]
    for n in range(n_max):
        offset = _level_offset(n, n_max, radius)
        for sign in (1, -1):
            energy = e_n + sign * offset
            channels.append(
                Channel(
                    n=n,
                    sign=sign,
                    energy=energy,
                    classification=classify(energy, cfg.v0),
                    snapshot_height=cfg.v0 + sign * offset,
                )
            )
    channels.sort(key=lambda ch: ch.energy)
    closed = sum(1 for ch in channels if not ch.is_open)
    if closed:
        logger.warning(f"{closed} channel(s) at or below zero energy are closed (V1 >= E_N)")
    logger.info(f"Built spectrum N={n_max} with {len(channels)} channels around E_N={e_n}")
    return ChannelSpectrum(
        n_max=n_max,
        alpha=alpha,
        omega=cfg.omega,
        tau=1.0 / (n_max * cfg.omega),
        e_elastic=e_n,
        radius=radius,
        channels=tuple(channels),
        notices=tuple(notices),
    )


def circle_residual(channel: Channel, spectrum: ChannelSpectrum) -> float:
    return (channel.energy - spectrum.e_elastic) ** 2 + (channel.n * spectrum.alpha) ** 2 - spectrum.radius ** 2


def density_of_states(n: int, alpha: float, omega: float) -> Density:
    """1 / |n alpha omega|; the band centre n = 0 returns UNBOUNDED."""
    if n == 0:
        return UNBOUNDED
    return 1.0 / abs(n * alpha * omega)


def density_of_states_at_time(t: float, v1: float, omega: float) -> Density:
    """Continuous form |omega V1 cos(omega t)|^-1 before quantization."""
    denom = abs(omega * v1 * math.cos(omega * t))
    if denom == 0.0:
        return UNBOUNDED
    return 1.0 / denom


def energy_at_time(t: float, cfg: BarrierConfig) -> float:
    """Continuous energy harmonic E(t) = E0 + V1 sin(omega t)."""
    return cfg.e_incident + cfg.v1 * math.sin(cfg.omega * t)


def entry_time(n: int, spectrum: ChannelSpectrum) -> float:
    """
    Principal solution t_n = arccos(n / N) / omega in [0, pi/omega] of
    cos(omega t) = n omega tau.

    The full solution set is +-t_n + 2 pi k / omega for integer k.
    """
    if spectrum.n_max == 0:
        raise BarrierDomainError("entry times are undefined for a degenerate (N = 0) spectrum")
    if not 0 <= n <= spectrum.n_max:
        raise BarrierDomainError(f"channel index {n} outside [0, {spectrum.n_max}]: |cos| would exceed 1")
    return math.acos(n / spectrum.n_max) / spectrum.omega
