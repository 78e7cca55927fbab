"""
Per-channel transmission through the quantized dynamic barrier.

Each open channel is treated as an equivalent static barrier of height V0 at
the channel energy E_n, with unit incident amplitude. The total is the plain
sum over open channels and may exceed 1; `normalized` (total / open_count) is
a plotting aid and not part of the channel model.
"""
import math
import logging
logger = logging.getLogger(__name__)
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from engine.barrier_model import (
    BarrierConfig,
    opaque_transmission,
    sub_barrier_transmission,
    transmission_static,
)
from engine.channel_spectrum import Channel, ChannelClass, ChannelSpectrum, build_spectrum
from engine.errors import BarrierDomainError, ClosedChannelError


@dataclass(frozen=True)
class ChannelTransmission:
    n: int
    sign: int
    energy: float
    kn: float
    kappa_n: float  # decay constant below V0, propagation constant q above it
    t_n: float
    classification: ChannelClass
    snapshot_height: float

    def to_record(self) -> Dict:
        return {
            "n": self.n,
            "sign": "+" if self.sign > 0 else "-",
            "energy": self.energy,
            "kn": self.kn,
            "kappa_n": self.kappa_n,
            "t_n": self.t_n,
            "classification": self.classification.value,
            "snapshot_height": self.snapshot_height,
        }


@dataclass(frozen=True)
class TransmissionResult:
    per_channel: Tuple[ChannelTransmission, ...]
    total: float
    normalized: float
    open_count: int
    closed_count: int
    closed_channels: Tuple[Channel, ...]
    spectrum: ChannelSpectrum

    @property
    def notices(self) -> Tuple[str, ...]:
        return self.spectrum.notices

    def to_records(self) -> List[Dict]:
        return [row.to_record() for row in self.per_channel]


def transmission_at_energy(cfg: BarrierConfig, energy: float) -> float:
    """
    Transmission of a unit-amplitude wave at `energy` over a static barrier of
    height cfg.v0 and width cfg.b.

    Below V0 this is the sinh form; above it the continuation kappa -> i q
    (q^2 = E - V0) gives 4k^2q^2 / (4k^2q^2 + (k^2 - q^2)^2 sin^2(q b)); at
    E = V0 exactly the kappa -> 0 limit 1 / (1 + k^2 b^2 / 4) is used.
    """
    if energy <= 0.0:
        raise ClosedChannelError(f"energy {energy} <= 0 is a closed channel")
    k = math.sqrt(energy)
    if energy < cfg.v0:
        return sub_barrier_transmission(k, math.sqrt(cfg.v0 - energy), cfg.b)
    if energy == cfg.v0:
        return 1.0 / (1.0 + energy * cfg.b * cfg.b / 4.0)
    q = math.sqrt(energy - cfg.v0)
    four_kq = 4.0 * energy * q * q
    mismatch = (energy - q * q) ** 2 * math.sin(q * cfg.b) ** 2
    return four_kq / (four_kq + mismatch)


def _check_open(channel: Channel) -> None:
    if not channel.is_open or channel.energy <= 0.0:
        raise ClosedChannelError(f"channel n={channel.n} sign={channel.sign_symbol} at E={channel.energy} is closed")


def transmission_channel(cfg: BarrierConfig, channel: Channel) -> float:
    _check_open(channel)
    return transmission_at_energy(cfg, channel.energy)


def transmission_channel_opaque(cfg: BarrierConfig, channel: Channel) -> float:
    """Thick-barrier analogue for a sub-barrier channel."""
    _check_open(channel)
    if channel.energy >= cfg.v0:
        raise BarrierDomainError(f"opaque form needs a sub-barrier channel, got E={channel.energy} >= V0={cfg.v0}")
    return opaque_transmission(math.sqrt(channel.energy), math.sqrt(cfg.v0 - channel.energy), cfg.b)


def _evaluate(cfg: BarrierConfig, channel: Channel) -> ChannelTransmission:
    return ChannelTransmission(
        n=channel.n,
        sign=channel.sign,
        energy=channel.energy,
        kn=math.sqrt(channel.energy),
        kappa_n=math.sqrt(abs(cfg.v0 - channel.energy)),
        t_n=transmission_channel(cfg, channel),
        classification=channel.classification,
        snapshot_height=channel.snapshot_height,
    )


def transmission_total(cfg: BarrierConfig, spectrum: Optional[ChannelSpectrum] = None) -> TransmissionResult:
    if spectrum is None:
        spectrum = build_spectrum(cfg)
    if spectrum.is_degenerate:
        # single elastic channel: same code path as the static barrier
        elastic = spectrum.channels[0]
        t = transmission_static(cfg)
        row = ChannelTransmission(
            n=elastic.n,
            sign=elastic.sign,
            energy=elastic.energy,
            kn=math.sqrt(elastic.energy),
            kappa_n=math.sqrt(abs(cfg.v0 - elastic.energy)),
            t_n=t,
            classification=elastic.classification,
            snapshot_height=elastic.snapshot_height,
        )
        return TransmissionResult(
            per_channel=(row,), total=t, normalized=t, open_count=1,
            closed_count=0, closed_channels=(), spectrum=spectrum,
        )

    open_channels = spectrum.open_channels()
    closed = tuple(ch for ch in spectrum.channels if not ch.is_open)
    rows = tuple(_evaluate(cfg, ch) for ch in open_channels)
    total = math.fsum(row.t_n for row in rows)
    if total > 1.0:
        logger.info(f"Channel sum {total:.6g} exceeds 1 (unweighted sum over {len(rows)} channels)")
    return TransmissionResult(
        per_channel=rows,
        total=total,
        normalized=total / len(rows),
        open_count=len(rows),
        closed_count=len(closed),
        closed_channels=closed,
        spectrum=spectrum,
    )
