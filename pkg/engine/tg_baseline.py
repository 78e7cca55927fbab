"""
Perturbative sideband baseline.

The oscillating phase factor exp[-i (V1/alpha) sin(omega t)] expands as
sum_n J_n(V1/alpha) exp(-i n omega t), giving an infinite, equally spaced
spectrum E_n = E0 + n alpha with weights J_n^2. The table here truncates it
at a cumulative-weight tolerance and attaches weight x static transmission
to every open sideband. This is the usual photon-assisted tunnelling
composition, kept only as a comparison baseline for the finite spectrum.

Bessel functions are computed in-repo: Miller's downward recurrence
normalized with J0 + 2 sum J_2k = 1, and a power series for small arguments.
"""
import os
import math
import logging
logger = logging.getLogger(__name__)
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from engine.barrier_model import BarrierConfig
from engine.dynamic_transmission import transmission_at_energy
from engine.errors import BesselRangeError, ConfigValidationError

DEFAULT_CUTOFF_TOL: float = float(os.environ.get("DYNB_CUTOFF_TOL", "1e-6"))

MAX_ORDER = 500
MAX_ARGUMENT = 1.0e4
_SERIES_LIMIT = 0.5
_RESCALE = 1.0e250


def _bessel_series(n: int, x: float) -> float:
    half = 0.5 * x
    if n > 0 and half == 0.0:
        return 0.0
    term = math.exp(n * math.log(half) - math.lgamma(n + 1)) if n > 0 else 1.0
    total = term
    quarter = half * half
    k = 0
    while abs(term) > 1e-17 * abs(total) and k < 200:
        term *= -quarter / ((k + 1) * (n + k + 1))
        total += term
        k += 1
    return total


def _check_range(n_top: int, x: float) -> None:
    if x < 0 or not math.isfinite(x):
        raise BesselRangeError(f"argument must be finite and >= 0, got {x}")
    if n_top > MAX_ORDER:
        raise BesselRangeError(f"order {n_top} exceeds {MAX_ORDER}")
    if x > MAX_ARGUMENT:
        raise BesselRangeError(f"argument {x} exceeds {MAX_ARGUMENT}")


def bessel_j_orders(n_top: int, x: float) -> np.ndarray:
    """J_0(x) .. J_{n_top}(x) from a single downward recurrence."""
    _check_range(n_top, x)
    out = np.zeros(n_top + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    if x <= _SERIES_LIMIT:
        for n in range(n_top + 1):
            out[n] = _bessel_series(n, x)
        return out

    top = max(n_top, int(x))
    start = 2 * ((top + 30 + int(math.sqrt(60.0 * top))) // 2)
    vals = np.zeros(start + 2)
    vals[start] = 1.0
    for k in range(start, 0, -1):
        vals[k - 1] = (2.0 * k / x) * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > _RESCALE:
            vals[k - 1:] /= _RESCALE
    norm = vals[0] + 2.0 * math.fsum(vals[2:start + 1:2])
    if norm == 0.0 or not math.isfinite(norm):
        raise BesselRangeError(f"normalization failed for x={x}")
    out[:] = vals[: n_top + 1] / norm
    return out


def bessel_j(n: int, x: float) -> float:
    order = abs(n)
    if order > MAX_ORDER:
        raise BesselRangeError(f"order {n} exceeds {MAX_ORDER}")
    value = float(bessel_j_orders(order, x)[order])
    if n < 0 and order % 2 == 1:
        return -value
    return value


@dataclass(frozen=True)
class SidebandRow:
    n: int
    weight: float
    energy: float
    static_transmission: Optional[float]
    transmission: Optional[float]

    @property
    def closed(self) -> bool:
        return self.transmission is None

    def to_record(self) -> Dict:
        return {
            "n": self.n,
            "weight": self.weight,
            "energy": self.energy,
            "static_transmission": self.static_transmission,
            "transmission": self.transmission,
            "closed": self.closed,
        }


@dataclass(frozen=True)
class SidebandTable:
    argument: float
    n_cutoff: int
    cutoff_tol: float
    alpha: float
    band_half_width: float
    rows: Tuple[SidebandRow, ...]

    @property
    def total_weight(self) -> float:
        return math.fsum(row.weight for row in self.rows)

    @property
    def total_transmission(self) -> float:
        return math.fsum(row.transmission for row in self.rows if row.transmission is not None)

    @property
    def exceeds_band(self) -> bool:
        """True when retained sidebands reach outside [E0 - V1, E0 + V1]."""
        return self.n_cutoff * self.alpha > self.band_half_width * (1.0 + 1e-12)

    def to_records(self) -> List[Dict]:
        return [row.to_record() for row in self.rows]


def _row(cfg: BarrierConfig, n: int, weight: float) -> SidebandRow:
    energy = cfg.e_incident + n * cfg.omega
    if energy <= 0.0:
        return SidebandRow(n=n, weight=weight, energy=energy, static_transmission=None, transmission=None)
    t = transmission_at_energy(cfg, energy)
    return SidebandRow(n=n, weight=weight, energy=energy, static_transmission=t, transmission=weight * t)


def tg_sidebands(cfg: BarrierConfig, cutoff_tol: float = DEFAULT_CUTOFF_TOL) -> SidebandTable:
    if not (0.0 < cutoff_tol <= 1e-3):
        raise ConfigValidationError(f"must lie in (0, 1e-3], got {cutoff_tol}", field="cutoff_tol")
    if cfg.omega <= 0:
        raise ConfigValidationError("modulation frequency must be positive", field="omega")
    if cfg.v1 < 0:
        raise ConfigValidationError("modulation amplitude must be non-negative", field="v1")

    argument = cfg.v1 / cfg.omega
    if argument == 0.0:
        rows = (_row(cfg, 0, 1.0),)
        return SidebandTable(
            argument=0.0, n_cutoff=0, cutoff_tol=cutoff_tol, alpha=cfg.omega,
            band_half_width=cfg.v1, rows=rows,
        )

    n_top = min(MAX_ORDER, int(argument + 10.0 * argument ** (1.0 / 3.0) + 30))
    j = bessel_j_orders(n_top, argument)
    cumulative = j[0] ** 2
    cutoff = 0
    while cumulative < 1.0 - cutoff_tol:
        if cutoff == n_top:
            raise BesselRangeError(
                f"weights at V1/alpha={argument} did not reach 1 - {cutoff_tol} within order {n_top}"
            )
        cutoff += 1
        cumulative += 2.0 * j[cutoff] ** 2

    rows = tuple(_row(cfg, n, float(j[abs(n)] ** 2)) for n in range(-cutoff, cutoff + 1))
    closed = sum(1 for row in rows if row.closed)
    if closed:
        logger.info(f"{closed} sideband(s) at or below zero energy flagged closed")
    logger.info(f"Retained {len(rows)} sidebands at V1/alpha={argument:.6g}, weight={cumulative:.15f}")
    return SidebandTable(
        argument=argument,
        n_cutoff=cutoff,
        cutoff_tol=cutoff_tol,
        alpha=cfg.omega,
        band_half_width=cfg.v1,
        rows=rows,
    )
