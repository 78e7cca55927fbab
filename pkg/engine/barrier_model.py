"""
Static rectangular-barrier scattering.

Natural units are fixed throughout the package: hbar = 1 and 2m = 1, so a
wavenumber squared equals an energy (k**2 = E) and the photon quantum equals
the modulation frequency (alpha = omega). To convert to SI, multiply energies
by hbar**2 / (2 m L**2) for a chosen length unit L and times by hbar / E-unit.

Provides:
- BarrierConfig: the single source of physical parameters
- wavenumbers(): k and kappa outside/inside the barrier
- match_static(): amplitude matching at x = +-b/2 (4x4 linear solve)
- transmission_static(): closed-form transmission
- transmission_opaque(): thick-barrier approximation, evaluated in log space
"""
import math
import logging
logger = logging.getLogger(__name__)
from dataclasses import dataclass, asdict, replace, fields
from typing import Dict, Tuple

import numpy as np
from scipy.special import expit

from engine.errors import BarrierDomainError, ConfigValidationError, MatchingError


@dataclass(frozen=True)
class BarrierConfig:
    v0: float
    b: float
    e_incident: float
    v1: float = 0.0
    omega: float = 1.0

    @classmethod
    def from_dict(cls, data: Dict) -> "BarrierConfig":
        if not isinstance(data, dict):
            raise ConfigValidationError("expected an object", field="barrier")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigValidationError(f"unknown field(s) {unknown}", field="barrier")
        values = {}
        for name in known:
            if name not in data:
                continue
            raw = data[name]
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise ConfigValidationError(f"expected a number, got {raw!r}", field=f"barrier.{name}")
            values[name] = float(raw)
        for required in ("v0", "b", "e_incident"):
            if required not in values:
                raise ConfigValidationError("missing required field", field=f"barrier.{required}")
        return cls(**values)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    def replace(self, **changes) -> "BarrierConfig":
        return replace(self, **changes)

    def validate(self) -> "BarrierConfig":
        """Check every invariant; raises ConfigValidationError naming the field."""
        for name, value in self.to_dict().items():
            if not math.isfinite(value):
                raise ConfigValidationError("must be finite", field=name)
        if self.v0 <= 0:
            raise ConfigValidationError("barrier height must be positive", field="v0")
        if self.b <= 0:
            raise ConfigValidationError("barrier width must be positive", field="b")
        if self.omega <= 0:
            raise ConfigValidationError("modulation frequency must be positive", field="omega")
        if self.e_incident <= 0:
            raise ConfigValidationError("incident energy must be positive", field="e_incident")
        if self.e_incident >= self.v0:
            raise ConfigValidationError("incident energy must lie below the barrier top v0", field="e_incident")
        if self.v1 < 0:
            raise ConfigValidationError("modulation amplitude must be non-negative", field="v1")
        if self.v1 > self.v0:
            raise ConfigValidationError("modulation amplitude may not exceed v0", field="v1")
        return self


@dataclass(frozen=True)
class StaticSolution:
    k0: float
    kappa0: float
    a_minus: complex
    b_plus: complex
    b_minus: complex
    c_plus: complex
    transmission: float
    reflection: float
    # |T + R - 1| of the solve, before T and R are clipped to [0, 1]
    flux_residual: float


def wavenumbers(e: float, v0: float) -> Tuple[float, float]:
    if not (e > 0 and e < v0):
        raise BarrierDomainError(
            f"energy {e} outside (0, {v0}); over-barrier energies go through "
            "dynamic_transmission.transmission_at_energy"
        )
    return math.sqrt(e), math.sqrt(v0 - e)


def _check_static(cfg: BarrierConfig) -> None:
    if cfg.b < 0:
        raise ConfigValidationError("barrier width must be non-negative", field="b")


def _log_sinh(x: float) -> float:
    # log(sinh x) for x > 0 without overflow
    return x + math.log(-math.expm1(-2.0 * x)) - math.log(2.0)


def sub_barrier_transmission(k: float, kappa: float, b: float) -> float:
    """T = 1 / (1 + ((k^2 + kappa^2) / 2 k kappa)^2 sinh^2(kappa b)) as 1 / (1 + exp(L)); L is assembled in log space."""
    if k == 0.0:
        return 0.0
    x = kappa * b
    if x == 0.0:
        return 1.0
    log_term = 2.0 * math.log((k * k + kappa * kappa) / (2.0 * k * kappa)) + 2.0 * _log_sinh(x)
    return float(expit(-log_term))


def opaque_transmission(k: float, kappa: float, b: float) -> float:
    if k == 0.0:
        return 0.0
    log_term = 2.0 * math.log((k * k + kappa * kappa) / (4.0 * k * kappa)) + 2.0 * kappa * b
    return float(expit(-log_term))


def match_static(cfg: BarrierConfig) -> StaticSolution:
    """
    Solve the continuity conditions for psi and psi' at x = -b/2 and x = b/2
    with unit incident amplitude.

    Inside the barrier the solution is written as
        beta_p * exp(kappa (x - b/2)) + beta_m * exp(-kappa (x + b/2))
    so every matrix entry is bounded by 1 whatever kappa*b is. The reported
    B amplitudes refer to the plain exp(+-kappa x) basis.
    """
    _check_static(cfg)
    k, kappa = wavenumbers(cfg.e_incident, cfg.v0)
    half = 0.5 * cfg.b
    s = math.exp(-kappa * cfg.b)
    ph = np.exp(1j * k * half)
    inc = np.exp(-1j * k * half)

    # unknowns: [A-, beta+, beta-, C+]
    matrix = np.array(
        [
            [ph, -s, -1.0, 0.0],
            [-1j * k * ph, -kappa * s, kappa, 0.0],
            [0.0, 1.0, s, -ph],
            [0.0, kappa, -kappa * s, -1j * k * ph],
        ],
        dtype=complex,
    )
    rhs = np.array([-inc, -1j * k * inc, 0.0, 0.0], dtype=complex)
    try:
        a_minus, beta_p, beta_m, c_plus = np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError as e:
        raise MatchingError(f"matching system is singular for {cfg}: {e}") from e

    scale = math.exp(-kappa * half)
    raw_t = float(abs(c_plus) ** 2)
    raw_r = float(abs(a_minus) ** 2)
    residual = abs(raw_t + raw_r - 1.0)
    if residual > 1e-10:
        logger.warning(f"Flux residual {raw_t + raw_r - 1.0:.3e} for {cfg}")
    transmission = min(1.0, max(0.0, raw_t))
    reflection = min(1.0, max(0.0, raw_r))
    return StaticSolution(
        k0=k,
        kappa0=kappa,
        a_minus=complex(a_minus),
        b_plus=complex(beta_p * scale),
        b_minus=complex(beta_m * scale),
        c_plus=complex(c_plus),
        transmission=transmission,
        reflection=reflection,
        flux_residual=residual,
    )


def transmission_static(cfg: BarrierConfig) -> float:
    _check_static(cfg)
    k, kappa = wavenumbers(cfg.e_incident, cfg.v0)
    return sub_barrier_transmission(k, kappa, cfg.b)


def transmission_opaque(cfg: BarrierConfig) -> float:
    """
    Thick-barrier form with sinh^2 replaced by exp(2 kappa b) / 4.

    No kappa*b threshold is enforced; at small kappa*b the result is simply
    inaccurate (b = 0 gives 16 k^2 kappa^2 / (16 k^2 kappa^2 + (k^2 + kappa^2)^2),
    not 1). Very large kappa*b returns 0.0 rather than overflowing.
    """
    _check_static(cfg)
    k, kappa = wavenumbers(cfg.e_incident, cfg.v0)
    return opaque_transmission(k, kappa, cfg.b)
