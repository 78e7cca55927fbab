"""
Brute-force wave-packet oracle.

Propagates a Gaussian packet through V(x, t) = V0 + V1 sin(omega t) on
|x| <= b/2 (zero outside) with the Crank-Nicolson (Cayley) scheme

    (1 + i dt/2 H(t + dt/2)) psi(t + dt) = (1 - i dt/2 H(t + dt/2)) psi(t),
    H = -d^2/dx^2 + V   (hbar = 1, 2m = 1)

on a uniform grid with psi = 0 beyond the ends. There are no absorbing
boundaries: the grid must be large enough that nothing reaches the edges,
and GeometryError is raised when something does.
"""
import math
import logging
logger = logging.getLogger(__name__)
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.linalg import solve_banded
from scipy.signal import find_peaks
from scipy.sparse.linalg import splu

from engine.barrier_model import BarrierConfig
from engine.errors import GeometryError, StabilityError

MIN_POINTS = 512
FREE_WIDTHS = 10.0
MAX_PHASE_PER_STEP = 0.1
OVERLAP_LIMIT = 1e-12
EDGE_LIMIT = 1e-8
DRIFT_LIMIT = 1e-8
_TAIL_SIGMAS = 7.5


@dataclass(frozen=True)
class GaussianPacket:
    x0: float
    sigma: float  # position spread of |psi|^2
    k_mean: float

    @classmethod
    def from_energy(cls, e_mean: float, energy_width: float, x0: float) -> "GaussianPacket":
        """
        Packet with mean energy e_mean and energy spread energy_width * e_mean.
        The energy spread is 2 k sigma_k = k / sigma for a packet of position
        spread sigma.
        """
        if e_mean <= 0 or energy_width <= 0:
            raise GeometryError(f"packet needs positive energy and width, got {e_mean}, {energy_width}")
        k = math.sqrt(e_mean)
        return cls(x0=x0, sigma=k / (energy_width * e_mean), k_mean=k)

    @property
    def group_velocity(self) -> float:
        return 2.0 * self.k_mean

    def spread_at(self, t: float) -> float:
        return self.sigma * math.sqrt(1.0 + (t / (self.sigma * self.sigma)) ** 2)

    def amplitudes(self, x: np.ndarray) -> np.ndarray:
        psi = np.exp(-((x - self.x0) ** 2) / (4.0 * self.sigma ** 2) + 1j * self.k_mean * x)
        dx = x[1] - x[0]
        return psi / math.sqrt(float(np.sum(np.abs(psi) ** 2)) * dx)


def packet_for_barrier(cfg: BarrierConfig, energy_width: float = 0.02, e_mean: Optional[float] = None) -> GaussianPacket:
    """Packet at cfg.e_incident (or e_mean) placed left of the barrier with negligible overlap."""
    e = cfg.e_incident if e_mean is None else e_mean
    shape = GaussianPacket.from_energy(e, energy_width, 0.0)
    x0 = -0.5 * cfg.b - _TAIL_SIGMAS * shape.sigma
    return GaussianPacket(x0=x0, sigma=shape.sigma, k_mean=shape.k_mean)


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    points: int
    dt: float
    steps: int

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.points - 1)

    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.points)

    def validate(self, cfg: BarrierConfig) -> "GridSpec":
        if self.points < MIN_POINTS:
            raise GeometryError(f"grid needs at least {MIN_POINTS} points, got {self.points}")
        if self.dt <= 0 or self.steps < 1:
            raise GeometryError(f"need dt > 0 and steps >= 1, got dt={self.dt} steps={self.steps}")
        half = 0.5 * cfg.b
        free = FREE_WIDTHS * cfg.b
        if self.x_min > -half - free or self.x_max < half + free:
            raise GeometryError(
                f"grid [{self.x_min}, {self.x_max}] must leave {FREE_WIDTHS:g} barrier widths "
                f"of free space on each side of [-{half}, {half}]"
            )
        v_max = abs(cfg.v0) + abs(cfg.v1)
        if self.dt * v_max > MAX_PHASE_PER_STEP:
            raise GeometryError(f"dt * max|V| = {self.dt * v_max:.3g} exceeds {MAX_PHASE_PER_STEP}")
        return self

    @classmethod
    def for_config(
        cls,
        cfg: BarrierConfig,
        packet: GaussianPacket,
        dx: Optional[float] = None,
        dt: Optional[float] = None,
    ) -> "GridSpec":
        """
        Size a symmetric grid so the packet clears the barrier without touching
        the edges. The spacing divides b/2 exactly, so +-b/2 are grid points.
        """
        v = packet.group_velocity
        half = 0.5 * cfg.b
        e_top = packet.k_mean ** 2 + abs(cfg.v1) + (2.0 * cfg.omega if cfg.v1 > 0 else 0.0)
        v_fast = 2.0 * math.sqrt(e_top) + 3.0 / packet.sigma

        # time for the trailing tail to pass b/2; two fixed-point passes for the spreading
        t_final = (half - packet.x0 + _TAIL_SIGMAS * packet.sigma) / v
        for _ in range(2):
            t_final = (half - packet.x0 + _TAIL_SIGMAS * packet.spread_at(t_final)) / v
        spread = packet.spread_at(t_final)
        reach = v_fast * t_final
        right = packet.x0 + reach + (_TAIL_SIGMAS + 1.0) * spread
        left = -cfg.b - reach - packet.x0 - (_TAIL_SIGMAS + 1.0) * spread
        extent = max(right, -left, half + FREE_WIDTHS * cfg.b + half)

        k_max = packet.k_mean + 6.0 / (2.0 * packet.sigma)
        if dx is None:
            dx = 0.1 / max(k_max, math.sqrt(e_top))
            if cfg.b > 0:
                dx = min(dx, cfg.b / 10.0)
        if cfg.b > 0:
            dx = half / math.ceil(half / dx - 1e-9)
        cells = int(math.ceil(extent / dx))
        points = max(2 * cells + 1, MIN_POINTS + 1)
        cells = (points - 1) // 2

        if dt is None:
            scale = max(abs(cfg.v0) + abs(cfg.v1), e_top)
            dt = MAX_PHASE_PER_STEP / scale
            if cfg.v1 > 0:
                dt = min(dt, 2.0 * math.pi / (40.0 * cfg.omega))
        steps = int(math.ceil(t_final / dt))
        grid = cls(x_min=-cells * dx, x_max=cells * dx, points=2 * cells + 1, dt=dt, steps=steps)
        logger.info(
            f"Sized grid: {grid.points} points, dx={dx:.4g}, dt={dt:.4g}, steps={steps}, extent=+-{cells * dx:.4g}"
        )
        return grid


@dataclass
class WavePacketState:
    grid: GridSpec
    amplitudes: np.ndarray
    time: float
    initial_norm: float = 1.0
    diagnostics: Dict[str, float] = field(default_factory=dict)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dx)

    @property
    def norm_drift(self) -> float:
        return abs(self.norm() - self.initial_norm)

    def mean_position(self) -> float:
        density = np.abs(self.amplitudes) ** 2
        return float(np.sum(self.grid.x() * density) / np.sum(density))


def _barrier_weights(x: np.ndarray, b: float, dx: float) -> np.ndarray:
    """1 inside |x| < b/2, 1/2 on a grid point sitting exactly at +-b/2, 0 outside."""
    if b <= 0:
        return np.zeros_like(x)
    half = 0.5 * b
    tol = 1e-6 * dx
    dist = np.abs(x) - half
    weights = np.where(dist < -tol, 1.0, 0.0)
    weights[np.abs(dist) <= tol] = 0.5
    return weights


def _mass(density: np.ndarray, mask: np.ndarray, dx: float) -> float:
    return float(np.sum(density[mask]) * dx)


def propagate(
    cfg: BarrierConfig,
    grid: GridSpec,
    packet: GaussianPacket,
    check_every: int = 50,
) -> WavePacketState:
    grid.validate(cfg)
    x = grid.x()
    dx = grid.dx
    dt = grid.dt
    psi = packet.amplitudes(x).astype(complex)
    density = np.abs(psi) ** 2
    inside = np.abs(x) <= 0.5 * cfg.b + 1e-6 * dx
    overlap = _mass(density, inside, dx)
    if overlap > OVERLAP_LIMIT:
        raise GeometryError(f"initial packet overlaps the barrier by {overlap:.3e} (limit {OVERLAP_LIMIT})")
    band = max(8, grid.points // 50)
    edges = np.zeros(grid.points, dtype=bool)
    edges[:band] = True
    edges[-band:] = True
    if _mass(density, edges, dx) > EDGE_LIMIT:
        raise GeometryError("initial packet already touches the grid edges")

    weights = _barrier_weights(x, cfg.b, dx)
    kinetic_diag = 2.0 / dx ** 2
    off = -1.0 / dx ** 2
    initial_norm = float(np.sum(density) * dx)
    half_step = 0.5j * dt
    modulated = cfg.v1 != 0.0

    def apply_rhs(values: np.ndarray, potential: np.ndarray) -> np.ndarray:
        h_psi = (kinetic_diag + potential) * values
        h_psi[1:] += off * values[:-1]
        h_psi[:-1] += off * values[1:]
        return values - half_step * h_psi

    lu = None
    banded = None
    if modulated:
        banded = np.zeros((3, grid.points), dtype=complex)
        banded[0, 1:] = half_step * off
        banded[2, :-1] = half_step * off
    else:
        potential = cfg.v0 * weights
        lhs = sparse.diags(
            [np.full(grid.points - 1, half_step * off), 1.0 + half_step * (kinetic_diag + potential),
             np.full(grid.points - 1, half_step * off)],
            [-1, 0, 1],
            format="csc",
        )
        lu = splu(lhs)

    t = 0.0
    for step in range(1, grid.steps + 1):
        if modulated:
            potential = (cfg.v0 + cfg.v1 * math.sin(cfg.omega * (t + 0.5 * dt))) * weights
            banded[1, :] = 1.0 + half_step * (kinetic_diag + potential)
            psi = solve_banded((1, 1), banded, apply_rhs(psi, potential), check_finite=False)
        else:
            psi = lu.solve(apply_rhs(psi, potential))
        t = step * dt

        if step % check_every == 0 or step == grid.steps:
            density = np.abs(psi) ** 2
            drift = abs(float(np.sum(density) * dx) - initial_norm)
            if drift > DRIFT_LIMIT:
                raise StabilityError(f"norm drift {drift:.3e} at t={t:.4g} exceeds {DRIFT_LIMIT}")
            if _mass(density, edges, dx) > EDGE_LIMIT:
                raise GeometryError(f"packet reached the grid edges at t={t:.4g}; enlarge the grid")

    density = np.abs(psi) ** 2
    remaining = _mass(density, inside, dx)
    if remaining > 1e-6:
        logger.warning(f"{remaining:.3e} of the norm is still inside the barrier at t={t:.4g}")
    state = WavePacketState(grid=grid, amplitudes=psi, time=t, initial_norm=initial_norm)
    state.diagnostics = {"norm_drift": state.norm_drift, "barrier_mass": remaining}
    logger.info(f"Propagated {grid.steps} steps to t={t:.4g}, norm drift {state.norm_drift:.2e}")
    return state


def transmitted_fraction(state: WavePacketState, cfg: BarrierConfig) -> float:
    x = state.grid.x()
    density = np.abs(state.amplitudes) ** 2
    total = float(np.sum(density))
    if total == 0.0:
        return 0.0
    fraction = float(np.sum(density[x > 0.5 * cfg.b])) / total
    return min(1.0, max(0.0, fraction))


@dataclass(frozen=True)
class TransmittedSpectrum:
    k: np.ndarray
    energy: np.ndarray
    density: np.ndarray

    def to_records(self):
        return [
            {"k": float(k), "energy": float(e), "density": float(d)}
            for k, e, d in zip(self.k, self.energy, self.density)
        ]


def transmitted_spectrum(state: WavePacketState, cfg: BarrierConfig) -> TransmittedSpectrum:
    """Momentum distribution of the part of psi beyond x = b/2 (k > 0 only), normalized to the transmitted mass."""
    x = state.grid.x()
    dx = state.grid.dx
    tail = np.where(x > 0.5 * cfg.b, state.amplitudes, 0.0)
    phi = np.fft.fftshift(np.fft.fft(tail))
    k = np.fft.fftshift(np.fft.fftfreq(state.grid.points, d=dx)) * 2.0 * np.pi
    density = np.abs(phi) ** 2
    dk = 2.0 * np.pi / (state.grid.points * dx)
    positive = k > 0
    k, density = k[positive], density[positive]
    mass = float(np.sum(density) * dk)
    if mass > 0:
        density = density * (float(np.sum(np.abs(tail) ** 2) * dx) / mass)
    return TransmittedSpectrum(k=k, energy=k ** 2, density=density)


def sideband_peaks(spectrum: TransmittedSpectrum, rel_height: float = 1e-3) -> Tuple[float, ...]:
    """Energies of the local maxima above rel_height * max; reported, not asserted."""
    if spectrum.density.size == 0:
        return ()
    peaks, _ = find_peaks(spectrum.density, height=rel_height * float(spectrum.density.max()))
    return tuple(float(spectrum.energy[i]) for i in peaks)
