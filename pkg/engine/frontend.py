"""
Command runner behind the dynbarrier CLI.

Each command builds a Report (column list, row records, JSON summary and an
optional SVG view), which is then written as CSV, JSON or SVG. With verify
set, the emitted table is read back (CSV through pandas) and re-checked
against the invariants of the module that produced it.

Table layouts:
- static      v0, b, e_incident, kappa_b, transmission, matched_transmission,
              reflection, flux_residual, opaque
- spectrum    one row per channel (n, sign, n_alpha, energy, classification,
              snapshot_height); SVG is the energy circle
- transmit    one row per channel including closed ones (t_n empty)
- traverse    exact, low-frequency and high-frequency rows for every
              0 <= m < n <= N; exact rows hold the two roots of
              [0, 2 pi / omega) in ascending order in t_plus / t_minus
- dos         n in [-N, N] with density or "unbounded"; SVG is the hyperbolas
- tg-compare  finite channels and truncated sidebands on one energy axis
- oracle      momentum spectrum of the transmitted packet (JSON: run summary)

Sweeps (static, transmit, tg-compare, oracle) emit one summary row per sweep
value, evaluated through utils.sweep_runner in sweep order.
"""
import sys
import math
import logging
logger = logging.getLogger(__name__)
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from engine.barrier_model import BarrierConfig, match_static, transmission_opaque, transmission_static
from engine.channel_spectrum import UNBOUNDED, build_spectrum, channel_count, density_of_states
from engine.dynamic_transmission import transmission_total
from engine.errors import (
    ConfigValidationError,
    DynamicBarrierError,
    VerificationError,
)
from engine.exporters import read_csv_text, records_to_frame, write_csv, write_json, write_svg
from engine.run_config import RunConfig
from engine.svg_writer import SvgPlot
from engine.tdse_oracle import (
    GridSpec,
    packet_for_barrier,
    propagate,
    sideband_peaks,
    transmitted_fraction,
    transmitted_spectrum,
)
from engine.tg_baseline import tg_sidebands
from engine.traversal_time import (
    quadratic_residual,
    traversal_exact,
    traversal_high,
    traversal_low,
)
from utils.sweep_runner import SweepPointError, execute_sweep

MAX_TRAVERSE_N = 200
RANDOM_CHECKS = 64
NORM_DRIFT_LIMIT = 1e-10


@dataclass
class Report:
    command: str
    columns: Tuple[str, ...]
    records: List[Dict]
    summary: Dict = field(default_factory=dict)
    svg: Optional[str] = None
    json_rows: bool = True

    def frame(self) -> pd.DataFrame:
        return records_to_frame(self.records, self.columns)


def _sweep(func: Callable, values: List):
    try:
        return execute_sweep(func, values)
    except SweepPointError as e:
        # surface the module error so exit codes stay meaningful
        raise e.cause from e


def _sweep_plot(config: RunConfig, title: str, y_label: str, series: List[Tuple[str, str, bool]], records: List[Dict]) -> str:
    param = config.sweep.parameter
    plot = SvgPlot(title=title, x_label=param, y_label=y_label)
    xs = [row[param] for row in records]
    for column, label, dashed in series:
        plot.add_polyline(xs, [row[column] for row in records], label=label, dashed=dashed)
    return plot.render()


# ---------------------------------------------------------------- static

STATIC_COLUMNS = (
    "v0", "b", "e_incident", "kappa_b", "transmission", "matched_transmission",
    "reflection", "flux_residual", "opaque",
)


def _static_row(cfg: BarrierConfig) -> Dict:
    solution = match_static(cfg)
    return {
        "v0": cfg.v0,
        "b": cfg.b,
        "e_incident": cfg.e_incident,
        "kappa_b": solution.kappa0 * cfg.b,
        "transmission": transmission_static(cfg),
        "matched_transmission": solution.transmission,
        "reflection": solution.reflection,
        "flux_residual": solution.flux_residual,
        "opaque": transmission_opaque(cfg),
    }


def _build_static(config: RunConfig) -> Report:
    if config.sweep is not None and config.sweep.parameter not in ("v0", "b", "e_incident"):
        raise ConfigValidationError(
            f"the static barrier does not depend on {config.sweep.parameter}", field="sweep.parameter"
        )
    records = _sweep(_static_row, config.barriers())
    svg = None
    if config.sweep is not None:
        svg = _sweep_plot(
            config, "Static transmission", "transmission",
            [("transmission", "exact", False), ("opaque", "opaque limit", True)], records,
        )
    summary = {"rows": len(records)}
    if config.sweep is None:
        summary.update({k: records[0][k] for k in ("transmission", "reflection", "opaque")})
    return Report("static", STATIC_COLUMNS, records, summary, svg)


def _verify_static(config: RunConfig, frame: pd.DataFrame, report: Report) -> List[str]:
    problems = []
    t = frame["transmission"].to_numpy(dtype=float)
    for column in ("transmission", "matched_transmission", "reflection"):
        values = frame[column].to_numpy(dtype=float)
        if np.any((values < 0) | (values > 1)):
            problems.append(f"{column} outside [0, 1]")
    if np.any(np.abs(t + frame["reflection"].to_numpy(dtype=float) - 1.0) > 1e-12):
        problems.append("transmission + reflection differs from 1 by more than 1e-12")
    if np.any(np.abs(frame["matched_transmission"].to_numpy(dtype=float) - t) > 1e-12):
        problems.append("matched and closed-form transmission differ by more than 1e-12")
    if config.sweep is not None and config.sweep.parameter == "b":
        db = np.diff(frame["b"].to_numpy(dtype=float))
        dt = np.diff(t)
        positive = (t[:-1] > 0) & (t[1:] > 0)
        if np.any(positive & (dt * db >= 0)) or np.any(dt * db > 0):
            problems.append("transmission is not strictly decreasing in b")

    rng = np.random.default_rng(config.seed)
    base = config.barrier
    for _ in range(RANDOM_CHECKS):
        v0 = base.v0 * rng.uniform(0.5, 2.0)
        cfg = base.replace(v0=v0, e_incident=v0 * rng.uniform(0.01, 0.99), b=base.b * rng.uniform(0.1, 3.0))
        solution = match_static(cfg)
        if solution.flux_residual > 1e-12 or abs(solution.transmission - transmission_static(cfg)) > 1e-12:
            problems.append(f"randomized flux check failed at {cfg}")
            break
    return problems


# ---------------------------------------------------------------- spectrum

SPECTRUM_COLUMNS = ("n", "sign", "n_alpha", "energy", "classification", "snapshot_height")


def _build_spectrum(config: RunConfig) -> Report:
    spectrum = build_spectrum(config.barrier)
    records = spectrum.to_records()
    summary = {
        "N": spectrum.n_max,
        "alpha": spectrum.alpha,
        "tau": spectrum.tau,
        "e_elastic": spectrum.e_elastic,
        "radius": spectrum.radius,
        "channel_count": len(records),
        "notices": list(spectrum.notices),
    }

    plot = SvgPlot(title="Energy circle", x_label="n alpha", y_label="E")
    if spectrum.radius > 0:
        phi = np.linspace(0.0, 2.0 * math.pi, 181)
        plot.add_polyline(spectrum.radius * np.cos(phi), spectrum.e_elastic + spectrum.radius * np.sin(phi), label="circle")
    xs = [row["n_alpha"] for row in records] + [-row["n_alpha"] for row in records if row["n"] > 0]
    ys = [row["energy"] for row in records] + [row["energy"] for row in records if row["n"] > 0]
    plot.add_scatter(xs, ys, label="channels")
    return Report("spectrum", SPECTRUM_COLUMNS, records, summary, plot.render())


def _circle_ok(energy: np.ndarray, n_alpha: np.ndarray, e_elastic: float, radius: float) -> bool:
    residual = (energy - e_elastic) ** 2 + n_alpha ** 2 - radius ** 2
    return bool(np.all(np.abs(residual) <= 1e-12 * max(1.0, radius ** 2)))


def _verify_spectrum(config: RunConfig, frame: pd.DataFrame, report: Report) -> List[str]:
    problems = []
    cfg = config.barrier
    n_max = channel_count(cfg.v1, cfg.omega)
    radius = min(n_max * cfg.omega, cfg.v1) if n_max else 0.0
    energy = frame["energy"].to_numpy(dtype=float)
    n_alpha = frame["n_alpha"].to_numpy(dtype=float)
    if len(frame) != 2 * n_max + 1:
        problems.append(f"expected {2 * n_max + 1} channels, found {len(frame)}")
    if not _circle_ok(energy, n_alpha, cfg.e_incident, radius):
        problems.append("circle identity violated beyond 1e-12")
    if np.any(energy < cfg.e_incident - cfg.v1 - 1e-12) or np.any(energy > cfg.e_incident + cfg.v1 + 1e-12):
        problems.append("channel energy outside [E_N - V1, E_N + V1]")
    offsets = np.sort(energy - cfg.e_incident)
    if np.any(np.abs(offsets + offsets[::-1]) > 1e-12 * max(1.0, radius)):
        problems.append("channel energies are not symmetric about E_N")
    if np.any(np.diff(energy) < 0):
        problems.append("channels are not sorted by energy")

    rng = np.random.default_rng(config.seed)
    for _ in range(RANDOM_CHECKS):
        # integral V1/alpha and E_N > V1: build_spectrum raises no notices
        omega = cfg.omega * rng.uniform(0.5, 2.0)
        v1 = omega * int(rng.integers(1, 40))
        drawn = cfg.replace(omega=omega, v1=v1, e_incident=v1 * rng.uniform(1.1, 3.0))
        spectrum = build_spectrum(drawn)
        e = np.array([ch.energy for ch in spectrum.channels])
        na = np.array([ch.n * spectrum.alpha for ch in spectrum.channels])
        if not _circle_ok(e, na, spectrum.e_elastic, spectrum.radius):
            problems.append(f"randomized circle check failed at {drawn}")
            break
    return problems


# ---------------------------------------------------------------- transmit

TRANSMIT_COLUMNS = ("n", "sign", "energy", "kn", "kappa_n", "t_n", "classification", "snapshot_height")
TRANSMIT_SWEEP_SUFFIX = ("total", "normalized", "open_count", "closed_count", "elastic_t_n")


def _build_transmit(config: RunConfig) -> Report:
    if config.sweep is not None:
        param = config.sweep.parameter

        def point(cfg: BarrierConfig) -> Dict:
            result = transmission_total(cfg)
            elastic = next(row for row in result.per_channel if row.n == result.spectrum.n_max)
            return {
                param: getattr(cfg, param),
                "total": result.total,
                "normalized": result.normalized,
                "open_count": result.open_count,
                "closed_count": result.closed_count,
                "elastic_t_n": elastic.t_n,
            }

        records = _sweep(point, config.barriers())
        svg = _sweep_plot(
            config, "Total transmission", "transmission",
            [("total", "sum over channels", False), ("normalized", "per open channel", True)], records,
        )
        return Report("transmit", (param,) + TRANSMIT_SWEEP_SUFFIX, records, {"rows": len(records)}, svg)

    result = transmission_total(config.barrier)
    records = result.to_records()
    for ch in result.closed_channels:
        records.append({
            "n": ch.n, "sign": ch.sign_symbol, "energy": ch.energy, "kn": None, "kappa_n": None,
            "t_n": None, "classification": ch.classification.value, "snapshot_height": ch.snapshot_height,
        })
    records.sort(key=lambda row: row["energy"])
    summary = {
        "total": result.total,
        "normalized": result.normalized,
        "open_count": result.open_count,
        "closed_count": result.closed_count,
        "N": result.spectrum.n_max,
        "notices": list(result.notices),
    }
    return Report("transmit", TRANSMIT_COLUMNS, records, summary)


def _verify_transmit(config: RunConfig, frame: pd.DataFrame, report: Report) -> List[str]:
    problems = []
    if config.sweep is not None:
        total = frame["total"].to_numpy(dtype=float)
        normalized = frame["normalized"].to_numpy(dtype=float)
        if np.any(total < 0) or np.any((normalized < 0) | (normalized > 1)):
            problems.append("totals out of range")
        if np.any(frame["open_count"].to_numpy() < 1):
            problems.append("sweep point without an open channel")
        return problems

    cfg = config.barrier
    t_n = pd.to_numeric(frame["t_n"], errors="coerce").to_numpy(dtype=float)
    open_mask = ~np.isnan(t_n)
    if np.any((t_n[open_mask] < 0) | (t_n[open_mask] > 1)):
        problems.append("channel transmission outside [0, 1]")
    energy = frame["energy"].to_numpy(dtype=float)
    if np.any(energy[~open_mask] > 0):
        problems.append("a channel with positive energy has no transmission")
    kn = pd.to_numeric(frame["kn"], errors="coerce").to_numpy(dtype=float)
    if np.any(np.abs(kn[open_mask] ** 2 - energy[open_mask]) > 1e-12 * np.maximum(1.0, energy[open_mask])):
        problems.append("kn^2 differs from the channel energy")
    expected = transmission_total(cfg)
    if abs(math.fsum(t_n[open_mask]) - expected.total) > 1e-12 * max(1, int(open_mask.sum())):
        problems.append("channel transmissions do not sum to the total")
    n_max = expected.spectrum.n_max
    elastic = frame[frame["n"] == n_max]
    if len(elastic) != 1 or abs(float(elastic["t_n"].iloc[0]) - transmission_static(cfg)) > 1e-12:
        problems.append("elastic channel differs from the static transmission")
    return problems


# ---------------------------------------------------------------- traverse

TRAVERSE_COLUMNS = (
    "n", "m", "N", "omega", "regime", "t_plus", "t_minus",
    "tan_theta_plus", "tan_theta_minus", "ratio", "branch",
)


def _build_traverse(config: RunConfig) -> Report:
    cfg = config.barrier
    spectrum = build_spectrum(cfg)
    n_max = spectrum.n_max
    if n_max == 0:
        raise ConfigValidationError("traversal times need V1 >= alpha (N >= 1)", field="barrier.v1")
    if n_max > MAX_TRAVERSE_N:
        raise ConfigValidationError(f"N={n_max} exceeds {MAX_TRAVERSE_N} for a full traversal table", field="barrier.v1")

    omega = cfg.omega
    records: List[Dict] = []
    counts = {"exact": 0, "low-frequency": 0, "high-frequency": 0}
    for n in range(1, n_max + 1):
        for m in range(n):
            roots = traversal_exact(n, m, n_max, omega)
            records.append({
                "n": n, "m": m, "N": n_max, "omega": omega, "regime": "exact",
                "t_plus": roots[0], "t_minus": roots[1] if len(roots) > 1 else None,
                "tan_theta_plus": None, "tan_theta_minus": None, "ratio": None, "branch": None,
            })
            counts["exact"] += 1
            if n < n_max:
                low = traversal_low(n, m, n_max, spectrum.tau)
                records.append({**low.to_record(omega), "branch": None})
                counts["low-frequency"] += 1
            if 0 < m and n < n_max:
                high = traversal_high(n, m, n_max, omega, branch=config.branch)
                records.append({**high.to_record(omega), "branch": high.branch})
                counts["high-frequency"] += 1
    summary = {"N": n_max, "tau": spectrum.tau, "omega": omega, "branch": config.branch, "rows_by_regime": counts}
    return Report("traverse", TRAVERSE_COLUMNS, records, summary)


def _verify_traverse(config: RunConfig, frame: pd.DataFrame, report: Report) -> List[str]:
    problems = []
    omega = config.barrier.omega
    period = 2.0 * math.pi / omega
    t_plus = pd.to_numeric(frame["t_plus"], errors="coerce").to_numpy(dtype=float)
    t_minus = pd.to_numeric(frame["t_minus"], errors="coerce").to_numpy(dtype=float)
    regime = frame["regime"].to_numpy()

    present = np.concatenate([t_plus[~np.isnan(t_plus)], t_minus[~np.isnan(t_minus)]])
    if np.any(present < 0):
        problems.append("negative traversal time")

    low = regime == "low-frequency"
    if np.any(t_plus[low] != t_minus[low]):
        problems.append("low-frequency rows with t_plus != t_minus")

    exact = regime == "exact"
    if np.any(t_plus[exact] >= period) or np.any(t_minus[exact][~np.isnan(t_minus[exact])] >= period):
        problems.append("exact root outside [0, 2 pi / omega)")
    pairs = exact & ~np.isnan(t_minus)
    if np.any(t_plus[pairs] > t_minus[pairs]):
        problems.append("exact roots not in ascending order")

    high = frame[regime == "high-frequency"]
    if len(high) and np.any(high["ratio"].to_numpy(dtype=float) >= 1.0):
        problems.append("high-frequency ratio >= 1")
    for row in high.itertuples(index=False):
        scale = max(1.0, float(row.N) ** 2)
        tan_plus = float(row.tan_theta_plus)
        if abs(quadratic_residual(tan_plus, int(row.n), int(row.m), int(row.N))) > 1e-9 * scale * max(1.0, tan_plus ** 2):
            problems.append(f"quadratic residual too large at n={row.n} m={row.m}")
            break
    return problems


# ---------------------------------------------------------------- dos

DOS_COLUMNS = ("n", "n_alpha", "density")


def _build_dos(config: RunConfig) -> Report:
    cfg = config.barrier
    n_max = channel_count(cfg.v1, cfg.omega)
    if n_max == 0:
        raise ConfigValidationError("density of states needs V1 >= alpha (N >= 1)", field="barrier.v1")
    alpha, omega = cfg.omega, cfg.omega
    records = [
        {"n": n, "n_alpha": n * alpha, "density": density_of_states(n, alpha, omega)}
        for n in range(-n_max, n_max + 1)
    ]
    summary = {"N": n_max, "alpha": alpha, "band_edge_density": 1.0 / abs(n_max * alpha * omega)}

    plot = SvgPlot(title="Density of states", x_label="n alpha", y_label="rho")
    xs = np.linspace(0.5 * alpha, n_max * alpha, 100)
    plot.add_polyline(xs, 1.0 / (xs * omega), label="rho > 0 branch")
    plot.add_polyline(-xs, 1.0 / (xs * omega), label="rho < 0 branch")
    finite = [row for row in records if row["n"] != 0]
    plot.add_scatter([row["n_alpha"] for row in finite], [row["density"] for row in finite], label="levels")
    return Report("dos", DOS_COLUMNS, records, summary, plot.render())


def _density_values(column: pd.Series) -> np.ndarray:
    """Float densities with NaN at the unbounded band centre (CSV and in-memory forms)."""
    return np.array([math.nan if str(v) == str(UNBOUNDED) else float(v) for v in column], dtype=float)


def _verify_dos(config: RunConfig, frame: pd.DataFrame, report: Report) -> List[str]:
    problems = []
    omega = config.barrier.omega
    n = frame["n"].to_numpy(dtype=int)
    centre = frame.loc[n == 0, "density"]
    if len(centre) != 1 or str(centre.iloc[0]) != str(UNBOUNDED):
        problems.append("band centre is not marked unbounded")
    density = _density_values(frame["density"])
    n_alpha = frame["n_alpha"].to_numpy(dtype=float)
    nonzero = n != 0
    if np.any(np.abs(density[nonzero] * np.abs(n_alpha[nonzero] * omega) - 1.0) > 1e-14):
        problems.append("density * |n alpha omega| differs from 1")
    by_n = dict(zip(n[nonzero].tolist(), density[nonzero].tolist()))
    if any(by_n[k] != by_n.get(-k) for k in by_n):
        problems.append("density is not even in n")
    return problems


# ---------------------------------------------------------------- tg-compare

TG_COLUMNS = ("source", "n", "sign", "energy", "weight", "transmission", "closed")
TG_SWEEP_SUFFIX = ("finite_levels", "finite_total", "tg_rows", "tg_total_weight", "tg_total_transmission")


def _tg_point(config: RunConfig, cfg: BarrierConfig) -> Tuple[List[Dict], Dict]:
    result = transmission_total(cfg)
    table = tg_sidebands(cfg, cutoff_tol=config.cutoff_tol)
    by_channel = {(row.n, row.sign): row.t_n for row in result.per_channel}

    rows: List[Dict] = []
    for ch in result.spectrum.channels:
        t = by_channel.get((ch.n, ch.sign))
        rows.append({
            "source": "finite", "n": ch.n, "sign": ch.sign_symbol, "energy": ch.energy,
            "weight": None, "transmission": t, "closed": t is None,
        })
    for row in table.rows:
        rows.append({
            "source": "tg", "n": row.n, "sign": None, "energy": row.energy,
            "weight": row.weight, "transmission": row.transmission, "closed": row.closed,
        })
    rows.sort(key=lambda r: (r["energy"], r["source"], r["n"]))
    summary = {
        "finite_levels": len(result.spectrum.channels),
        "finite_total": result.total,
        "tg_rows": len(table.rows),
        "tg_cutoff": table.n_cutoff,
        "tg_total_weight": table.total_weight,
        "tg_total_transmission": table.total_transmission,
        "tg_exceeds_band": table.exceeds_band,
        "band": [cfg.e_incident - cfg.v1, cfg.e_incident + cfg.v1],
        "cutoff_tol": config.cutoff_tol,
    }
    return rows, summary


def _build_tg_compare(config: RunConfig) -> Report:
    if config.sweep is not None:
        param = config.sweep.parameter

        def point(cfg: BarrierConfig) -> Dict:
            _, summary = _tg_point(config, cfg)
            return {param: getattr(cfg, param), **{k: summary[k] for k in TG_SWEEP_SUFFIX}}

        records = _sweep(point, config.barriers())
        return Report("tg-compare", (param,) + TG_SWEEP_SUFFIX, records, {"rows": len(records), "cutoff_tol": config.cutoff_tol})

    rows, summary = _tg_point(config, config.barrier)
    return Report("tg-compare", TG_COLUMNS, rows, summary)


def _verify_tg_compare(config: RunConfig, frame: pd.DataFrame, report: Report) -> List[str]:
    problems = []
    tol = config.cutoff_tol
    if config.sweep is not None:
        weight = frame["tg_total_weight"].to_numpy(dtype=float)
        if np.any(weight < 1.0 - tol) or np.any(weight > 1.0 + 1e-12):
            problems.append("sideband weights do not sum to 1 within the cutoff")
        return problems

    cfg = config.barrier
    n_max = channel_count(cfg.v1, cfg.omega)
    finite = frame[frame["source"] == "finite"]
    tg = frame[frame["source"] == "tg"].sort_values("n")
    if len(finite) != 2 * n_max + 1:
        problems.append(f"expected {2 * n_max + 1} finite levels, found {len(finite)}")
    fe = finite["energy"].to_numpy(dtype=float)
    if np.any(fe < cfg.e_incident - cfg.v1 - 1e-12) or np.any(fe > cfg.e_incident + cfg.v1 + 1e-12):
        problems.append("finite level outside the band")
    weights = tg["weight"].to_numpy(dtype=float)
    if not (1.0 - tol <= math.fsum(weights) <= 1.0 + 1e-12):
        problems.append("sideband weights do not sum to 1 within the cutoff")
    if np.any(weights != weights[::-1]):
        problems.append("sideband weights are not symmetric in n")
    spacing = np.diff(tg["energy"].to_numpy(dtype=float))
    if np.any(np.abs(spacing - cfg.omega) > 1e-12 * max(1.0, cfg.e_incident + cfg.v1)):
        problems.append("sidebands are not spaced by alpha")
    return problems


# ---------------------------------------------------------------- oracle

ORACLE_COLUMNS = ("k", "energy", "density")
ORACLE_SWEEP_SUFFIX = ("transmitted_fraction", "static_transmission", "relative_gap", "norm_drift")


def _oracle_point(config: RunConfig, cfg: BarrierConfig):
    options = config.oracle
    packet = packet_for_barrier(cfg, energy_width=options.energy_width)
    grid = GridSpec.for_config(cfg, packet, dx=options.dx, dt=options.dt)
    state = propagate(cfg, grid, packet)
    fraction = transmitted_fraction(state, cfg)
    static = transmission_static(cfg)
    summary = {
        "transmitted_fraction": fraction,
        "static_transmission": static,
        "relative_gap": abs(fraction - static) / static if static > 0 else None,
        "norm_drift": state.norm_drift,
        "barrier_mass": state.diagnostics.get("barrier_mass"),
        "packet": {**asdict(packet), "energy_width": options.energy_width},
        "grid": {"points": grid.points, "dx": grid.dx, "dt": grid.dt, "steps": grid.steps,
                 "x_min": grid.x_min, "x_max": grid.x_max},
    }
    return state, summary


def _build_oracle(config: RunConfig) -> Report:
    if config.sweep is not None:
        param = config.sweep.parameter

        def point(cfg: BarrierConfig) -> Dict:
            _, summary = _oracle_point(config, cfg)
            return {param: getattr(cfg, param), **{k: summary[k] for k in ORACLE_SWEEP_SUFFIX}}

        records = _sweep(point, config.barriers())
        svg = _sweep_plot(
            config, "Wave-packet oracle", "transmission",
            [("transmitted_fraction", "propagated", False), ("static_transmission", "closed form", True)], records,
        )
        return Report("oracle", (param,) + ORACLE_SWEEP_SUFFIX, records, {"rows": len(records)}, svg)

    cfg = config.barrier
    state, summary = _oracle_point(config, cfg)
    spectrum = transmitted_spectrum(state, cfg)
    summary["peaks"] = list(sideband_peaks(spectrum))
    return Report("oracle", ORACLE_COLUMNS, spectrum.to_records(), summary, json_rows=False)


def _verify_oracle(config: RunConfig, frame: pd.DataFrame, report: Report) -> List[str]:
    problems = []
    if config.sweep is not None:
        fraction = frame["transmitted_fraction"].to_numpy(dtype=float)
        if np.any((fraction < 0) | (fraction > 1)):
            problems.append("transmitted fraction outside [0, 1]")
        if np.any(frame["norm_drift"].to_numpy(dtype=float) > NORM_DRIFT_LIMIT):
            problems.append(f"norm drift above {NORM_DRIFT_LIMIT}")
        return problems

    if report.summary["norm_drift"] > NORM_DRIFT_LIMIT:
        problems.append(f"norm drift {report.summary['norm_drift']:.3e} above {NORM_DRIFT_LIMIT}")
    if not 0.0 <= report.summary["transmitted_fraction"] <= 1.0:
        problems.append("transmitted fraction outside [0, 1]")
    if np.any(frame["density"].to_numpy(dtype=float) < 0):
        problems.append("negative spectral density")
    k = frame["k"].to_numpy(dtype=float)
    energy = frame["energy"].to_numpy(dtype=float)
    if np.any(np.abs(k ** 2 - energy) > 1e-12 * np.maximum(1.0, energy)):
        problems.append("energy column differs from k^2")
    return problems


_BUILDERS: Dict[str, Callable[[RunConfig], Report]] = {
    "static": _build_static,
    "spectrum": _build_spectrum,
    "transmit": _build_transmit,
    "traverse": _build_traverse,
    "dos": _build_dos,
    "tg-compare": _build_tg_compare,
    "oracle": _build_oracle,
}

_VERIFIERS: Dict[str, Callable[[RunConfig, pd.DataFrame, Report], List[str]]] = {
    "static": _verify_static,
    "spectrum": _verify_spectrum,
    "transmit": _verify_transmit,
    "traverse": _verify_traverse,
    "dos": _verify_dos,
    "tg-compare": _verify_tg_compare,
    "oracle": _verify_oracle,
}


def build_report(config: RunConfig) -> Report:
    logger.info(f"Building {config.command} report")
    return _BUILDERS[config.command](config)


def render(config: RunConfig, report: Report) -> str:
    """Write the report in config.output format to config.output_path (if set) and return the text."""
    if config.output == "csv":
        return write_csv(report.frame(), config.output_path)
    if config.output == "svg":
        if report.svg is None:
            hint = " without a sweep" if config.sweep is None else ""
            raise ConfigValidationError(f"command {config.command!r} has no SVG view{hint}", field="output")
        return write_svg(report.svg, config.output_path)
    payload = {
        "command": config.command,
        "barrier": config.barrier.to_dict(),
        "sweep": asdict(config.sweep) if config.sweep is not None else None,
        "seed": config.seed,
        "summary": report.summary,
        "columns": list(report.columns),
    }
    if report.json_rows:
        payload["rows"] = report.records
    return write_json(payload, config.output_path)


def verify_report(config: RunConfig, report: Report, text: str) -> None:
    frame = read_csv_text(text) if config.output == "csv" else report.frame()
    problems = _VERIFIERS[config.command](config, frame, report)
    if problems:
        raise VerificationError(f"{config.command}: " + "; ".join(problems))
    logger.info(f"Verified {len(frame)} {config.command} rows")


def run(config: RunConfig, verify: bool = False) -> int:
    """Build, emit and optionally verify one command. Returns the process exit code."""
    try:
        report = build_report(config)
        text = render(config, report)
        if config.output_path is None:
            sys.stdout.write(text)
        if verify:
            verify_report(config, report, text)
            print(f"verify: {config.command} ok ({len(report.records)} rows)", file=sys.stderr)
        return 0
    except ConfigValidationError as e:
        logger.error(f"Invalid configuration: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1
    except DynamicBarrierError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        logger.error(f"Could not write output: {e}")
        print(f"error: cannot write {config.output_path}: {e.strerror or e}", file=sys.stderr)
        return 2
