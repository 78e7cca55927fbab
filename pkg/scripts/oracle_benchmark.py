from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

from engine.barrier_model import BarrierConfig, transmission_static
from engine.tdse_oracle import GridSpec, packet_for_barrier, propagate, transmitted_fraction

DEFAULT_RATIOS = (0.3, 0.5, 0.7)


def relative_error(reference: float, measured: float) -> float:
    if reference == 0.0:
        return 0.0 if measured == 0.0 else float("inf")
    return abs(measured - reference) / abs(reference)


def run_case(cfg: BarrierConfig, energy_width: float = 0.02) -> dict:
    packet = packet_for_barrier(cfg, energy_width=energy_width)
    grid = GridSpec.for_config(cfg, packet)
    started = time.perf_counter()
    state = propagate(cfg, grid, packet)
    elapsed = time.perf_counter() - started
    fraction = transmitted_fraction(state, cfg)
    reference = transmission_static(cfg)
    return {
        "energy_ratio": cfg.e_incident / cfg.v0,
        "static_transmission": reference,
        "transmitted_fraction": fraction,
        "relative_error": relative_error(reference, fraction),
        "norm_drift": state.norm_drift,
        "points": grid.points,
        "steps": grid.steps,
        "seconds": elapsed,
    }


def run_benchmark(
    v0: float = 2.0,
    b: float = 1.0,
    ratios=DEFAULT_RATIOS,
    energy_width: float = 0.02,
    report_md: Path | None = None,
) -> dict:
    results = [run_case(BarrierConfig(v0=v0, b=b, e_incident=r * v0).validate(), energy_width) for r in ratios]
    summary = {
        "cases": len(results),
        "max_relative_error": max(r["relative_error"] for r in results),
        "max_norm_drift": max(r["norm_drift"] for r in results),
        "results": results,
    }

    if report_md is not None:
        lines = [
            "# Wave-packet Oracle Benchmark",
            "",
            f"- Barrier: V0={v0}, b={b}, energy width={energy_width}",
            f"- Cases: {summary['cases']}",
            f"- Max relative error: {summary['max_relative_error']:.4f}",
            f"- Max norm drift: {summary['max_norm_drift']:.2e}",
            "",
            "## Per-case",
            "",
        ]
        for item in results:
            lines.append(
                f"- E/V0={item['energy_ratio']:.2f} | T static: {item['static_transmission']:.5f} | "
                f"T packet: {item['transmitted_fraction']:.5f} | rel. error: {item['relative_error']:.4f} | "
                f"{item['points']} points, {item['steps']} steps, {item['seconds']:.1f} s"
            )
        report_md.write_text("\n".join(lines) + "\n", encoding="utf-8")

    return summary


def main() -> int:
    parser = argparse.ArgumentParser(description="Compare propagated wave packets with the static transmission formula")
    parser.add_argument("--v0", type=float, default=2.0)
    parser.add_argument("--b", type=float, default=1.0)
    parser.add_argument("--ratios", type=float, nargs="+", default=list(DEFAULT_RATIOS), help="Mean energy as a fraction of V0")
    parser.add_argument("--energy-width", type=float, default=0.02)
    parser.add_argument("--report", default=None, help="Optional markdown report output path")
    args = parser.parse_args()

    report_md = Path(args.report) if args.report else None
    summary = run_benchmark(args.v0, args.b, tuple(args.ratios), args.energy_width, report_md=report_md)
    print(json.dumps(summary, ensure_ascii=False, indent=2))
    return 0 if summary["max_relative_error"] <= 0.05 else 1


if __name__ == "__main__":
    raise SystemExit(main())
