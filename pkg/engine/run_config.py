"""
Run configuration for the dynbarrier CLI.

A run config is a JSON file:

    {
      "barrier": {"v0": 10.0, "b": 1.0, "e_incident": 5.0, "v1": 1.0, "omega": 0.25},
      "sweep": {"parameter": "b", "start": 0.5, "stop": 3.0, "count": 11},
      "output": "csv",
      "output_path": "out/static_b.csv",
      "seed": 7,
      "traverse": {"branch": 1},
      "tg": {"cutoff_tol": 1e-6},
      "oracle": {"energy_width": 0.02, "dx": null, "dt": null}
    }

Only "barrier" is required. Command-line flags override output, output_path
and seed.
"""
import json
import math
import logging
logger = logging.getLogger(__name__)
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from engine.barrier_model import BarrierConfig
from engine.errors import ConfigValidationError
from engine.tg_baseline import DEFAULT_CUTOFF_TOL

COMMANDS: Tuple[str, ...] = ("static", "spectrum", "transmit", "traverse", "dos", "tg-compare", "oracle")
FORMATS: Tuple[str, ...] = ("csv", "json", "svg")
SWEEPABLE_COMMANDS = frozenset({"static", "transmit", "tg-compare", "oracle"})

_TOP_LEVEL_KEYS = {"barrier", "sweep", "output", "output_path", "seed", "traverse", "tg", "oracle"}


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    count: int

    def values(self) -> List[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]

    @classmethod
    def from_dict(cls, data: Dict) -> "SweepSpec":
        if not isinstance(data, dict):
            raise ConfigValidationError("expected an object", field="sweep")
        unknown = sorted(set(data) - {"parameter", "start", "stop", "count"})
        if unknown:
            raise ConfigValidationError(f"unknown field(s) {unknown}", field="sweep")
        parameter = data.get("parameter")
        names = [f.name for f in fields(BarrierConfig)]
        if parameter not in names:
            raise ConfigValidationError(f"must name a barrier field {names}, got {parameter!r}", field="sweep.parameter")
        for key in ("start", "stop"):
            raw = data.get(key)
            if isinstance(raw, bool) or not isinstance(raw, (int, float)) or not math.isfinite(raw):
                raise ConfigValidationError(f"expected a finite number, got {raw!r}", field=f"sweep.{key}")
        count = data.get("count")
        if isinstance(count, bool) or not isinstance(count, int):
            raise ConfigValidationError(f"expected an integer, got {count!r}", field="sweep.count")
        if count < 2:
            raise ConfigValidationError(f"must be >= 2, got {count}", field="sweep.count")
        return cls(parameter=parameter, start=float(data["start"]), stop=float(data["stop"]), count=count)


@dataclass(frozen=True)
class OracleOptions:
    energy_width: float = 0.02
    dx: Optional[float] = None
    dt: Optional[float] = None


@dataclass(frozen=True)
class RunConfig:
    command: str
    barrier: BarrierConfig
    sweep: Optional[SweepSpec] = None
    output: str = "csv"
    output_path: Optional[str] = None
    seed: int = 0
    branch: int = 1
    cutoff_tol: float = DEFAULT_CUTOFF_TOL
    oracle: OracleOptions = field(default_factory=OracleOptions)

    def barriers(self) -> List[BarrierConfig]:
        """Configs in sweep order (a single entry without a sweep)."""
        if self.sweep is None:
            return [self.barrier]
        return [self.barrier.replace(**{self.sweep.parameter: v}) for v in self.sweep.values()]

    def with_overrides(
        self,
        output: Optional[str] = None,
        output_path: Optional[str] = None,
        seed: Optional[int] = None,
    ) -> "RunConfig":
        changes = {}
        if output is not None:
            changes["output"] = output
        if output_path is not None:
            changes["output_path"] = output_path
        if seed is not None:
            changes["seed"] = seed
        return replace(self, **changes).validate() if changes else self

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigValidationError(f"unknown command {self.command!r}; expected one of {list(COMMANDS)}", field="command")
        if self.output not in FORMATS:
            raise ConfigValidationError(f"expected one of {list(FORMATS)}, got {self.output!r}", field="output")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigValidationError(f"must be an unsigned 64-bit integer, got {self.seed}", field="seed")
        if self.sweep is not None and self.command not in SWEEPABLE_COMMANDS:
            raise ConfigValidationError(
                f"command {self.command!r} does not take a sweep; sweepable: {sorted(SWEEPABLE_COMMANDS)}",
                field="sweep",
            )
        if self.branch < 1:
            raise ConfigValidationError(f"must be >= 1, got {self.branch}", field="traverse.branch")
        if not (0.0 < self.cutoff_tol <= 1e-3):
            raise ConfigValidationError(f"must lie in (0, 1e-3], got {self.cutoff_tol}", field="tg.cutoff_tol")
        if self.oracle.energy_width <= 0:
            raise ConfigValidationError("must be positive", field="oracle.energy_width")
        for name in ("dx", "dt"):
            value = getattr(self.oracle, name)
            if value is not None and not value > 0:
                raise ConfigValidationError("must be positive when given", field=f"oracle.{name}")

        try:
            self.barrier.validate()
        except ConfigValidationError as e:
            raise ConfigValidationError(e.message, field=f"barrier.{e.field}") from None
        if self.sweep is not None:
            for value, cfg in zip(self.sweep.values(), self.barriers()):
                try:
                    cfg.validate()
                except ConfigValidationError as e:
                    raise ConfigValidationError(
                        f"sweep value {self.sweep.parameter}={value:g} is invalid: {e.message}",
                        field="sweep",
                    ) from None
        return self


def _section(data: Dict, name: str, keys: Tuple[str, ...]) -> Dict:
    section = data.get(name, {})
    if section is None:
        return {}
    if not isinstance(section, dict):
        raise ConfigValidationError("expected an object", field=name)
    unknown = sorted(set(section) - set(keys))
    if unknown:
        raise ConfigValidationError(f"unknown field(s) {unknown}", field=name)
    return section


def _number(value, field_name: str, allow_none: bool = False) -> Optional[float]:
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(f"expected a number, got {value!r}", field=field_name)
    return float(value)


def _integer(value, field_name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigValidationError(f"expected an integer, got {value!r}", field=field_name)
    return value


def run_config_from_dict(command: str, data: Dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigValidationError("top level must be an object")
    unknown = sorted(set(data) - _TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigValidationError(f"unknown top-level field(s) {unknown}")
    if "barrier" not in data:
        raise ConfigValidationError("missing required section", field="barrier")

    barrier = BarrierConfig.from_dict(data["barrier"])
    sweep = SweepSpec.from_dict(data["sweep"]) if data.get("sweep") is not None else None
    traverse = _section(data, "traverse", ("branch",))
    tg = _section(data, "tg", ("cutoff_tol",))
    oracle = _section(data, "oracle", ("energy_width", "dx", "dt"))

    output = data.get("output", "csv")
    if not isinstance(output, str):
        raise ConfigValidationError(f"expected a string, got {output!r}", field="output")
    output_path = data.get("output_path")
    if output_path is not None and not isinstance(output_path, str):
        raise ConfigValidationError(f"expected a string, got {output_path!r}", field="output_path")

    config = RunConfig(
        command=command,
        barrier=barrier,
        sweep=sweep,
        output=output,
        output_path=output_path,
        seed=_integer(data.get("seed", 0), "seed"),
        branch=_integer(traverse.get("branch", 1), "traverse.branch"),
        cutoff_tol=_number(tg.get("cutoff_tol", DEFAULT_CUTOFF_TOL), "tg.cutoff_tol"),
        oracle=OracleOptions(
            energy_width=_number(oracle.get("energy_width", 0.02), "oracle.energy_width"),
            dx=_number(oracle.get("dx"), "oracle.dx", allow_none=True),
            dt=_number(oracle.get("dt"), "oracle.dt", allow_none=True),
        ),
    )
    return config.validate()


def load_run_config(path: Union[str, Path], command: str) -> RunConfig:
    """Parse and validate a JSON run config; syntax errors carry line and column."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigValidationError(f"cannot read config {path}: {e.strerror or e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigValidationError(f"{path}: {e.msg}", line=e.lineno, column=e.colno) from e
    config = run_config_from_dict(command, data)
    logger.info(f"Loaded {command} config from {path}")
    return config
