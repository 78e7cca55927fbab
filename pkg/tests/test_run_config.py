"""
Tests for run-config loading and validation.

Covers:
- Defaults and section parsing
- Field-named validation errors
- JSON syntax errors with line and column
- Sweep expansion and sweep validation
- Command-line overrides
"""

import pytest

from engine.errors import ConfigValidationError
from engine.run_config import RunConfig, SweepSpec, load_run_config, run_config_from_dict


class TestParsing:
    """Tests for run_config_from_dict()."""

    def test_defaults(self):
        """Only the barrier is required."""
        config = run_config_from_dict("static", {"barrier": {"v0": 2.0, "b": 1.0, "e_incident": 1.0}})
        assert config.output == "csv"
        assert config.output_path is None
        assert config.seed == 0
        assert config.branch == 1
        assert config.sweep is None
        assert config.oracle.energy_width == 0.02
        assert config.oracle.dx is None

    def test_sections(self):
        """traverse, tg and oracle sections reach the config."""
        config = run_config_from_dict("traverse", {
            "barrier": {"v0": 10.0, "b": 1.0, "e_incident": 5.0, "v1": 1.0, "omega": 0.1},
            "traverse": {"branch": 3},
            "tg": {"cutoff_tol": 1e-8},
            "oracle": {"energy_width": 0.05, "dx": 0.01, "dt": None},
            "seed": 42,
        })
        assert config.branch == 3
        assert config.cutoff_tol == 1e-8
        assert config.oracle.energy_width == 0.05
        assert config.oracle.dx == 0.01
        assert config.seed == 42

    def test_missing_barrier(self):
        """A config without a barrier names the missing section."""
        with pytest.raises(ConfigValidationError) as excinfo:
            run_config_from_dict("static", {"output": "csv"})
        assert excinfo.value.field == "barrier"

    def test_unknown_top_level_key(self):
        """Typos at the top level are rejected."""
        with pytest.raises(ConfigValidationError, match="unknown"):
            run_config_from_dict("static", {"barrier": {"v0": 2.0, "b": 1.0, "e_incident": 1.0}, "ouptut": "csv"})

    def test_unknown_section_key(self):
        """Typos inside a section are rejected with the section name."""
        with pytest.raises(ConfigValidationError) as excinfo:
            run_config_from_dict("traverse", {
                "barrier": {"v0": 10.0, "b": 1.0, "e_incident": 5.0, "v1": 1.0, "omega": 0.1},
                "traverse": {"brnach": 1},
            })
        assert excinfo.value.field == "traverse"

    @pytest.mark.parametrize(
        "barrier, field",
        [
            ({"v0": -1.0, "b": 1.0, "e_incident": 1.0}, "barrier.v0"),
            ({"v0": 2.0, "b": 0.0, "e_incident": 1.0}, "barrier.b"),
            ({"v0": 2.0, "b": 1.0, "e_incident": 0.0}, "barrier.e_incident"),
        ],
    )
    def test_barrier_errors_name_field(self, barrier, field):
        """Barrier errors carry the dotted field name."""
        with pytest.raises(ConfigValidationError) as excinfo:
            run_config_from_dict("static", {"barrier": barrier})
        assert excinfo.value.field == field

    @pytest.mark.parametrize(
        "extra, field",
        [
            ({"output": "xml"}, "output"),
            ({"seed": -1}, "seed"),
            ({"seed": 2 ** 64}, "seed"),
            ({"seed": 1.5}, "seed"),
            ({"traverse": {"branch": 0}}, "traverse.branch"),
            ({"tg": {"cutoff_tol": 0.1}}, "tg.cutoff_tol"),
            ({"oracle": {"energy_width": 0.0}}, "oracle.energy_width"),
            ({"oracle": {"dt": -0.01}}, "oracle.dt"),
        ],
    )
    def test_option_errors_name_field(self, extra, field):
        """Out-of-range options report the offending field."""
        data = {"barrier": {"v0": 2.0, "b": 1.0, "e_incident": 1.0}, **extra}
        with pytest.raises(ConfigValidationError) as excinfo:
            run_config_from_dict("static", data)
        assert excinfo.value.field == field
        assert field in str(excinfo.value)


class TestSweep:
    """Tests for SweepSpec and sweep validation."""

    def test_values_include_both_ends(self):
        """count values from start to stop inclusive."""
        sweep = SweepSpec.from_dict({"parameter": "b", "start": 0.5, "stop": 3.0, "count": 6})
        assert sweep.values() == [0.5, 1.0, 1.5, 2.0, 2.5, 3.0]

    def test_barriers_follow_sweep(self):
        """barriers() replaces only the swept field."""
        config = run_config_from_dict("static", {
            "barrier": {"v0": 2.0, "b": 1.0, "e_incident": 1.0},
            "sweep": {"parameter": "b", "start": 1.0, "stop": 2.0, "count": 3},
        })
        barriers = config.barriers()
        assert [cfg.b for cfg in barriers] == [1.0, 1.5, 2.0]
        assert all(cfg.v0 == 2.0 and cfg.e_incident == 1.0 for cfg in barriers)

    @pytest.mark.parametrize(
        "sweep, field",
        [
            ({"parameter": "height", "start": 0.0, "stop": 1.0, "count": 3}, "sweep.parameter"),
            ({"parameter": "b", "start": "a", "stop": 1.0, "count": 3}, "sweep.start"),
            ({"parameter": "b", "start": 0.5, "stop": 1.0, "count": 1}, "sweep.count"),
            ({"parameter": "b", "start": 0.5, "stop": 1.0, "count": 2.5}, "sweep.count"),
        ],
    )
    def test_bad_sweep(self, sweep, field):
        """Malformed sweeps name the offending field."""
        with pytest.raises(ConfigValidationError) as excinfo:
            SweepSpec.from_dict(sweep)
        assert excinfo.value.field == field

    def test_invalid_swept_value(self):
        """A sweep that crosses into an invalid barrier is rejected up front."""
        with pytest.raises(ConfigValidationError) as excinfo:
            run_config_from_dict("static", {
                "barrier": {"v0": 2.0, "b": 1.0, "e_incident": 1.0},
                "sweep": {"parameter": "b", "start": -1.0, "stop": 1.0, "count": 3},
            })
        assert excinfo.value.field == "sweep"

    def test_sweep_on_unsweepable_command(self):
        """spectrum does not take a sweep."""
        with pytest.raises(ConfigValidationError) as excinfo:
            run_config_from_dict("spectrum", {
                "barrier": {"v0": 10.0, "b": 1.0, "e_incident": 5.0, "v1": 1.0, "omega": 0.25},
                "sweep": {"parameter": "v1", "start": 0.5, "stop": 1.0, "count": 3},
            })
        assert excinfo.value.field == "sweep"


class TestLoading:
    """Tests for load_run_config() and overrides."""

    def test_load_from_file(self, write_config):
        """A written config loads back with its values."""
        path = write_config({"barrier": {"v0": 2.0, "b": 1.0, "e_incident": 1.0}, "seed": 5})
        config = load_run_config(path, "static")
        assert isinstance(config, RunConfig)
        assert config.seed == 5

    def test_syntax_error_has_line_and_column(self, tmp_path):
        """Invalid JSON reports where it broke."""
        path = tmp_path / "broken.json"
        path.write_text('{\n  "barrier": {"v0": 2.0,, "b": 1.0}\n}\n', encoding="utf-8")
        with pytest.raises(ConfigValidationError) as excinfo:
            load_run_config(path, "static")
        assert excinfo.value.line == 2
        assert excinfo.value.column is not None
        assert "line 2" in str(excinfo.value)

    def test_missing_file(self, tmp_path):
        """An unreadable path is a configuration error."""
        with pytest.raises(ConfigValidationError, match="cannot read"):
            load_run_config(tmp_path / "absent.json", "static")

    def test_overrides(self, write_config):
        """Flags replace output, output path and seed."""
        config = load_run_config(write_config({"barrier": {"v0": 2.0, "b": 1.0, "e_incident": 1.0}}), "static")
        changed = config.with_overrides(output="json", output_path="out.json", seed=9)
        assert (changed.output, changed.output_path, changed.seed) == ("json", "out.json", 9)
        assert config.with_overrides() is config

    def test_override_is_validated(self, write_config):
        """A negative seed from the command line is still rejected."""
        config = load_run_config(write_config({"barrier": {"v0": 2.0, "b": 1.0, "e_incident": 1.0}}), "static")
        with pytest.raises(ConfigValidationError):
            config.with_overrides(seed=-3)
