import json
import math
from dataclasses import replace

import numpy as np
import pytest

from repdtc import cli
from repdtc.disorder import DisorderSpec
from repdtc.harness import (
    ENV_SEED,
    MAX_ESTIMATED_SECONDS,
    PRESETS,
    CapacityError,
    ConfigError,
    ExperimentConfig,
    apply_overrides,
    describe,
    estimate_seconds,
    list_presets,
    load_config_file,
    resolve_config,
    run_experiment,
    write_outputs,
)
from repdtc.observables import subharmonic_score


def small_config(**kw):
    base = dict(
        name="small",
        model="u4",
        chains=2,
        sites=3,
        realizations=3,
        cycles=24,
        seed=7,
        coupling_specs=(DisorderSpec(1.5, 0.5), DisorderSpec(2.5, 0.5)),
        error_fraction=(0.05, 0.10),
    )
    base.update(kw)
    return ExperimentConfig(**base)


class TestValidation:
    def test_small_config_is_valid(self):
        small_config().validate()

    @pytest.mark.parametrize(
        "overrides",
        [
            {"model": "u5"},
            {"chains": 3},
            {"sites": 1},
            {"realizations": 0},
            {"cycles": 1},
            {"coupling_specs": (DisorderSpec(1.5, 0.5),)},
            {"lowering": "tensor-network"},
            {"error_fraction": (0.2, 0.1)},
            {"error_fraction": (-0.1, 0.1)},
            {"error_fraction": None},
            {"noise_single": 0.01, "lowering": "native-iswap"},
            {"noise_iswap": 0.05, "lowering": "native-iswap"},
            {"noise_single": 0.001},
            {"shots": 0},
            {"measure_qubit": 6},
            {"spectrum_average": "median"},
            {"targets": (1.0,)},
        ],
    )
    def test_bad_fields_raise_config_error(self, overrides):
        with pytest.raises(ConfigError):
            small_config(**overrides).validate()

    def test_explicit_spec_mode_requirements(self):
        with pytest.raises(ConfigError):
            small_config(
                error_fraction=None, x_spec=DisorderSpec(math.pi / 2, 0.1)
            ).validate()
        with pytest.raises(ConfigError):
            small_config(
                error_fraction=(0.0, 0.1), x_spec=DisorderSpec(math.pi / 2, 0.1)
            ).validate()

    def test_scale_spec_required_for_u8(self):
        cfg = small_config(
            model="u8",
            chains=3,
            cycles=32,
            coupling_specs=tuple(DisorderSpec(1.0, 0.2) for _ in range(3)),
            error_fraction=None,
            x_spec=DisorderSpec(math.pi / 2, 0.0),
            cnot_spec=DisorderSpec(math.pi / 4, 0.0),
        )
        with pytest.raises(ConfigError):
            cfg.validate()
        replace(cfg, scale_spec=DisorderSpec(1.0, 0.0)).validate()

    def test_capacity_error_past_qubit_limit(self):
        cfg = small_config(sites=13)
        with pytest.raises(CapacityError):
            cfg.validate()

    def test_target_grid_commensurability(self):
        small_config(cycles=24).validate()
        with pytest.raises(ConfigError):
            small_config(cycles=25).validate()


class TestTargetsAndReadout:
    def test_default_targets_follow_model(self):
        assert small_config().resolved_targets() == (
            pytest.approx(math.pi / 2),
            pytest.approx(3 * math.pi / 2),
        )
        assert PRESETS["fig5a"].resolved_targets() == (
            pytest.approx(math.pi / 4),
            pytest.approx(7 * math.pi / 4),
        )
        assert PRESETS["fig5b"].resolved_targets() == (
            pytest.approx(2 * math.pi / 3),
            pytest.approx(4 * math.pi / 3),
        )

    def test_explicit_targets_win(self):
        cfg = small_config(targets=(math.pi,))
        assert cfg.resolved_targets() == (math.pi,)

    def test_readout_chain_selection(self):
        assert PRESETS["fig2a"].readout() == 1
        assert PRESETS["fig3"].readout() == 1
        assert PRESETS["fig5a"].readout() == 2
        assert PRESETS["fig5b"].readout() is None
        assert PRESETS["fig4-smoke"].readout() is None


class TestPresets:
    def test_expected_catalog(self):
        names = list_presets()
        assert names == sorted(names)
        for required in (
            "fig2a",
            "fig2b",
            "fig3",
            "fig4-analog",
            "fig4-smoke",
            "fig5a",
            "fig5b",
            "ideal-u2n",
            "ideal-u3",
            "ideal-u4",
            "ideal-u8",
        ):
            assert required in names

    def test_every_preset_validates(self):
        for name in list_presets():
            PRESETS[name].validate()

    def test_presets_fit_runtime_guardrail(self):
        for name in list_presets():
            assert estimate_seconds(PRESETS[name]) < MAX_ESTIMATED_SECONDS

    def test_describe_mentions_key_fields(self):
        text = describe("fig2a")
        assert "fig2a" in text
        assert "model=u4" in text
        assert "seed=11" in text

    def test_describe_unknown_preset(self):
        with pytest.raises(KeyError) as err:
            describe("fig9")
        assert "fig2a" in str(err.value)


class TestEstimate:
    def test_scales_with_realizations(self):
        one = estimate_seconds(small_config(realizations=1))
        ten = estimate_seconds(small_config(realizations=10))
        assert one > 0
        assert ten == pytest.approx(10 * one)


CONFIG_TEXT = """\
[experiment]
name = roundtrip
model = u4
chains = 2
sites = 3
realizations = 2
cycles = 16
seed = 5
lowering = local-gadgets

[couplings]
chain0 = 1.5, 0.5
chain1 = 2.5, 0.5

[error]
fraction = 0.05, 0.10
signed = true
"""


class TestConfigFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "roundtrip.cfg"
        path.write_text(CONFIG_TEXT)
        cfg = load_config_file(path)
        assert cfg.name == "roundtrip"
        assert cfg.model == "u4"
        assert cfg.chains == 2 and cfg.sites == 3
        assert cfg.realizations == 2 and cfg.cycles == 16 and cfg.seed == 5
        assert cfg.lowering == "local-gadgets"
        assert cfg.coupling_specs == (DisorderSpec(1.5, 0.5), DisorderSpec(2.5, 0.5))
        assert cfg.error_fraction == (0.05, 0.10)
        assert cfg.error_signed is True
        assert cfg.shots is None and cfg.measure_qubit is None

    def test_explicit_spec_sections(self, tmp_path):
        path = tmp_path / "specs.cfg"
        path.write_text(
            "[experiment]\n"
            "model = u4\nchains = 2\nsites = 2\ncycles = 16\n"
            "targets = 3.141592653589793\n"
            "[couplings]\nchain0 = 1.0, 0.0\nchain1 = 1.0, 0.0\n"
            "[x_field]\nspec = 1.5707963267948966, 0.0\n"
            "[cnot]\nspec = 0.7853981633974483, 0.0\n"
        )
        cfg = load_config_file(path)
        assert cfg.x_spec == DisorderSpec(math.pi / 2, 0.0)
        assert cfg.cnot_spec == DisorderSpec(math.pi / 4, 0.0)
        assert cfg.resolved_targets() == (math.pi,)
        assert cfg.name == "specs"

    def test_missing_sections_are_named(self, tmp_path):
        path = tmp_path / "broken.cfg"
        path.write_text("[couplings]\nchain0 = 1, 0.5\n")
        with pytest.raises(ConfigError, match="experiment"):
            load_config_file(path)
        path.write_text("[experiment]\nmodel = u4\nchains = 2\n")
        with pytest.raises(ConfigError):
            load_config_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config_file(tmp_path / "absent.cfg")

    def test_resolve_prefers_presets(self, tmp_path):
        assert resolve_config("fig2a") is PRESETS["fig2a"]
        path = tmp_path / "file.cfg"
        path.write_text(CONFIG_TEXT)
        assert resolve_config(str(path)).name == "roundtrip"
        with pytest.raises(ConfigError):
            resolve_config("no-such-source")


class TestOverrides:
    def test_explicit_values_apply(self, monkeypatch):
        monkeypatch.delenv(ENV_SEED, raising=False)
        cfg = apply_overrides(
            small_config(), seed=99, realizations=7, cycles=48, lowering="native-iswap"
        )
        assert cfg.seed == 99
        assert cfg.realizations == 7
        assert cfg.cycles == 48
        assert cfg.lowering == "native-iswap"

    def test_env_seed_fallback(self, monkeypatch):
        monkeypatch.setenv(ENV_SEED, "123")
        assert apply_overrides(small_config()).seed == 123

    def test_explicit_seed_beats_env(self, monkeypatch):
        monkeypatch.setenv(ENV_SEED, "123")
        assert apply_overrides(small_config(), seed=4).seed == 4

    def test_noop_returns_config_unchanged(self, monkeypatch):
        monkeypatch.delenv(ENV_SEED, raising=False)
        cfg = small_config()
        assert apply_overrides(cfg) is cfg


class TestRunExperiment:
    def test_record_structure_and_scores(self):
        cfg = small_config()
        record = run_experiment(cfg)
        assert len(record.series) == 3
        stacked = np.vstack([s.values for s in record.series])
        assert np.allclose(stacked.mean(axis=0), record.mean_series.values)
        assert record.target_bins == [6, 18]
        assert record.score == pytest.approx(
            subharmonic_score(record.readout_spectrum, cfg.resolved_targets())
        )
        assert record.score_full == pytest.approx(
            subharmonic_score(record.spectrum, cfg.resolved_targets())
        )
        assert len(record.argmax_bins) == 2
        assert all(1 <= k < cfg.cycles for k in record.argmax_bins)
        assert record.readout_series.meta["chain"] == 1
        assert record.program_summary["ops_per_period"] > 0

    def test_readout_scope_differs_from_full_average(self):
        record = run_experiment(small_config())
        assert not np.allclose(
            record.readout_series.values, record.mean_series.values
        )

    def test_single_qubit_scope_skips_chain_rows(self):
        record = run_experiment(small_config(measure_qubit=3, realizations=2))
        assert record.readout_series is record.mean_series
        assert record.score == record.score_full

    def test_spectra_averaging_mode(self):
        series_mode = run_experiment(small_config())
        spectra_mode = run_experiment(small_config(spectrum_average="spectra"))
        assert len(spectra_mode.spectrum.magnitudes) == 24
        assert not np.allclose(
            series_mode.spectrum.magnitudes, spectra_mode.spectrum.magnitudes
        )

    def test_runtime_guardrail(self):
        with pytest.raises(CapacityError, match="guardrail"):
            run_experiment(small_config(), max_seconds=1e-9)

    def test_invalid_config_rejected_before_running(self):
        with pytest.raises(ConfigError):
            run_experiment(small_config(cycles=1))


class TestDeterminism:
    def test_repeat_runs_and_worker_counts_bit_identical(self, tmp_path):
        cfg = small_config()
        paths = []
        for label, workers in (("a", 1), ("b", 1), ("c", 2)):
            record = run_experiment(cfg, workers=workers)
            out = tmp_path / label
            write_outputs(record, out)
            paths.append(out)
        base_series = (paths[0] / "series.csv").read_bytes()
        base_spectrum = (paths[0] / "spectrum.csv").read_bytes()
        for out in paths[1:]:
            assert (out / "series.csv").read_bytes() == base_series
            assert (out / "spectrum.csv").read_bytes() == base_spectrum
        records = []
        for out in paths:
            with open(out / "record.json") as fh:
                data = json.load(fh)
            data.pop("wall_seconds")
            records.append(data)
        assert records[0] == records[1] == records[2]

    def test_seed_changes_output(self):
        a = run_experiment(small_config())
        b = run_experiment(small_config(seed=8))
        assert not np.allclose(a.mean_series.values, b.mean_series.values)

    def test_lowering_levels_agree_in_exact_mode(self):
        base = small_config(sites=4, realizations=1, cycles=100, seed=3)
        runs = {
            level: run_experiment(replace(base, lowering=level))
            for level in ("pauli-layers", "local-gadgets", "native-iswap")
        }
        reference = runs["pauli-layers"].mean_series.values
        for level in ("local-gadgets", "native-iswap"):
            drift = np.max(np.abs(runs[level].mean_series.values - reference))
            assert drift < 1e-6


class TestArtifacts:
    def test_csv_layout_and_float_roundtrip(self, tmp_path):
        cfg = small_config(realizations=2, cycles=16)
        record = run_experiment(cfg)
        paths = write_outputs(record, tmp_path)
        assert set(paths) == {"series", "spectrum", "record"}

        series_lines = paths["series"].read_text().splitlines()
        assert series_lines[0].startswith("# name=small model=u4")
        assert series_lines[1].startswith("# params:")
        assert series_lines[2] == "realization,cycle,Sz"
        first = series_lines[3].split(",")
        assert first[0] == "0" and first[1] == "0"
        assert float(first[2]) == record.series[0].values[0]
        mean_rows = [l for l in series_lines[3:] if l.startswith("-1,")]
        assert len(mean_rows) == 17

        spectrum_lines = paths["spectrum"].read_text().splitlines()
        assert spectrum_lines[2] == "omega,magnitude"
        omega, magnitude = spectrum_lines[3].split(",")
        assert float(omega) == record.spectrum.omegas[0]
        assert float(magnitude) == record.spectrum.magnitudes[0]
        assert len(spectrum_lines) == 3 + 16

        with open(paths["record"]) as fh:
            data = json.load(fh)
        assert data["name"] == "small"
        assert data["readout_chain"] == 1
        assert data["subharmonic_score"] == record.score
        assert data["subharmonic_score_full_average"] == record.score_full
        assert data["target_bins"] == record.target_bins

    def test_run_experiment_writes_when_asked(self, tmp_path):
        run_experiment(small_config(realizations=1, cycles=16), out_dir=tmp_path)
        assert (tmp_path / "series.csv").exists()
        assert (tmp_path / "spectrum.csv").exists()
        assert (tmp_path / "record.json").exists()


class TestCli:
    def test_list_names_presets(self, capsys):
        assert cli.main(["list"]) == 0
        out = capsys.readouterr().out
        assert "fig2a" in out and "ideal-u4" in out

    def test_describe(self, capsys):
        assert cli.main(["describe", "fig5a"]) == 0
        assert "model=u8" in capsys.readouterr().out

    def test_describe_unknown_exits_2(self, capsys):
        assert cli.main(["describe", "fig9"]) == 2
        assert "fig9" in capsys.readouterr().err

    def test_run_unknown_source_exits_2(self, capsys):
        assert cli.main(["run", "no-such-thing"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_run_writes_artifacts(self, tmp_path, capsys, monkeypatch):
        monkeypatch.delenv(ENV_SEED, raising=False)
        path = tmp_path / "tiny.cfg"
        path.write_text(CONFIG_TEXT)
        out = tmp_path / "results"
        code = cli.main(["run", str(path), "--out", str(out), "--threads", "1"])
        assert code == 0
        printed = capsys.readouterr().out
        assert "subharmonic score" in printed
        assert "chain 1 readout" in printed
        assert (out / "record.json").exists()

    def test_run_respects_env_seed(self, tmp_path, capsys, monkeypatch):
        path = tmp_path / "tiny.cfg"
        path.write_text(CONFIG_TEXT)
        monkeypatch.setenv(ENV_SEED, "31")
        assert cli.main(["run", str(path)]) == 0
        assert "seed 31" in capsys.readouterr().out

    def test_verify_suite_passes(self, capsys):
        assert cli.main(["verify"]) == 0
        out = capsys.readouterr().out
        assert "all checks passed" in out
        assert not any(line.startswith("FAIL") for line in out.splitlines())
