import json

import pytest

from commentary_align.cli.config import (
    RunConfig,
    merge_settings,
    read_config_file,
    resolve_config,
    run_manifest_name,
    write_run_manifest,
)
from commentary_align.coarse.llm import LlmEndpointConfig
from commentary_align.core.errors import UsageError


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        "seed = 7\n"
        "windows = [5.0, 10.0]\n"
        "[synth]\n"
        "num_matches = 6\n"
        "noise_sigma = 0.3\n"
        "[train]\n"
        "epochs = 4\n"
        "seed = 11\n"
        "[realign]\n"
        "before_s = 30.0\n"
        "[coarse]\n"
        'mode = "off"\n',
        encoding="utf-8",
    )
    return path


class TestResolveConfig:
    def test_defaults(self):
        """Without file or flags every section keeps its defaults."""
        assert resolve_config() == RunConfig()

    def test_file_values_and_top_level_seed(self, config_file):
        """File values apply; the top-level seed fills sections without their own."""
        config = resolve_config(config_file)

        assert config.synth.num_matches == 6
        assert config.synth.noise_sigma == 0.3
        assert config.synth.seed == 7
        assert config.train.seed == 11
        assert config.train.epochs == 4
        assert config.realign.before_s == 30.0
        assert config.coarse.mode == "off"
        assert config.windows == (5.0, 10.0)

    def test_flags_override_file(self, config_file):
        """Flags win over the file and None flags are ignored."""
        overrides = {"seed": 3, "synth": {"num_matches": 9, "d": None}, "train": {"epochs": None}}
        config = resolve_config(config_file, overrides)

        assert config.synth.num_matches == 9
        assert config.synth.d == RunConfig().synth.d
        assert config.train.epochs == 4
        assert config.synth.seed == 3
        assert config.train.seed == 3

    def test_invalid_value_names_the_field(self):
        """Validation failures are usage errors naming the dotted field."""
        with pytest.raises(UsageError, match="train.epochs"):
            resolve_config(overrides={"train": {"epochs": 0}})

    def test_unknown_key(self, tmp_path):
        """Unknown settings are rejected."""
        path = tmp_path / "bad.toml"
        path.write_text("[realign]\nwidth = 3\n", encoding="utf-8")

        with pytest.raises(UsageError, match="realign.width"):
            resolve_config(path)

    @pytest.mark.parametrize("windows", [(), (30.0, 10.0), (10.0, 10.0), (-1.0, 10.0)])
    def test_window_list_must_be_ascending_and_non_empty(self, windows):
        """Empty, unsorted, repeated or negative window radii are usage errors."""
        with pytest.raises(UsageError, match="windows"):
            resolve_config(overrides={"windows": windows})


class TestReadConfigFile:
    def test_missing(self, tmp_path):
        with pytest.raises(UsageError, match="not found"):
            read_config_file(tmp_path / "absent.toml")

    def test_unparsable(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("seed = = 1\n", encoding="utf-8")

        with pytest.raises(UsageError, match="cannot parse"):
            read_config_file(path)

    def test_json_must_be_a_table(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")

        with pytest.raises(UsageError, match="table of settings"):
            read_config_file(path)


def test_merge_settings_is_recursive():
    """Nested tables merge key by key."""
    merged = merge_settings({"a": {"x": 1, "y": 2}, "b": 1}, {"a": {"y": 3}, "c": {"z": None}})
    assert merged == {"a": {"x": 1, "y": 3}, "b": 1, "c": {}}


class TestRunManifest:
    def test_replays_as_config(self, config_file, tmp_path):
        """A written manifest resolves back to the same settings."""
        config = resolve_config(config_file, {"seed": 4})
        out = tmp_path / "out"
        path = write_run_manifest(out, "train", config, [tmp_path / "data", "--out", out])

        assert path.name == run_manifest_name("train") == "run_manifest.train.json"
        assert resolve_config(path) == config
        assert json.loads(path.read_text())["argv"] == [
            "train",
            "../data",
            "--out",
            ".",
            "--config",
            "run_manifest.train.json",
        ]

    def test_is_stable(self, tmp_path):
        """The same settings always give the same bytes, with sorted keys."""
        config = RunConfig()
        first = write_run_manifest(tmp_path / "a", "synth", config, [tmp_path / "a"]).read_bytes()
        second = write_run_manifest(tmp_path / "b", "synth", config, [tmp_path / "b"]).read_bytes()

        assert first == second
        document = json.loads(first)
        assert list(document) == ["argv", "command", "config"]
        assert document["argv"] == ["synth", ".", "--config", "run_manifest.synth.json"]

    def test_leaves_out_endpoint_and_output_paths(self, tmp_path):
        """Endpoint details and the checkpoint path derived from --out never reach the manifest."""
        config = RunConfig()
        config = config.model_copy(
            update={
                "coarse": config.coarse.model_copy(
                    update={"endpoint": LlmEndpointConfig(base_url="http://llm.local", api_key="s3cret")}
                ),
                "train": config.train.model_copy(update={"checkpoint_path": tmp_path / "h.mtac"}),
            }
        )
        text = write_run_manifest(tmp_path, "align", config).read_text(encoding="utf-8")

        assert "llm.local" not in text
        assert "s3cret" not in text
        assert "h.mtac" not in text
