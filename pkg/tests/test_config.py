"""
配置加载测试
"""

from pathlib import Path

import pytest
from pydantic import ValidationError

from src.arithmetic import TotientKind
from src.config import CliConfig, LoggingSettings, Settings, expand_env, load_config
from src.errors import ConfigError


class TestExpandEnv:
    """测试环境变量展开"""

    def test_default(self, monkeypatch):
        monkeypatch.delenv("IDEMPOTENT_TEST_VALUE", raising=False)
        assert expand_env("${IDEMPOTENT_TEST_VALUE:-42}") == "42"

    def test_set(self, monkeypatch):
        monkeypatch.setenv("IDEMPOTENT_TEST_VALUE", "7")
        assert expand_env({"a": ["x${IDEMPOTENT_TEST_VALUE}y"]}) == {"a": ["x7y"]}

    def test_missing(self, monkeypatch):
        monkeypatch.delenv("IDEMPOTENT_TEST_VALUE", raising=False)
        with pytest.raises(ConfigError):
            expand_env("${IDEMPOTENT_TEST_VALUE}")

    def test_non_strings(self):
        assert expand_env({"n": 3, "flag": True, "none": None}) == {"n": 3, "flag": True, "none": None}


class TestLoadConfig:
    """测试配置文件加载"""

    def test_missing_file(self, tmp_path):
        settings = load_config(str(tmp_path / "absent.yaml"))
        assert settings == Settings()

    def test_repository_config(self, monkeypatch):
        """仓库自带的 config.yaml 在默认环境下可加载"""
        for name in (
            "IDEMPOTENT_TRIAL_BOUND",
            "IDEMPOTENT_MAX_R",
            "IDEMPOTENT_MAX_MODULUS",
            "IDEMPOTENT_MAX_GRAPH_MODULUS",
            "IDEMPOTENT_MAX_LATTICE_SPAN",
            "IDEMPOTENT_TOTIENT_KIND",
            "IDEMPOTENT_SELFTEST_WORKERS",
            "IDEMPOTENT_LOG_LEVEL",
        ):
            monkeypatch.delenv(name, raising=False)
        settings = load_config(str(Path(__file__).parent.parent / "config.yaml"))
        assert settings.enumeration.max_r == 24
        assert settings.logging.level == "WARNING"
        assert settings.output.json_options.indent == 2

    def test_env_override(self, tmp_path, monkeypatch):
        path = tmp_path / "config.yaml"
        path.write_text('modexp:\n  totient_kind: "${KIND:-euler}"\nlogging:\n  level: debug\n', encoding="utf-8")
        monkeypatch.setenv("KIND", "carmichael")
        settings = load_config(str(path))
        assert settings.modexp.totient_kind is TotientKind.CARMICHAEL
        assert settings.logging.level == "DEBUG"

    def test_to_dict_uses_alias(self):
        data = Settings().to_dict()
        assert data["output"]["json"]["indent"] == 2
        assert data["modexp"]["totient_kind"] == "euler"

    @pytest.mark.parametrize(
        "content",
        [
            "enumeration: [1, 2\n",
            "- just\n- a list\n",
            "enumeration:\n  max_r: 0\n",
            "logging:\n  level: LOUD\n",
            "output:\n  format: pdf\n",
        ],
    )
    def test_invalid(self, tmp_path, content):
        path = tmp_path / "config.yaml"
        path.write_text(content, encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(str(path))


class TestCliConfig:
    """测试命令行有效配置"""

    def test_defaults(self):
        cli = CliConfig(modulus_input="30")
        assert cli.output_format == "text"
        assert cli.totient_kind is TotientKind.EULER

    def test_blank_modulus(self):
        with pytest.raises(ValidationError):
            CliConfig(modulus_input="   ")

    def test_bad_format(self):
        with pytest.raises(ValidationError):
            CliConfig(output_format="xml")

    def test_caps_must_be_positive(self):
        assert CliConfig().max_r == 24
        with pytest.raises(ValidationError):
            CliConfig(max_r=0)
        with pytest.raises(ValidationError):
            CliConfig(max_graph_modulus=1)

    def test_logging_level_normalized(self):
        assert LoggingSettings(level="info").level == "INFO"
