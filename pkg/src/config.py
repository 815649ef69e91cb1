"""
配置加载模块
读取 config.yaml，展开 ${VAR} / ${VAR:-default} 环境变量并校验为 Settings
"""

import logging
import os
import re
from pathlib import Path
from typing import Any, Dict, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .arithmetic import DEFAULT_TRIAL_BOUND, TotientKind
from .errors import ConfigError


logger = logging.getLogger(__name__)

_PLACEHOLDER = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)(?::-([^}]*))?\}")


class ArithmeticSettings(BaseModel):
    trial_division_bound: int = Field(DEFAULT_TRIAL_BOUND, gt=1)


class EnumerationSettings(BaseModel):
    max_r: int = Field(24, gt=0)
    max_modulus: int = Field(10**6, gt=1)
    max_graph_modulus: int = Field(5000, gt=1)
    max_lattice_span: int = Field(20, gt=0)


class ModExpSettings(BaseModel):
    totient_kind: TotientKind = TotientKind.EULER
    per_prime_mode: Literal["modulus", "crt"] = "modulus"


class BenchmarkSettings(BaseModel):
    samples: int = Field(10_000, gt=0)
    exponent_bits: int = Field(64, gt=0)
    seed: int = 20240601


class SelfTestSettings(BaseModel):
    max_exponent: int = Field(40, ge=0)
    max_workers: int = Field(1, gt=0)


class JsonSettings(BaseModel):
    indent: Optional[int] = 2
    ensure_ascii: bool = False


class OutputSettings(BaseModel):
    format: Literal["text", "json", "dot"] = "text"
    json_options: JsonSettings = Field(default_factory=JsonSettings, alias="json")

    model_config = ConfigDict(populate_by_name=True)


class LoggingSettings(BaseModel):
    level: str = "INFO"
    file: Optional[str] = "logs/idempotent.log"
    console: bool = True
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    @field_validator("level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"未知的日志级别: {value}")
        return value


class Settings(BaseModel):
    """全部配置项，缺省值即内置默认配置"""

    arithmetic: ArithmeticSettings = Field(default_factory=ArithmeticSettings)
    enumeration: EnumerationSettings = Field(default_factory=EnumerationSettings)
    modexp: ModExpSettings = Field(default_factory=ModExpSettings)
    benchmark: BenchmarkSettings = Field(default_factory=BenchmarkSettings)
    selftest: SelfTestSettings = Field(default_factory=SelfTestSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)

    def to_dict(self) -> Dict[str, Any]:
        """工具类使用的配置字典"""
        return self.model_dump(mode="json", by_alias=True)


class CliConfig(BaseModel):
    """单次命令行调用的有效配置"""

    modulus_input: Optional[str] = None
    output_format: Literal["text", "json", "dot"] = "text"
    max_r: int = Field(24, gt=0)
    max_modulus: int = Field(10**6, gt=1)
    max_graph_modulus: int = Field(5000, gt=1)
    seed: int = 20240601
    totient_kind: TotientKind = TotientKind.EULER

    @field_validator("modulus_input")
    @classmethod
    def _non_empty(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and not value.strip():
            raise ValueError("模数输入不能为空")
        return value


def expand_env(value: Any) -> Any:
    """递归展开字符串中的 ${VAR} 与 ${VAR:-default}"""
    if isinstance(value, dict):
        return {key: expand_env(item) for key, item in value.items()}
    if isinstance(value, list):
        return [expand_env(item) for item in value]
    if not isinstance(value, str):
        return value

    def substitute(match: re.Match) -> str:
        name, default = match.group(1), match.group(2)
        found = os.environ.get(name)
        if found:
            return found
        if default is not None:
            return default
        raise ConfigError(f"环境变量 {name} 未设置且没有默认值")

    return _PLACEHOLDER.sub(substitute, value)


def load_config(config_path: str = "config.yaml") -> Settings:
    """
    加载配置文件

    Args:
        config_path: 配置文件路径，不存在时使用内置默认值

    Returns:
        Settings

    Raises:
        ConfigError: YAML 格式错误或校验失败
    """
    config_file = Path(config_path)

    if not config_file.exists():
        logger.debug(f"配置文件不存在，使用默认配置: {config_path}")
        return Settings()

    try:
        with open(config_file, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"配置文件格式错误: {e}") from e

    if not isinstance(raw, dict):
        raise ConfigError(f"配置文件顶层必须是映射: {config_path}")

    try:
        return Settings.model_validate(expand_env(raw))
    except ValidationError as e:
        raise ConfigError(f"配置校验失败: {e}") from e
