"""
共享夹具
"""

import sys
from pathlib import Path

import pytest

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.arithmetic import FactoredModulus, factorize
from src.config import LoggingSettings, Settings
from src.toolkit import IdempotentToolkit


@pytest.fixture
def m30() -> FactoredModulus:
    return factorize(30)


@pytest.fixture
def m12() -> FactoredModulus:
    return factorize(12)


@pytest.fixture
def m210() -> FactoredModulus:
    return factorize(210)


@pytest.fixture
def quiet_settings() -> Settings:
    """不写日志文件、不输出到控制台的配置"""
    return Settings(logging=LoggingSettings(file=None, console=False, level="WARNING"))


@pytest.fixture
def toolkit(quiet_settings) -> IdempotentToolkit:
    return IdempotentToolkit(settings=quiet_settings, setup_logging=False)


def brute_idempotents(m: int):
    return {x for x in range(m) if x * x % m == x}
