"""
Z/mZ 幂等元工具包
"""

__version__ = "1.0.0"

from .toolkit import IdempotentToolkit

__all__ = ["IdempotentToolkit"]
