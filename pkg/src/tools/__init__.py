"""
工具模块初始化
"""

from .power_graph import PowerGraphTool

__all__ = ["PowerGraphTool"]
