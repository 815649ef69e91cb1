"""
异常定义模块
所有对外抛出的错误都继承自 IdempotentError，CLI 据此决定退出码
"""


class IdempotentError(Exception):
    """工具包错误基类"""


class ConfigError(IdempotentError):
    """配置文件无法加载或校验失败"""


class ParseError(IdempotentError, ValueError):
    """模数、下标集合或参数字符串无法解析"""


class InputTooSmall(IdempotentError, ValueError):
    """模数小于2"""


class FactorizationLimitExceeded(IdempotentError):
    """试除上界内无法完成分解，需要直接提供分解形式"""


class NotInvertible(IdempotentError, ValueError):
    """gcd(a, n) != 1，不存在逆元"""


class ModuliNotCoprime(IdempotentError, ValueError):
    """CRT 的模数不两两互素"""


class IndexOutOfRange(IdempotentError, ValueError):
    """下标不在 1..r 范围内"""


class MixedModuli(IdempotentError, ValueError):
    """参与运算的幂等元属于不同的模数"""


class BadParams(IdempotentError, ValueError):
    """恒等式参数不满足前提条件"""


class LevelOutOfRange(IdempotentError, ValueError):
    """格的层号不在 0..r 范围内"""


class NotNested(IdempotentError, ValueError):
    """一致子格要求 T ⊆ S"""


class CapExceeded(IdempotentError):
    """枚举规模超过配置上限"""


class NotAUnit(IdempotentError, ValueError):
    """底数与模数不互素"""


class NotCycleElement(IdempotentError, ValueError):
    """底数不在其分量的循环部分中"""


class ExponentTooSmall(IdempotentError, ValueError):
    """指数小于 max(e_i)"""


class InvariantViolation(IdempotentError):
    """构造结果与数值计算不一致"""
