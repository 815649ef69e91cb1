"""
模运算基础函数
逆元、CRT 合并、平方-乘幂、素数幂的欧拉函数与 Carmichael 函数
"""

import logging
from enum import Enum
from math import gcd
from typing import Iterable, Tuple

from ..errors import BadParams, ModuliNotCoprime, NotInvertible


logger = logging.getLogger(__name__)


class TotientKind(str, Enum):
    """指数约化所用的函数"""

    EULER = "euler"
    CARMICHAEL = "carmichael"


def mod_inverse(a: int, n: int) -> int:
    """返回 x ∈ [0, n) 使 a·x ≡ 1 (mod n)"""
    if n < 2:
        raise BadParams(f"模数必须 >= 2: {n}")
    if gcd(a, n) != 1:
        raise NotInvertible(f"gcd({a}, {n}) != 1")
    return pow(a, -1, n)


def crt_combine(residues: Iterable[Tuple[int, int]]) -> int:
    """
    中国剩余定理合并

    Args:
        residues: (余数, 模数) 列表，模数两两互素

    Returns:
        [0, ∏模数) 内唯一满足全部同余式的整数
    """
    x, modulus = 0, 1
    for residue, n in residues:
        if n < 1:
            raise BadParams(f"模数必须为正: {n}")
        if not 0 <= residue < n:
            raise BadParams(f"余数 {residue} 不在 [0, {n}) 内")
        if gcd(modulus, n) != 1:
            raise ModuliNotCoprime(f"模数 {n} 与已合并的 {modulus} 不互素")
        if n == 1:
            continue

        # x + modulus·t ≡ residue (mod n)
        t = (residue - x) * pow(modulus % n, -1, n) % n
        x += modulus * t
        modulus *= n

    return x


def pow_mod(b: int, e: int, n: int) -> int:
    """平方-乘法计算 b^e mod n，b^0 = 1"""
    if n < 2:
        raise BadParams(f"模数必须 >= 2: {n}")
    if e < 0:
        raise BadParams(f"指数必须非负: {e}")

    result = 1
    base = b % n
    while e:
        if e & 1:
            result = result * base % n
        base = base * base % n
        e >>= 1
    return result % n


def euler_phi_prime_power(p: int, e: int) -> int:
    """φ(p^e) = p^{e-1}(p-1)"""
    return p ** (e - 1) * (p - 1)


def carmichael_prime_power(p: int, e: int) -> int:
    """λ(p^e)：奇素数或 p^e ∈ {2, 4} 时等于 φ，p = 2 且 e >= 3 时为 2^{e-2}"""
    if p == 2 and e >= 3:
        return 2 ** (e - 2)
    return euler_phi_prime_power(p, e)


def totient_prime_power(p: int, e: int, kind: TotientKind = TotientKind.EULER) -> int:
    """按 kind 选择 φ 或 λ"""
    if TotientKind(kind) is TotientKind.CARMICHAEL:
        return carmichael_prime_power(p, e)
    return euler_phi_prime_power(p, e)
