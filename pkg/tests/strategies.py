"""
hypothesis 策略：随机模数与下标集合
"""

from hypothesis import strategies as st
from sympy import nextprime

from src.arithmetic import FactoredModulus
from src.idempotents import IndexSet

SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]


@st.composite
def small_moduli(draw, max_r: int = 4, max_exponent: int = 3, max_m: int = 5000) -> FactoredModulus:
    """可以暴力扫描 [0, m) 的模数"""
    primes = draw(st.lists(st.sampled_from(SMALL_PRIMES), min_size=1, max_size=max_r, unique=True))
    factors = []
    m = 1
    for p in sorted(primes):
        e = draw(st.integers(1, max_exponent))
        while e > 1 and m * p**e > max_m:
            e -= 1
        if m * p**e > max_m:
            break
        factors.append((p, e))
        m *= p**e
    if not factors:
        factors = [(2, 1)]
    return FactoredModulus.from_factors(factors)


@st.composite
def large_moduli(draw, max_r: int = 6, prime_bits: int = 20) -> FactoredModulus:
    """预先分解的大模数，素数幂不超过 2^prime_bits"""
    seeds = draw(
        st.lists(
            st.integers(2, 2 ** (prime_bits - 1)), min_size=1, max_size=max_r, unique_by=nextprime
        )
    )
    primes = {nextprime(x) for x in seeds}
    factors = []
    for p in sorted(primes):
        e = 1
        while draw(st.booleans()) and p ** (e + 1) < 2**prime_bits:
            e += 1
        factors.append((p, e))
    return FactoredModulus.from_factors(factors)


def index_sets(width: int):
    return st.integers(0, (1 << width) - 1).map(lambda mask: IndexSet(mask, width))
