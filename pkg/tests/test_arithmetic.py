"""
算术模块测试
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.arithmetic import (
    FactoredModulus,
    TotientKind,
    carmichael_prime_power,
    crt_combine,
    euler_phi_prime_power,
    factorize,
    mod_inverse,
    pow_mod,
    totient_prime_power,
)
from src.errors import (
    BadParams,
    FactorizationLimitExceeded,
    InputTooSmall,
    ModuliNotCoprime,
    NotInvertible,
    ParseError,
)


class TestFactorize:
    """测试试除分解"""

    def test_composite(self):
        """测试普通合数"""
        modulus = factorize(360)
        assert modulus.factors == ((2, 3), (3, 2), (5, 1))
        assert modulus.r == 3
        assert modulus.prime_powers == (8, 9, 5)
        assert modulus.max_exponent == 3
        assert modulus.to_text() == "2^3*3^2*5^1"

    def test_prime(self):
        """测试素数与最小模数"""
        assert factorize(2).factors == ((2, 1),)
        assert factorize(97).factors == ((97, 1),)

    def test_too_small(self):
        """测试 m < 2"""
        with pytest.raises(InputTooSmall):
            factorize(1)
        with pytest.raises(InputTooSmall):
            factorize(0)

    def test_large_prime_cofactor(self):
        """试除上界外的剩余因子为素数时仍可分解"""
        modulus = factorize(2 * 10007, bound=10)
        assert modulus.factors == ((2, 1), (10007, 1))

    def test_limit_exceeded(self):
        """剩余因子为合数且超过上界"""
        with pytest.raises(FactorizationLimitExceeded):
            factorize(101 * 103, bound=100)

    @pytest.mark.parametrize("n", range(2, 400))
    def test_product_matches(self, n):
        """分解乘积还原 n"""
        modulus = factorize(n)
        product = 1
        for p, e in modulus.factors:
            product *= p**e
        assert product == n


class TestFactoredModulus:
    """测试带分解的模数"""

    def test_from_factors_merges(self):
        """重复素数合并、无序输入排序"""
        modulus = FactoredModulus.from_factors([(3, 1), (2, 2), (3, 1)])
        assert modulus.m == 36
        assert modulus.factors == ((2, 2), (3, 2))

    def test_from_factors_rejects_composite(self):
        """非素数底"""
        with pytest.raises(ParseError):
            FactoredModulus.from_factors([(4, 1)])

    def test_product_mismatch(self):
        """m 与分解不一致"""
        with pytest.raises(ParseError):
            FactoredModulus(m=12, factors=((2, 2), (3, 2)))

    def test_unsorted_rejected(self):
        """直接构造时素数必须递增"""
        with pytest.raises(ParseError):
            FactoredModulus(m=6, factors=((3, 1), (2, 1)))

    def test_indices_and_accessors(self):
        """下标从 1 开始"""
        modulus = factorize(360)
        assert list(modulus.indices) == [1, 2, 3]
        assert modulus.prime(2) == 3
        assert modulus.prime_power(1) == 8
        assert not modulus.is_odd
        assert factorize(105).is_odd

    def test_to_dict_uses_strings(self):
        """JSON 中整数为十进制字符串"""
        data = factorize(12).to_dict()
        assert data == {"m": "12", "factors": [["2", "2"], ["3", "1"]]}
        assert str(factorize(12)) == "12 = 2^2*3^1"


class TestModular:
    """测试模运算基础函数"""

    def test_mod_inverse(self):
        """测试逆元"""
        assert mod_inverse(3, 7) == 5
        assert mod_inverse(1, 2) == 1
        with pytest.raises(NotInvertible):
            mod_inverse(2, 4)

    def test_crt_combine(self):
        """测试 CRT 合并"""
        assert crt_combine([(0, 4), (1, 3)]) == 4
        assert crt_combine([(1, 4), (0, 3)]) == 9
        assert crt_combine([(2, 3), (3, 5), (2, 7)]) == 23
        assert crt_combine([]) == 0

    def test_crt_not_coprime(self):
        """模数不互素"""
        with pytest.raises(ModuliNotCoprime):
            crt_combine([(1, 4), (1, 6)])

    def test_crt_bad_residue(self):
        """余数越界"""
        with pytest.raises(BadParams):
            crt_combine([(5, 4)])

    def test_pow_mod_edge_cases(self):
        """b^0 = 1，包括 b = 0"""
        assert pow_mod(0, 0, 7) == 1
        assert pow_mod(0, 5, 7) == 0
        assert pow_mod(-1, 3, 7) == 6
        with pytest.raises(BadParams):
            pow_mod(2, -1, 7)

    @given(st.integers(0, 10**30), st.integers(0, 2**130), st.integers(2, 10**20))
    @settings(max_examples=200)
    def test_pow_mod_matches_builtin(self, b, e, n):
        """与内置 pow 一致"""
        assert pow_mod(b, e, n) == pow(b, e, n)

    @pytest.mark.parametrize(
        "p, e, phi, lam",
        [(2, 1, 1, 1), (2, 2, 2, 2), (2, 3, 4, 2), (2, 5, 16, 8), (3, 2, 6, 6), (5, 1, 4, 4), (7, 3, 294, 294)],
    )
    def test_totients(self, p, e, phi, lam):
        """φ 与 λ 在素数幂上的值"""
        assert euler_phi_prime_power(p, e) == phi
        assert carmichael_prime_power(p, e) == lam
        assert totient_prime_power(p, e, TotientKind.EULER) == phi
        assert totient_prime_power(p, e, "carmichael") == lam
