"""
算术模块初始化
"""

from .factored import DEFAULT_TRIAL_BOUND, FactoredModulus, factorize
from .modular import (
    TotientKind,
    carmichael_prime_power,
    crt_combine,
    euler_phi_prime_power,
    mod_inverse,
    pow_mod,
    totient_prime_power,
)

__all__ = [
    "DEFAULT_TRIAL_BOUND",
    "FactoredModulus",
    "factorize",
    "TotientKind",
    "carmichael_prime_power",
    "crt_combine",
    "euler_phi_prime_power",
    "mod_inverse",
    "pow_mod",
    "totient_prime_power",
]
