"""
Exact integer arithmetic: factorization and the multiplicative functions built on it.

Factorization uses trial division by small primes, a deterministic Miller-Rabin
test (valid for every 64-bit integer) and Pollard-Brent for the cofactors.
"""
import itertools
import logging
from functools import lru_cache, reduce
from math import comb, gcd
from typing import Dict, List

from app.core.exceptions import DomainError
from app.schemas.arithmetic import Factorization

logger = logging.getLogger(__name__)

MAX_FACTOR_INPUT = 2 ** 63 - 1

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_TRIAL_LIMIT = 1000
_SMALL_PRIMES = [p for p in range(2, _TRIAL_LIMIT) if all(p % d for d in range(2, int(p ** 0.5) + 1))]


def is_prime(n: int) -> bool:
    """
    Deterministic primality test for n < 3.3e24.

    Args:
        n: Integer to test

    Returns:
        True if n is prime
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:12]:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """Nontrivial factor of an odd composite n (deterministic choice of constants)."""
    for c in itertools.count(1):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        m = 128
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise AssertionError("unreachable")


def _split(n: int, out: Dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _split(d, out)
    _split(n // d, out)


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """
    Exact factorization of n.

    Args:
        n: Integer with 1 <= n <= 2^63 - 1

    Returns:
        Factorization with primes ascending (empty for n = 1)

    Raises:
        DomainError: If n is out of range
    """
    if not isinstance(n, int) or n < 1 or n > MAX_FACTOR_INPUT:
        raise DomainError(f"factorize requires 1 <= n <= 2^63-1, got {n}", field="n")

    found: Dict[int, int] = {}
    m = n
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        while m % p == 0:
            found[p] = found.get(p, 0) + 1
            m //= p
    if m > 1:
        if m < _TRIAL_LIMIT * _TRIAL_LIMIT:
            found[m] = found.get(m, 0) + 1
        else:
            _split(m, found)

    return Factorization(factors=tuple(sorted(found.items())))


def euler_phi(n: int) -> int:
    """Euler's totient."""
    result = 1
    for p, e in factorize(n).factors:
        result *= (p - 1) * p ** (e - 1)
    return result


def phi_star(n: int) -> int:
    """
    Number of primitive characters mod n.

    Multiplicative with phi*(p) = p - 2 and phi*(p^e) = p^(e-2) (p-1)^2 for e >= 2,
    so it vanishes exactly when n = 2 mod 4.
    """
    result = 1
    for p, e in factorize(n).factors:
        if e == 1:
            result *= p - 2
        else:
            result *= p ** (e - 2) * (p - 1) ** 2
    return result


def mobius(n: int) -> int:
    """Moebius function."""
    f = factorize(n)
    if any(e > 1 for _, e in f.factors):
        return 0
    return -1 if len(f.factors) % 2 else 1


def divisors(n: int) -> List[int]:
    """All positive divisors of n, ascending."""
    divs = [1]
    for p, e in factorize(n).factors:
        divs = [d * p ** i for d in divs for i in range(e + 1)]
    return sorted(divs)


def divisor_count(n: int) -> int:
    """d(n)."""
    return divisor_count_k(n, 2)


def divisor_count_k(n: int, k: int) -> int:
    """k-fold divisor function d_k(n): ordered factorizations of n into k factors."""
    if k < 1:
        raise DomainError(f"d_k requires k >= 1, got {k}", field="k")
    result = 1
    for _, e in factorize(n).factors:
        result *= comb(e + k - 1, k - 1)
    return result


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def carmichael_lambda(n: int) -> int:
    """Exponent of the unit group mod n."""
    parts = []
    for p, e in factorize(n).factors:
        if p == 2 and e >= 3:
            parts.append(2 ** (e - 2))
        else:
            parts.append((p - 1) * p ** (e - 1))
    return reduce(_lcm, parts, 1)


def multiplicative_order(g: int, n: int) -> int:
    """Order of g in (Z/nZ)^*."""
    if gcd(g, n) != 1:
        raise DomainError(f"{g} is not a unit mod {n}")
    order = carmichael_lambda(n)
    for p, _ in factorize(order).factors:
        while order % p == 0 and pow(g, order // p, n) == 1:
            order //= p
    return order


def primitive_root(n: int) -> int:
    """
    Smallest generator of (Z/nZ)^* for n = p^e with p odd.

    Raises:
        DomainError: If the unit group mod n is not cyclic of odd prime-power type
    """
    f = factorize(n)
    if len(f.factors) != 1 or f.factors[0][0] == 2:
        raise DomainError(f"primitive_root expects an odd prime power, got {n}")
    phi = euler_phi(n)
    prime_divisors = factorize(phi).primes
    for g in range(2, n):
        if gcd(g, n) != 1:
            continue
        if all(pow(g, phi // r, n) != 1 for r in prime_divisors):
            return g
    raise AssertionError(f"no primitive root found mod {n}")


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise DomainError("valuation of 0 is undefined")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v
