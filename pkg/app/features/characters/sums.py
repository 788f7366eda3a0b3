"""
Gauss sums, hyper-Kloosterman sums and the character counting identities.
"""
import logging
from math import gcd, prod
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import DomainError, InternalError, ResourceError
from app.features.characters.arithmetic import divisor_count_k, divisors, euler_phi, mobius
from app.features.characters.group import (
    CharacterGroup,
    DirichletCharacter,
    character_group,
    unit_roots,
)

logger = logging.getLogger(__name__)

# Character sums are integers; anything further from an integer is a bug
INTEGER_TOLERANCE = 1e-6


def gauss_sum(chi: DirichletCharacter) -> complex:
    """
    tau(chi) = sum_{n=1}^{q} chi(n) e(n/q) by direct summation.

    Args:
        chi: Any character

    Returns:
        The Gauss sum as a complex double
    """
    q = chi.q
    phases = unit_roots(q)
    # residue 0 stands for n = q
    return complex(np.dot(chi.values, phases))


def gauss_sums(group: CharacterGroup) -> np.ndarray:
    """Gauss sums of every character of the group, in enumeration order."""
    return group.transform(np.asarray(unit_roots(group.q)))


def gauss_conjugation_residual(chi: DirichletCharacter) -> float:
    """|conj(tau(chi)) - chi(-1) tau(conj chi)|; zero for every character."""
    sign = 1.0 if chi.parity == 0 else -1.0
    return abs(gauss_sum(chi).conjugate() - sign * gauss_sum(chi.conjugate()))


def weil_bound(k: int, q: int) -> float:
    """d_k(q) q^{(k-1)/2}; d_2 = d is the classical Kloosterman case."""
    return divisor_count_k(q, k) * q ** ((k - 1) / 2)


def kloosterman_sum(k: int, v: int, q: int, max_tuples: Optional[int] = None) -> complex:
    """
    Hyper-Kloosterman sum S_k(v, q) = sum over unit tuples with x_1...x_k = v of e((x_1+...+x_k)/q).

    The first k-1 coordinates run over all units; the last is forced to
    v (x_1...x_{k-1})^{-1}. Totals are histogrammed mod q before the phase sum.

    Args:
        k: Number of variables, k >= 1
        v: Integer coprime to q
        q: Modulus
        max_tuples: Cap on phi(q)^{k-1}; defaults to KLOOSTERMAN_MAX_TUPLES

    Returns:
        S_k(v, q)

    Raises:
        DomainError: If k < 1, q < 1 or gcd(v, q) > 1
        ResourceError: If phi(q)^{k-1} exceeds the cap
    """
    if k < 1 or q < 1:
        raise DomainError(f"kloosterman_sum requires k >= 1 and q >= 1, got k={k}, q={q}")
    if gcd(v, q) != 1:
        raise DomainError(f"kloosterman_sum requires gcd(v, q) = 1, got v={v}, q={q}", field="v")
    cap = max_tuples if max_tuples is not None else settings.KLOOSTERMAN_MAX_TUPLES
    phi = euler_phi(q)
    tuples = phi ** (k - 1)
    if tuples > cap:
        raise ResourceError("Kloosterman tuple count", tuples, cap)

    group = character_group(q)
    units = group.unit_residues
    inverse = np.zeros(q, dtype=np.int64)
    inverse[units] = [pow(int(u), -1, q) if q > 1 else 0 for u in units]

    products = np.ones(1, dtype=np.int64) % q
    totals = np.zeros(1, dtype=np.int64)
    for _ in range(k - 1):
        products = (products[:, None] * units[None, :] % q).ravel()
        totals = ((totals[:, None] + units[None, :]) % q).ravel()
    last = (v % q) * inverse[products] % q
    totals = (totals + last) % q

    counts = np.bincount(totals, minlength=q).astype(float)
    return complex(counts @ unit_roots(q))


def _root_sum(numerators: np.ndarray, denominator: int) -> complex:
    counts = np.bincount(numerators, minlength=denominator).astype(float)
    return complex(counts @ unit_roots(denominator))


def _as_integer(value: complex, what: str) -> int:
    nearest = round(value.real)
    if abs(value - nearest) > INTEGER_TOLERANCE:
        raise InternalError(f"{what} is not an integer: {value}", details={"value": str(value)})
    return int(nearest)


def orthogonality_sum(q: int, n: int) -> int:
    """
    sum_{chi mod q} chi(n), by direct summation over the group.

    Raises:
        DomainError: If gcd(n, q) > 1
        InternalError: If the sum is not phi(q) [n = 1 mod q]
    """
    if gcd(n, q) != 1:
        raise DomainError(f"orthogonality_sum requires gcd(n, q) = 1, got n={n}, q={q}", field="n")
    group = character_group(q)
    total = _as_integer(_root_sum(group.angle_numerators(n), group.exponent), "orthogonality sum")
    expected = euler_phi(q) if n % q == 1 % q else 0
    if total != expected:
        raise InternalError(f"orthogonality sum mod {q} at {n} is {total}, expected {expected}")
    return total


def primitive_orthogonality_formula(q: int, a: int) -> int:
    """sum_{c | (q, a-1)} mu(q/c) phi(c)."""
    g = gcd(q, a - 1)
    return sum(mobius(q // c) * euler_phi(c) for c in divisors(g))


def primitive_orthogonality_sum(q: int, a: int) -> int:
    """
    sum of chi(a) over primitive chi mod q, by direct summation.

    The direct value is compared with the divisor formula and must agree.

    Raises:
        DomainError: If gcd(a, q) > 1
        InternalError: If the direct sum and the divisor formula disagree
    """
    if gcd(a, q) != 1:
        raise DomainError(f"primitive_orthogonality_sum requires gcd(a, q) = 1, got a={a}, q={q}", field="a")
    group = character_group(q)
    nums = group.angle_numerators(a)[group.primitive_mask]
    direct = _as_integer(_root_sum(nums, group.exponent), "primitive orthogonality sum")
    formula = primitive_orthogonality_formula(q, a)
    if direct != formula:
        raise InternalError(
            f"primitive orthogonality mod {q} at {a}: direct {direct} != formula {formula}",
            details={"direct": direct, "formula": formula}
        )
    return direct


def product_orthogonality(q: int, polynomials: Sequence[Mapping[int, complex]]) -> Tuple[float, float]:
    """
    Both sides of the multiplicative split of a character mean square.

    For A_j(chi) = sum_n a_j(n) chi(n) with pairwise coprime supports whose
    largest elements multiply to less than q,
    sum_chi prod_j |A_j(chi)|^2 = phi(q) prod_j (phi(q)^{-1} sum_chi |A_j(chi)|^2).

    Args:
        q: Modulus
        polynomials: Coefficient maps n -> a_j(n)

    Returns:
        (left side, right side)

    Raises:
        DomainError: If supports are not coprime to q and to each other, or too long
    """
    if not polynomials:
        raise DomainError("product_orthogonality needs at least one polynomial")
    supports = [sorted(n for n, c in poly.items() if c != 0) for poly in polynomials]
    if any(not s for s in supports):
        raise DomainError("every polynomial needs a nonempty support")
    for s in supports:
        if any(n < 1 or gcd(n, q) != 1 for n in s):
            raise DomainError("supports must consist of positive integers coprime to q")
    for i, si in enumerate(supports):
        for sj in supports[i + 1:]:
            if any(gcd(m, n) != 1 for m in si for n in sj):
                raise DomainError("supports must be pairwise coprime")
    if prod(s[-1] for s in supports) >= q:
        raise DomainError("product of support maxima must be below q")

    group = character_group(q)
    weights = np.zeros((q, len(polynomials)), dtype=complex)
    for j, poly in enumerate(polynomials):
        for n, c in poly.items():
            weights[n % q, j] += c
    values = np.abs(group.transform(weights)) ** 2
    phi = euler_phi(q)
    lhs = float(np.prod(values, axis=1).sum())
    rhs = float(phi * np.prod(values.sum(axis=0) / phi))
    return lhs, rhs
