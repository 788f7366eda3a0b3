"""
Dirichlet-polynomial surrogate for sums of log|L(1/2 + i t_j, chi)|.

The surrogate is the right-hand side of the conditional upper bound without
its unquantified O(1): a smoothed prime sum, a prime-square sum and the
a (A + 1) log q / log x term. Gaps are recorded, never asserted.
"""
import logging
import math

import numpy as np

from app.core.constants import SurrogateVariant
from app.core.exceptions import DomainError
from app.features.characters.group import CharacterGroup, DirichletCharacter, character_group
from app.features.lfunctions.reference import l_values
from app.features.polynomials.primes import prime_table
from app.schemas.lfunctions import ShiftSpec
from app.schemas.polynomials import SurrogateCensus, SurrogateRow

logger = logging.getLogger(__name__)


def h_values(n: np.ndarray, spec: ShiftSpec) -> np.ndarray:
    """h(n) = (a_1 n^{-i t_1} + ... + a_k n^{-i t_k}) / 2, vectorized over n."""
    log_n = np.log(np.asarray(n, dtype=float))
    out = np.zeros(log_n.shape, dtype=complex)
    for t, a in spec.pairs():
        out += a * np.exp(-1j * t * log_n)
    return out / 2


def h_coeff(n: int, spec: ShiftSpec) -> complex:
    """
    h(n) for a single positive integer.

    Raises:
        DomainError: If n < 1
    """
    if n < 1:
        raise DomainError(f"h_coeff requires n >= 1, got {n}", field="n")
    return complex(h_values(np.array([n]), spec)[0])


def _square_limit(q: int, x: float, variant: SurrogateVariant) -> float:
    limit = math.sqrt(x)
    if variant == SurrogateVariant.NONQUADRATIC:
        limit = min(limit, math.log(q))
    return limit


def _prime_weights(spec: ShiftSpec, x: float, q: int, variant: SurrogateVariant):
    """(primes, linear weights, square primes, square weights) with chi left out."""
    log_x = math.log(x)
    table = prime_table(int(math.floor(x)))
    p = table.primes
    pf = p.astype(float)
    linear = 2 * h_values(p, spec) * pf ** (-0.5 - 1 / log_x) * np.log(x / pf) / log_x
    squares = table.upto(_square_limit(q, x, variant))
    square = h_values(squares.astype(float) ** 2, spec) / squares
    return p, linear, squares, square


def _constant_term(spec: ShiftSpec, q: int, x: float) -> float:
    return spec.a_total * (spec.bound_exponent + 1) * math.log(q) / math.log(x)


def log_l_surrogate(chi: DirichletCharacter, spec: ShiftSpec, x: float,
                    variant: SurrogateVariant = SurrogateVariant.GENERAL) -> float:
    """
    The surrogate upper bound for sum_j a_j log|L(1/2 + i t_j, chi)|.

    Args:
        chi: Primitive character
        spec: Shifts and exponents (A from spec.bound_exponent)
        x: Length of the prime sum, x >= 2
        variant: general (squares up to x^{1/2}) or nonquadratic (up to min(log q, x^{1/2}))

    Returns:
        2 Re sum_{p<=x} h(p) chi(p) p^{-1/2-1/log x} log(x/p)/log x
        + Re sum h(p^2) chi(p^2)/p + a (A + 1) log q / log x

    Raises:
        DomainError: If chi is not primitive or x < 2
    """
    variant = SurrogateVariant(variant)
    if not chi.is_primitive:
        raise DomainError("log_l_surrogate requires a primitive character")
    if x < 2:
        raise DomainError(f"log_l_surrogate requires x >= 2, got {x}", field="x")
    q = chi.q
    p, linear, squares, square = _prime_weights(spec, x, q, variant)
    values = chi.values
    total = np.sum(linear * values[p % q]).real
    total += np.sum(square * values[(squares * squares) % q]).real
    return float(total + _constant_term(spec, q, x))


def _surrogates(group: CharacterGroup, spec: ShiftSpec, x: float, variant: SurrogateVariant) -> np.ndarray:
    q = group.q
    p, linear, squares, square = _prime_weights(spec, x, q, variant)
    weights = np.zeros(q, dtype=complex)
    np.add.at(weights, p % q, linear)
    np.add.at(weights, (squares * squares) % q, square)
    return group.transform(weights).real + _constant_term(spec, q, x)


def surrogate_gap_census(q: int, spec: ShiftSpec, x: float,
                         variant: SurrogateVariant = SurrogateVariant.GENERAL) -> SurrogateCensus:
    """
    surrogate - sum_j a_j log|L(1/2 + i t_j, chi)| over every primitive chi mod q.

    Raises:
        DomainError: If q has no primitive characters or x < 2
    """
    variant = SurrogateVariant(variant)
    if x < 2:
        raise DomainError(f"surrogate_gap_census requires x >= 2, got {x}", field="x")
    group = character_group(q)
    mask = group.primitive_mask
    if not mask.any():
        raise DomainError(f"no primitive characters mod {q}", field="q")

    surrogate = _surrogates(group, spec, x, variant)
    log_sum = np.zeros(group.size)
    for t, a in spec.pairs():
        log_sum += a * np.log(np.abs(l_values(group, complex(0.5, t))))

    indices = np.flatnonzero(mask)
    gaps = surrogate[indices] - log_sum[indices]
    rows = [
        SurrogateRow(q=q, index=int(i), x=x, surrogate=float(surrogate[i]),
                     log_l_sum=float(log_sum[i]), gap=float(surrogate[i] - log_sum[i]))
        for i in indices
    ]
    logger.info(f"Surrogate census q={q} x={x:g} ({variant.value}): {indices.size} characters, "
                f"gap in [{gaps.min():.4f}, {gaps.max():.4f}]")
    return SurrogateCensus(
        q=q, x=x, variant=variant, count=int(indices.size),
        min_gap=float(gaps.min()), max_gap=float(gaps.max()),
        mean_gap=float(gaps.mean()), median_gap=float(np.median(gaps)), rows=rows
    )


def pit_ratio(chi: DirichletCharacter, x: float, t0: float = 0.0) -> float:
    """
    |sum_{p<=x} chi(p) p^{-i t0} log p| / (sqrt(x) log(2q(x + |t0|))^2).

    The conditional prime-sum bound predicts this stays O(1); it is recorded only.

    Raises:
        DomainError: For the principal character or x < 2
    """
    if chi.is_principal:
        raise DomainError("pit_ratio requires a non-principal character")
    if x < 2:
        raise DomainError(f"pit_ratio requires x >= 2, got {x}", field="x")
    p = prime_table(int(math.floor(x))).primes
    log_p = np.log(p.astype(float))
    total = np.sum(chi.values[p % chi.q] * np.exp(-1j * t0 * log_p) * log_p)
    scale = math.sqrt(x) * math.log(2 * chi.q * (x + abs(t0))) ** 2
    return float(abs(total) / scale)
