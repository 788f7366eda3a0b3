"""
Prime tables and the Mertens-type prime sums.

Small tables come from a plain Eratosthenes sieve; anything above a few
million is produced by an odd-only segmented sieve that streams one segment
of primes at a time, so that sums up to 10^8 never hold the full table.
"""
import logging
import math
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence

import numpy as np

from app.core.config import settings
from app.core.constants import MEISSEL_MERTENS, PrimeSumKind
from app.core.exceptions import DomainError, ResourceError
from app.features.special.functions import log_abs_zeta_shift
from app.schemas.polynomials import PrimeSumResult, PrimeTable

logger = logging.getLogger(__name__)

# Tables below this limit are sieved in one piece
_DIRECT_SIEVE_LIMIT = 1 << 23


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit by the sieve of Eratosthenes."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p: limit + 1: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def stream_primes(limit: int, segment_size: Optional[int] = None) -> Iterator[np.ndarray]:
    """
    Yield the primes <= limit in ascending blocks.

    Odd numbers only are sieved; each block covers 2 * segment_size integers.

    Args:
        limit: Upper bound (inclusive)
        segment_size: Odd numbers per segment; defaults to PRIME_SEGMENT_SIZE

    Raises:
        ResourceError: If limit exceeds MAX_PRIME_LIMIT
    """
    if limit > settings.MAX_PRIME_LIMIT:
        raise ResourceError("prime limit", limit, settings.MAX_PRIME_LIMIT)
    if limit < 2:
        return
    segment_size = segment_size or settings.PRIME_SEGMENT_SIZE
    base = simple_sieve(math.isqrt(limit) + 1)[1:]

    yield np.array([2], dtype=np.int64)
    span = 2 * segment_size
    low = 3
    while low <= limit:
        high = min(low + span, limit + 1)
        odd_count = (high - low + 1) // 2
        mask = np.ones(odd_count, dtype=bool)
        for p in base:
            p = int(p)
            p2 = p * p
            if p2 >= high:
                break
            start = max(p2, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start >= high:
                continue
            mask[(start - low) // 2::p] = False
        block = low + 2 * np.flatnonzero(mask).astype(np.int64)
        yield block[block <= limit]
        low = high if high % 2 == 1 else high + 1


@lru_cache(maxsize=16)
def prime_table(limit: int) -> PrimeTable:
    """
    All primes up to `limit`.

    Args:
        limit: Table bound, at most MAX_PRIME_LIMIT

    Returns:
        Cached PrimeTable with a read-only prime array

    Raises:
        ResourceError: If limit exceeds MAX_PRIME_LIMIT
    """
    limit = int(limit)
    if limit > settings.MAX_PRIME_LIMIT:
        raise ResourceError("prime limit", limit, settings.MAX_PRIME_LIMIT)
    if limit <= _DIRECT_SIEVE_LIMIT:
        primes = simple_sieve(limit)
    else:
        primes = np.concatenate(list(stream_primes(limit)))
    primes.flags.writeable = False
    logger.debug(f"Prime table up to {limit}: {primes.size} primes")
    return PrimeTable(limit=limit, primes=primes)


def _main_term(kind: PrimeSumKind, x: float, alpha: float) -> float:
    if kind == PrimeSumKind.RECIPROCAL:
        return math.log(math.log(x)) + MEISSEL_MERTENS
    if kind == PrimeSumKind.LOG_OVER_P:
        return math.log(x)
    return log_abs_zeta_shift(alpha, x)


def _terms(kind: PrimeSumKind, primes: np.ndarray, alpha: float) -> np.ndarray:
    p = primes.astype(float)
    if kind == PrimeSumKind.RECIPROCAL:
        return 1.0 / p
    if kind == PrimeSumKind.LOG_OVER_P:
        return np.log(p) / p
    return np.cos(alpha * np.log(p)) / p


def prime_sum(kind: PrimeSumKind, x: float, alpha: float = 0.0) -> PrimeSumResult:
    """
    A direct Mertens-type prime sum and its residual against the main term.

    reciprocal: sum 1/p vs log log x + b_1; log_over_p: sum log p / p vs log x;
    cosine: sum cos(alpha log p)/p vs log |zeta(1 + 1/log x + i alpha)|.

    Args:
        kind: Which sum
        x: Bound, 2 <= x <= MAX_PRIME_LIMIT
        alpha: Frequency, used only for the cosine sum

    Raises:
        DomainError: If x < 2
        ResourceError: If x exceeds the prime limit
    """
    kind = PrimeSumKind(kind)
    if x < 2:
        raise DomainError(f"prime_sum requires x >= 2, got {x}", field="x")
    limit = int(math.floor(x))
    if limit <= _DIRECT_SIEVE_LIMIT:
        value = math.fsum(_terms(kind, prime_table(limit).primes, alpha))
    else:
        value = math.fsum(math.fsum(_terms(kind, block, alpha)) for block in stream_primes(limit))
    main = _main_term(kind, x, alpha)
    return PrimeSumResult(kind=kind, x=x, alpha=alpha, value=value, main_term=main, residual=value - main)


@lru_cache(maxsize=4)
def meissel_mertens_constant(limit: int = 10 ** 8) -> float:
    """
    b_1 estimated as sum_{p <= limit} 1/p - log log limit.

    The sum is streamed segment by segment.
    """
    if limit < 3:
        raise DomainError(f"meissel_mertens_constant requires limit >= 3, got {limit}", field="limit")
    total = math.fsum(math.fsum(1.0 / block.astype(float)) for block in stream_primes(limit))
    estimate = total - math.log(math.log(limit))
    logger.info(f"Meissel-Mertens estimate at {limit:g}: {estimate:.10f}")
    return estimate


def cosine_residual_table(xs: Sequence[float], alphas: Sequence[float]) -> np.ndarray:
    """
    Residuals sum_{p <= x} cos(alpha log p)/p - log|zeta(1 + 1/log x + i alpha)| on a grid.

    One prime table up to max(xs) serves every (x, alpha) through cumulative sums.

    Returns:
        Array of shape (len(xs), len(alphas))
    """
    xs = [float(x) for x in xs]
    alphas = np.asarray(alphas, dtype=float)
    if not xs or alphas.size == 0:
        raise DomainError("cosine_residual_table needs at least one x and one alpha")
    if min(xs) < 2:
        raise DomainError("cosine_residual_table requires every x >= 2", field="x")
    table = prime_table(int(max(xs)))
    p = table.primes.astype(float)
    cumulative = np.cumsum(np.cos(np.outer(alphas, np.log(p))) / p, axis=1)

    out = np.empty((len(xs), alphas.size))
    for i, x in enumerate(xs):
        count = table.upto(x).size
        partial = cumulative[:, count - 1]
        out[i] = partial - np.array([log_abs_zeta_shift(a, x) for a in alphas])
    return out


def cosine_sums(xs: Sequence[float], alphas: Sequence[float]) -> List[PrimeSumResult]:
    """
    Cosine prime sums for every (x, alpha), x-major.

    Grids up to the direct-sieve limit share one table through
    cosine_residual_table; larger bounds are streamed point by point.
    """
    xs = [float(x) for x in xs]
    alphas = [float(a) for a in alphas]
    if xs and max(xs) > _DIRECT_SIEVE_LIMIT:
        return [prime_sum(PrimeSumKind.COSINE, x, a) for x in xs for a in alphas]
    residuals = cosine_residual_table(xs, alphas)
    results = []
    for i, x in enumerate(xs):
        for j, alpha in enumerate(alphas):
            main = log_abs_zeta_shift(alpha, x)
            residual = float(residuals[i, j])
            results.append(PrimeSumResult(kind=PrimeSumKind.COSINE, x=x, alpha=alpha,
                                          value=residual + main, main_term=main, residual=residual))
    return results
