"""
Mollifier schedule and the short Dirichlet polynomials P_{j,x} and N_{j,x}.

Scales: c_0 = 0, c_j = e^j / (log log q)^2, P_j = q^{c_j}, K_j = c_j^{-3/4}, and
R the largest j with P_R <= q^delta. P_{j,x} sums chi(p) a_x(p) p^{-s} over
primes in (P_{j-1}, P_j] (plus chi(p^2)/(2 p^{2s}) over p <= log q when j = 1);
N_{j,x} is its exponential truncated at degree D_j = floor(100 a*^2 K_j).
"""
import logging
import math
from typing import Optional

import numpy as np

from app.core.config import settings
from app.core.exceptions import DomainError
from app.features.characters.group import CharacterGroup, DirichletCharacter
from app.features.polynomials.primes import prime_table
from app.schemas.lfunctions import ShiftSpec
from app.schemas.polynomials import MollifierSchedule

logger = logging.getLogger(__name__)

# delta below exp(-THEORETICAL_FACTOR * a*) is the regime of the asymptotic argument
THEORETICAL_FACTOR = 1000.0

# Floating slack when comparing log P_j with delta log q
_SCALE_SLACK = 1e-12


def mollifier_schedule(q: int, delta: Optional[float] = None, spec: Optional[ShiftSpec] = None,
                       log_delta: Optional[float] = None, threshold_scale: float = 1.0) -> MollifierSchedule:
    """
    Build the scale schedule of the mollifier.

    Args:
        q: Modulus, at least SCHEDULE_MIN_MODULUS
        delta: Exponent in P_R <= q^delta, 0 < delta < 1; defaults to MOLLIFIER_DELTA
        spec: Shifts and exponents (only a* is used)
        log_delta: log delta, for exponents too small for a double (e.g. e^{-2000})
        threshold_scale: Multiplier on the good-set thresholds K_j (diagnostic override)

    Returns:
        MollifierSchedule; R may be 0

    Raises:
        DomainError: If q is too small or delta is outside (0, 1)
    """
    if spec is None:
        raise DomainError("mollifier_schedule requires a shift spec", field="spec")
    if q < settings.SCHEDULE_MIN_MODULUS:
        raise DomainError(
            f"mollifier_schedule requires q >= {settings.SCHEDULE_MIN_MODULUS}, got {q}", field="q"
        )
    if log_delta is None:
        delta = settings.MOLLIFIER_DELTA if delta is None else delta
        if not 0 < delta < 1:
            raise DomainError(f"mollifier_schedule requires 0 < delta < 1, got {delta}", field="delta")
        log_delta = math.log(delta)
    elif not log_delta < 0:
        raise DomainError(f"mollifier_schedule requires log delta < 0, got {log_delta}", field="log_delta")
    if threshold_scale <= 0:
        raise DomainError("threshold_scale must be positive", field="threshold_scale")

    loglog_sq = math.log(math.log(q)) ** 2
    log_loglog_sq = math.log(loglog_sq)

    # c_j <= delta  <=>  j <= log delta + log (log log q)^2
    R = max(0, math.floor(log_delta + log_loglog_sq))
    while R > 0 and R - log_loglog_sq > log_delta + _SCALE_SLACK:
        R -= 1
    while R + 1 - log_loglog_sq <= log_delta - _SCALE_SLACK:
        R += 1

    c = (0.0,) + tuple(math.exp(j) / loglog_sq for j in range(1, R + 2))
    K = tuple(c[j] ** -0.75 for j in range(1, R + 1))
    a_star = spec.a_star
    degrees = tuple(max(1, math.floor(100 * a_star ** 2 * k)) for k in K)
    theoretical = log_delta < -THEORETICAL_FACTOR * a_star

    schedule = MollifierSchedule(
        q=q, log_delta=log_delta, a_star=a_star, loglog_sq=loglog_sq, c=c, K=K,
        thresholds=tuple(k * threshold_scale for k in K), degrees=degrees, R=R,
        theoretical_regime=theoretical
    )
    logger.debug(f"Schedule q={q} log(delta)={log_delta:.4f}: R={R}, K={K}, D={degrees}")
    return schedule


def _check_index(j: int, sched: MollifierSchedule) -> None:
    if not 1 <= j <= sched.R:
        raise DomainError(f"scale index j={j} outside 1..{sched.R}", field="j")


def smoothing_weights(primes: np.ndarray, x: float) -> np.ndarray:
    """a_x(p) = log(x/p) p^{-1/log x} / log x."""
    log_x = math.log(x)
    p = np.asarray(primes, dtype=float)
    return np.log(x / p) * p ** (-1.0 / log_x) / log_x


def scale_primes(j: int, sched: MollifierSchedule) -> np.ndarray:
    """Primes in (P_{j-1}, P_j]."""
    _check_index(j, sched)
    upper = sched.P(j)
    table = prime_table(int(math.floor(upper)))
    return table.between(sched.P(j - 1), upper) if j > 1 else table.upto(upper)


def square_primes(sched: MollifierSchedule) -> np.ndarray:
    """Primes p <= log q carried by the prime-square part of P_{1,x}."""
    return prime_table(max(2, int(math.floor(sched.log_q)))).upto(sched.log_q)


def _terms(j: int, x: float, s: complex, sched: MollifierSchedule):
    """(residues, coefficients) with P_{j,x}(s, chi) = sum chi(residue) * coefficient."""
    if x < 2:
        raise DomainError(f"polynomial length x must be >= 2, got {x}", field="x")
    s = complex(s)
    p = scale_primes(j, sched)
    coeffs = smoothing_weights(p, x) * np.exp(-s * np.log(p.astype(float)))
    residues = p
    if j == 1:
        sq = square_primes(sched)
        sq_coeffs = 0.5 * np.exp(-2 * s * np.log(sq.astype(float)))
        residues = np.concatenate([p, sq * sq])
        coeffs = np.concatenate([coeffs, sq_coeffs])
    return residues, coeffs


def p_poly(j: int, x: float, s: complex, chi: DirichletCharacter, sched: MollifierSchedule) -> complex:
    """
    P_{j,x}(s, chi) by direct summation.

    Raises:
        DomainError: If j is outside 1..R or x < 2
    """
    residues, coeffs = _terms(j, x, s, sched)
    return complex(np.sum(chi.values[residues % chi.q] * coeffs))


def p_poly_all(j: int, x: float, s: complex, group: CharacterGroup, sched: MollifierSchedule) -> np.ndarray:
    """P_{j,x}(s, chi) for every character of the group, in enumeration order."""
    residues, coeffs = _terms(j, x, s, sched)
    weights = np.zeros(group.q, dtype=complex)
    np.add.at(weights, residues % group.q, coeffs)
    return group.transform(weights)


def truncated_exp(z, degree: int):
    """sum_{n=0}^{degree} z^n / n!, elementwise."""
    z = np.asarray(z, dtype=complex)
    term = np.ones_like(z)
    total = np.ones_like(z)
    for n in range(1, degree + 1):
        term = term * z / n
        total = total + term
    return total


def n_poly(j: int, x: float, s: complex, chi: DirichletCharacter, beta: float,
           sched: MollifierSchedule) -> complex:
    """
    N_{j,x}(s, chi; beta) = sum_{n=0}^{D_j} beta^n P_{j,x}(s, chi)^n / n!.

    The constant term is included so that N tends to exp(beta P) as P -> 0.

    Raises:
        DomainError: If j is outside 1..R
    """
    value = p_poly(j, x, s, chi, sched)
    return complex(truncated_exp(beta * value, sched.degree(j)))


def n_product(x: float, s: complex, chi: DirichletCharacter, beta: float, sched: MollifierSchedule) -> complex:
    """prod_{j<=R} N_{j,x}(s, chi; beta); 1 when R = 0."""
    total = 1 + 0j
    for j in range(1, sched.R + 1):
        total *= n_poly(j, x, s, chi, beta, sched)
    return total


def good_set_polynomials(group: CharacterGroup, spec: ShiftSpec, sched: MollifierSchedule) -> np.ndarray:
    """
    P_{j,P_R}(1/2 + i t_m, chi) for every character.

    Returns:
        Complex array of shape (R, k, size)
    """
    out = np.zeros((sched.R, spec.k, group.size), dtype=complex)
    if sched.R == 0:
        return out
    x = sched.P(sched.R)
    for j in range(1, sched.R + 1):
        for m, t in enumerate(spec.t):
            out[j - 1, m] = p_poly_all(j, x, complex(0.5, t), group, sched)
    return out


def tk_mask(group: CharacterGroup, spec: ShiftSpec, sched: MollifierSchedule,
            polynomials: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Membership in the good set for every character of the group.

    Only primitive characters can be members.
    """
    if polynomials is None:
        polynomials = good_set_polynomials(group, spec, sched)
    inside = np.ones(group.size, dtype=bool)
    for j in range(sched.R):
        inside &= np.all(np.abs(polynomials[j]) <= sched.thresholds[j], axis=0)
    return inside & group.primitive_mask


def tk_membership(chi: DirichletCharacter, spec: ShiftSpec, sched: MollifierSchedule) -> bool:
    """True iff |P_{j,P_R}(1/2 + i t_m, chi)| <= K_j for every j <= R and every m."""
    if sched.R == 0:
        return True
    x = sched.P(sched.R)
    for j in range(1, sched.R + 1):
        for t in spec.t:
            if abs(p_poly(j, x, complex(0.5, t), chi, sched)) > sched.thresholds[j - 1]:
                return False
    return True
