"""
Coefficient systems of the mollifier polynomials.

With a_x(p) = log(x/p) p^{-1/log x} / log x:

  g_x(p^r; a) = a^r a_x(p)^r / r!
  h_x(p^r; a) = g_x(p^r; a) + [p <= log q] sum_{1<=u<=r/2} a^{r-2u} a_x(p)^{r-2u} / (2^u u! (r-2u)!)
  f_x(n; a)   = coefficients of N_{j,x}(s, chi; a)
  c_j(n)      = 1 iff n is a product of at most D_j admissible factors

b is the k-fold convolution of f(.; a_m) n^{-i t_m}; b' and b'' replace f by
its multiplicative majorant (h for j = 1, g otherwise), b'' without the twist.
q and r are the self-convolutions of b at exponents (a - 1)/2 and a/2.
"""
import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np

from app.core.config import settings
from app.core.constants import CoefficientFlavor
from app.core.exceptions import DomainError, ResourceError
from app.features.polynomials.mollifier import scale_primes, smoothing_weights, square_primes
from app.features.polynomials.primes import prime_table
from app.schemas.lfunctions import ShiftSpec
from app.schemas.polynomials import CoefficientVector, MollifierSchedule
from app.utils.dirichlet import dirichlet_convolve, twist, unit_series

logger = logging.getLogger(__name__)

LocalFactor = Callable[[int, float, int], np.ndarray]


def _multiplicative(length: int, primes: np.ndarray, weights: np.ndarray, local: LocalFactor) -> np.ndarray:
    """
    Dense multiplicative function supported on `primes`.

    local(p, a_x(p), rmax) returns the values at p^1..p^rmax.
    """
    out = np.ones(length + 1)
    out[0] = 0.0
    allowed = {int(p): float(w) for p, w in zip(primes, weights)}
    for p in prime_table(length).primes:
        p = int(p)
        view = out[p::p]
        if p not in allowed:
            view[:] = 0.0
            continue
        rmax = 1
        while p ** (rmax + 1) <= length:
            rmax += 1
        values = local(p, allowed[p], rmax)
        factor = np.ones(view.size)
        step = 1
        for r in range(1, rmax + 1):
            factor[step - 1::step] = values[r - 1]
            step *= p
        view *= factor
    return out


def _g_local(beta: float) -> LocalFactor:
    def local(p: int, a: float, rmax: int) -> np.ndarray:
        return np.array([(beta * a) ** r / math.factorial(r) for r in range(1, rmax + 1)])
    return local


def _h_local(beta: float, log_q: float) -> LocalFactor:
    g = _g_local(beta)

    def local(p: int, a: float, rmax: int) -> np.ndarray:
        values = g(p, a, rmax)
        if p > log_q:
            return values
        for r in range(2, rmax + 1):
            values[r - 1] += sum(
                (beta * a) ** (r - 2 * u) / (2 ** u * math.factorial(u) * math.factorial(r - 2 * u))
                for u in range(1, r // 2 + 1)
            )
        return values
    return local


def _check_length(length: int) -> None:
    if length < 1:
        raise DomainError(f"coefficient length must be >= 1, got {length}", field="length")
    if length > settings.MAX_COEFFICIENT_LENGTH:
        raise ResourceError("coefficient length", length, settings.MAX_COEFFICIENT_LENGTH)


def _range(j: int, x: float, sched: MollifierSchedule):
    if x < 2:
        raise DomainError(f"polynomial length x must be >= 2, got {x}", field="x")
    primes = scale_primes(j, sched)
    return primes, smoothing_weights(primes, x)


def g_coeffs(j: int, x: float, beta: float, length: int, sched: MollifierSchedule) -> np.ndarray:
    """g_x(n; beta) for n supported on the primes of scale j."""
    primes, weights = _range(j, x, sched)
    return _multiplicative(length, primes, weights, _g_local(beta))


def h_coeffs(j: int, x: float, beta: float, length: int, sched: MollifierSchedule) -> np.ndarray:
    """h_x(n; beta) for n supported on the primes of scale j."""
    primes, weights = _range(j, x, sched)
    return _multiplicative(length, primes, weights, _h_local(beta, sched.log_q))


def p_coeffs(j: int, x: float, length: int, sched: MollifierSchedule) -> np.ndarray:
    """Coefficients of P_{j,x}: a_x(p) at primes of scale j, 1/2 at p^2 for p <= log q when j = 1."""
    primes, weights = _range(j, x, sched)
    out = np.zeros(length + 1)
    keep = primes <= length
    out[primes[keep]] = weights[keep]
    if j == 1:
        sq = square_primes(sched) ** 2
        out[sq[sq <= length]] += 0.5
    return out


def f_coeffs(j: int, x: float, beta: float, length: int, sched: MollifierSchedule) -> np.ndarray:
    """
    Coefficients of N_{j,x}(s, chi; beta): sum_{r<=D_j} beta^r P^{*r} / r!, truncated at `length`.

    Powers of P stop early once they have no entries below `length`.
    """
    base = p_coeffs(j, x, length, sched)
    out = unit_series(length)
    term = unit_series(length)
    for r in range(1, sched.degree(j) + 1):
        term = dirichlet_convolve(term, base, length) * (beta / r)
        if not term.any():
            break
        out = out + term
    return out


def c_indicator(j: int, length: int, sched: MollifierSchedule) -> np.ndarray:
    """
    c_j(n): 1 iff n is a product of at most D_j factors from the scale.

    For j = 1 a factor is a prime <= P_1 or the square of a prime <= log q;
    otherwise a factor is a prime in (P_{j-1}, P_j].
    """
    primes = scale_primes(j, sched)
    in_range = {int(p) for p in primes}
    squares = {int(p) for p in square_primes(sched)} if j == 1 else set()
    count = np.zeros(length + 1, dtype=np.int64)
    supported = np.ones(length + 1, dtype=bool)
    supported[0] = False

    for p in prime_table(length).primes:
        p = int(p)
        single, square = p in in_range, p in squares
        if not (single or square):
            supported[p::p] = False
            continue
        odd_power = np.zeros(length + 1, dtype=bool) if not single else None
        pe, e = p, 1
        while pe <= length:
            if single and square:
                increment = e % 2
            elif square:
                increment = 1 - e % 2
            else:
                increment = 1
            count[pe::pe] += increment
            if odd_power is not None:
                odd_power[pe::pe] ^= True
            pe, e = pe * p, e + 1
        if not single:
            # a prime usable only through its square must occur to an even power
            supported &= ~odd_power

    return (supported & (count <= sched.degree(j))).astype(float)


def _b_family(j: int, x: float, weights: Sequence[float], shifts: Optional[Sequence[float]],
              length: int, sched: MollifierSchedule, majorant: bool) -> np.ndarray:
    out = unit_series(length, dtype=complex)
    for m, beta in enumerate(weights):
        if majorant:
            base = h_coeffs(j, x, beta, length, sched) if j == 1 else g_coeffs(j, x, beta, length, sched)
        else:
            base = f_coeffs(j, x, beta, length, sched)
        if shifts is not None:
            base = twist(base, shifts[m])
        out = dirichlet_convolve(out, base, length)
    return out


def b_coeffs(j: int, x: float, weights: Sequence[float], shifts: Sequence[float], length: int,
             sched: MollifierSchedule) -> np.ndarray:
    """b: coefficients of prod_m N_{j,x}(s + i t_m, chi; a_m)."""
    return _b_family(j, x, weights, shifts, length, sched, majorant=False)


def mollifier_coeffs(j: int, x: float, spec: ShiftSpec, length: int, flavor: CoefficientFlavor,
                     sched: MollifierSchedule, beta: Optional[float] = None) -> CoefficientVector:
    """
    One coefficient system of scale j, as a dense vector.

    Args:
        j: Scale index, 1 <= j <= R
        x: Length parameter of the smoothing weights (P_R in the moment split)
        spec: Shifts t and exponents a
        length: Largest n stored, at most MAX_COEFFICIENT_LENGTH
        flavor: Which system
        sched: Mollifier schedule
        beta: Exponent of the single-variable systems g, h, f; defaults to a_1

    Returns:
        CoefficientVector (real for g, h, f, c and b''; complex otherwise)

    Raises:
        DomainError: If j is outside 1..R or x < 2
        ResourceError: If length exceeds MAX_COEFFICIENT_LENGTH
    """
    flavor = CoefficientFlavor(flavor)
    _check_length(length)
    if not 1 <= j <= sched.R:
        raise DomainError(f"scale index j={j} outside 1..{sched.R}", field="j")
    beta = spec.a[0] if beta is None else beta

    if flavor == CoefficientFlavor.G:
        values = g_coeffs(j, x, beta, length, sched)
    elif flavor == CoefficientFlavor.H:
        values = h_coeffs(j, x, beta, length, sched)
    elif flavor == CoefficientFlavor.F:
        values = f_coeffs(j, x, beta, length, sched)
    elif flavor == CoefficientFlavor.C:
        values = c_indicator(j, length, sched)
    elif flavor == CoefficientFlavor.B:
        values = b_coeffs(j, x, spec.a, spec.t, length, sched)
    elif flavor == CoefficientFlavor.B_PRIME:
        values = _b_family(j, x, spec.a, spec.t, length, sched, majorant=True)
    elif flavor == CoefficientFlavor.B_DOUBLE_PRIME:
        values = _b_family(j, x, spec.a, None, length, sched, majorant=True).real
    else:
        halves = [(a - 1) / 2 for a in spec.a] if flavor == CoefficientFlavor.Q else [a / 2 for a in spec.a]
        b = b_coeffs(j, x, halves, spec.t, length, sched)
        values = dirichlet_convolve(b, b, length)

    logger.debug(f"Coefficients {flavor.value} j={j} length={length}: {np.count_nonzero(values[1:])} nonzero")
    return CoefficientVector(flavor=flavor, j=j, length=length, values=values)
