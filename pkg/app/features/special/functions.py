"""
Complex Gamma, Riemann zeta and Hurwitz zeta in double precision.

Gamma comes from scipy's complex log-Gamma (reflection plus Stirling series).
Zeta and Hurwitz zeta use Euler-Maclaurin summation with shift
N = shift + ceil(|Im s|) and M Bernoulli corrections; the Hurwitz routine is
vectorized over the parameter so that a whole residue table costs one call.
"""
import logging
import math
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy import special

from app.core.exceptions import DomainError, PoleError
from app.schemas.lfunctions import EvalOptions

logger = logging.getLogger(__name__)

ArrayLike = Union[float, complex, np.ndarray]

MAX_ZETA_HEIGHT = 1.0e4


@lru_cache(maxsize=8)
def _bernoulli_coefficients(terms: int) -> np.ndarray:
    """B_{2j} / (2j)! for j = 1..terms+1 (one extra for the tail estimate)."""
    b = special.bernoulli(2 * terms + 2)
    coeffs = np.array([b[2 * j] / math.factorial(2 * j) for j in range(1, terms + 2)])
    coeffs.flags.writeable = False
    return coeffs


def _check_gamma_argument(s: np.ndarray) -> None:
    real_int = (s.imag == 0) & (s.real <= 0) & (s.real == np.round(s.real))
    if np.any(real_int):
        raise PoleError("Gamma", complex(s[real_int].ravel()[0]))


def log_gamma(s: ArrayLike) -> ArrayLike:
    """
    Principal branch of log Gamma(s) for complex s.

    Raises:
        PoleError: At nonpositive integers
    """
    arr = np.asarray(s, dtype=complex)
    _check_gamma_argument(arr)
    out = special.loggamma(arr)
    return complex(out) if np.ndim(s) == 0 else out


def complex_gamma(s: ArrayLike) -> ArrayLike:
    """
    Gamma(s) for complex s.

    Args:
        s: Scalar or array, not a nonpositive integer

    Returns:
        Gamma(s), same shape as s

    Raises:
        PoleError: At nonpositive integers
    """
    arr = np.asarray(s, dtype=complex)
    _check_gamma_argument(arr)
    out = np.exp(special.loggamma(arr))
    return complex(out) if np.ndim(s) == 0 else out


def _shift_for(s: complex, opts: EvalOptions) -> int:
    return opts.shift + int(math.ceil(abs(s.imag)))


def _pochhammer_terms(s: complex, terms: int) -> np.ndarray:
    """s (s+1) ... (s+2j-2) for j = 1..terms+1."""
    out = np.empty(terms + 1, dtype=complex)
    acc = complex(s)
    out[0] = acc
    for j in range(1, terms + 1):
        acc *= (s + 2 * j - 1) * (s + 2 * j)
        out[j] = acc
    return out


def _hurwitz_parts(s: complex, alpha: np.ndarray, opts: EvalOptions, regular: bool):
    """
    Euler-Maclaurin evaluation of zeta(s, alpha) and the size of the first omitted term.

    With regular=True the pole 1/(s-1) is removed, so s = 1 is allowed.
    """
    n_shift = _shift_for(s, opts)
    terms = opts.bernoulli_terms
    alpha = np.asarray(alpha, dtype=float)

    n = np.arange(n_shift, dtype=float)
    head = np.exp(-s * np.log(n[None, :] + alpha[:, None])).sum(axis=1)

    z = n_shift + alpha
    log_z = np.log(z)
    if regular:
        w = (1.0 - s) * log_z
        small = np.abs(w) < 1e-8
        ratio = np.where(small, 1.0 + w / 2.0, np.expm1(w) / np.where(small, 1.0, w))
        pole_part = -log_z * ratio
    else:
        pole_part = np.exp((1.0 - s) * log_z) / (s - 1.0)

    z_pow = np.exp(-s * log_z)
    tail = pole_part + 0.5 * z_pow

    coeffs = _bernoulli_coefficients(terms)
    poch = _pochhammer_terms(s, terms)
    z_inv_sq = 1.0 / (z * z)
    corr = np.zeros_like(z_pow)
    power = z_pow / z
    for j in range(terms):
        corr = corr + coeffs[j] * poch[j] * power
        power = power * z_inv_sq
    omitted = np.abs(coeffs[terms] * poch[terms] * power)
    return head + tail + corr, omitted


def hurwitz_zeta(s: complex, alpha: ArrayLike, opts: Optional[EvalOptions] = None) -> ArrayLike:
    """
    Hurwitz zeta(s, alpha) = sum_{n>=0} (n + alpha)^{-s}, continued by Euler-Maclaurin.

    Args:
        s: Complex argument with Re s > 0, s != 1
        alpha: Scalar or array of parameters in (0, 1]
        opts: Euler-Maclaurin controls

    Returns:
        zeta(s, alpha), same shape as alpha

    Raises:
        PoleError: At s = 1
        DomainError: If Re s <= 0 or alpha outside (0, 1]
    """
    s = complex(s)
    if s == 1:
        raise PoleError("Hurwitz zeta", s)
    _check_zeta_domain(s)
    arr = _check_alpha(alpha)
    value, _ = _hurwitz_parts(s, arr, opts or EvalOptions.from_settings(), regular=False)
    return complex(value[0]) if np.ndim(alpha) == 0 else value


def hurwitz_zeta_regular(s: complex, alpha: ArrayLike, opts: Optional[EvalOptions] = None,
                         with_error: bool = False):
    """
    zeta(s, alpha) - 1/(s - 1); finite at s = 1 where it equals -digamma(alpha).

    Args:
        s: Complex argument with Re s > 0
        alpha: Scalar or array of parameters in (0, 1]
        opts: Euler-Maclaurin controls
        with_error: Also return the magnitude of the first omitted correction

    Returns:
        Regular part (and the omitted-term magnitudes when requested)
    """
    s = complex(s)
    _check_zeta_domain(s)
    arr = _check_alpha(alpha)
    value, omitted = _hurwitz_parts(s, arr, opts or EvalOptions.from_settings(), regular=True)
    if np.ndim(alpha) == 0:
        value, omitted = complex(value[0]), float(omitted[0])
    return (value, omitted) if with_error else value


def riemann_zeta(s: complex, opts: Optional[EvalOptions] = None) -> complex:
    """
    zeta(s) for Re s > 0, s != 1, |Im s| <= 10^4.

    Raises:
        PoleError: At s = 1
        DomainError: Outside the half plane or above the height limit
    """
    s = complex(s)
    if abs(s.imag) > MAX_ZETA_HEIGHT:
        raise DomainError(f"riemann_zeta requires |Im s| <= {MAX_ZETA_HEIGHT:g}, got {s}", field="s")
    if s == 1:
        raise PoleError("zeta", s)
    return complex(hurwitz_zeta(s, 1.0, opts))


def log_abs_zeta_shift(alpha: float, x: float, opts: Optional[EvalOptions] = None) -> float:
    """
    log |zeta(1 + 1/log x + i alpha)|.

    Raises:
        DomainError: If x < 2
    """
    if x < 2:
        raise DomainError(f"log_abs_zeta_shift requires x >= 2, got {x}", field="x")
    return math.log(abs(riemann_zeta(complex(1.0 + 1.0 / math.log(x), alpha), opts)))


def _check_zeta_domain(s: complex) -> None:
    if not s.real > 0:
        raise DomainError(f"zeta evaluation requires Re s > 0, got {s}", field="s")


def _check_alpha(alpha: ArrayLike) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(alpha, dtype=float))
    if np.any(arr <= 0) or np.any(arr > 1):
        raise DomainError("Hurwitz parameter must lie in (0, 1]", field="alpha")
    return arr
