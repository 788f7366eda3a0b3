"""
Reference evaluation of Dirichlet L-values through Hurwitz zeta.

L(s, chi) = q^{-s} sum_{a=1}^{q} chi(a) zeta(s, a/q). The Hurwitz values are
computed once per (q, s) and shared by every character of the modulus; the
character sum over them is one FFT over the discrete-log grid.
"""
import cmath
import logging
import math
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from app.core.constants import LValueMethod
from app.core.exceptions import DomainError, PoleError
from app.features.characters.arithmetic import euler_phi
from app.features.characters.group import CharacterGroup, DirichletCharacter, character_group
from app.features.characters.sums import gauss_sum
from app.features.special.functions import hurwitz_zeta_regular, log_gamma
from app.schemas.lfunctions import EvalOptions, LValueResult

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


@lru_cache(maxsize=128)
def hurwitz_table(q: int, s: complex, opts: EvalOptions) -> Tuple[np.ndarray, float]:
    """
    Regular parts zeta(s, a/q) - 1/(s-1) indexed by the residue a mod q.

    Residue 0 stands for a = q (parameter 1).

    Returns:
        (read-only table of length q, largest omitted Euler-Maclaurin term)
    """
    alpha = np.arange(q, dtype=float) / q
    alpha[0] = 1.0
    values, omitted = hurwitz_zeta_regular(s, alpha, opts, with_error=True)
    values = np.asarray(values, dtype=complex)
    values.flags.writeable = False
    logger.debug(f"Hurwitz table q={q} s={s}: {q} parameters")
    return values, float(np.max(omitted))


def _pole_term(q: int, s: complex) -> complex:
    return euler_phi(q) * q ** (-s) / (s - 1)


def l_values(group: CharacterGroup, s: complex, opts: Optional[EvalOptions] = None) -> np.ndarray:
    """
    L(s, chi) for every character of the group, in enumeration order.

    Imprimitive non-principal characters get the L-function of the modulus q
    (Euler factors at p | q removed). The principal entry is NaN at s = 1.

    Args:
        group: Character group mod q
        s: Complex point with Re s > 0
        opts: Euler-Maclaurin controls

    Returns:
        Complex array of length phi(q)
    """
    opts = opts or EvalOptions.from_settings()
    s = complex(s)
    q = group.q
    table, _ = hurwitz_table(q, s, opts)
    values = group.transform(table) * q ** (-s)
    if s == 1:
        values[0] = complex(np.nan, np.nan)
    else:
        values[0] += _pole_term(q, s)
    return values


def l_reference(chi: DirichletCharacter, s: complex, opts: Optional[EvalOptions] = None) -> LValueResult:
    """
    L(s, chi) through the shared Hurwitz table.

    Args:
        chi: Primitive or principal character
        s: Complex point with Re s > 0

    Returns:
        LValueResult with method=reference and an error estimate from the
        Euler-Maclaurin tail and rounding over the q-term sum

    Raises:
        DomainError: If chi is neither primitive nor principal, or Re s <= 0
        PoleError: For the principal character at s = 1
    """
    opts = opts or EvalOptions.from_settings()
    s = complex(s)
    if not (chi.is_primitive or chi.is_principal):
        raise DomainError(
            f"l_reference requires a primitive or principal character, got conductor {chi.conductor} mod {chi.q}"
        )
    if chi.is_principal and s == 1:
        raise PoleError("L(s, principal)", s)

    q = chi.q
    table, omitted = hurwitz_table(q, s, opts)
    scale = abs(q ** (-s))
    value = complex(np.dot(chi.values, table)) * q ** (-s)
    if chi.is_principal:
        value += _pole_term(q, s)
    phi = euler_phi(q)
    estimate = phi * scale * (omitted + _EPS * float(np.max(np.abs(table))))
    return LValueResult(value=value, method=LValueMethod.REFERENCE, truncation_error_estimate=estimate)


def root_number(chi: DirichletCharacter) -> complex:
    """
    epsilon(chi) = tau(chi) / (i^a sqrt(q)), so Lambda(s, chi) = epsilon(chi) Lambda(1-s, conj chi).

    Raises:
        DomainError: If chi is not primitive
    """
    if not chi.is_primitive:
        raise DomainError("root_number requires a primitive character")
    return gauss_sum(chi) / ((1j ** chi.parity) * math.sqrt(chi.q))


def completed_l(chi: DirichletCharacter, s: complex, opts: Optional[EvalOptions] = None) -> complex:
    """Lambda(s, chi) = (q/pi)^{(s+a)/2} Gamma((s+a)/2) L(s, chi)."""
    s = complex(s)
    shifted = (s + chi.parity) / 2
    factor = cmath.exp(shifted * math.log(chi.q / math.pi) + log_gamma(shifted))
    return factor * l_reference(chi, s, opts).value


def functional_equation_residual(chi: DirichletCharacter, s: complex,
                                 opts: Optional[EvalOptions] = None) -> float:
    """
    |Lambda(s, chi) - epsilon(chi) Lambda(1-s, conj chi)| / |Lambda(s, chi)|.

    Raises:
        DomainError: If chi is not primitive or Re s is outside (0, 1)
    """
    s = complex(s)
    if not chi.is_primitive:
        raise DomainError("functional_equation_residual requires a primitive character")
    if not 0 < s.real < 1:
        raise DomainError(f"functional_equation_residual requires 0 < Re s < 1, got {s}", field="s")
    left = completed_l(chi, s, opts)
    right = root_number(chi) * completed_l(chi.conjugate(), 1 - s, opts)
    return abs(left - right) / abs(left)


def l_reference_at(q: int, index: int, s: complex, opts: Optional[EvalOptions] = None) -> LValueResult:
    """l_reference for the character of the given index mod q."""
    return l_reference(character_group(q).character(index), s, opts)
