"""
Approximate functional equation for products of shifted L-values.

For primitive chi mod q with parity a and shifts t,

  prod_m L(1/2 + i t_m, chi)
    = sum_n tau_t(n) chi(n) n^{-1/2} W_{a,t}(n X / q^{k/2})
    + eps(chi)^k (q/pi)^{-i sum t} sum_n tau_{-t}(n) conj chi(n) n^{-1/2} W_{a,-t}(n / (X q^{k/2}))

with eps(chi) = tau(chi) / (i^a sqrt q) the root number. W is the contour
integral of e^{s^2}/s (x pi^{k/2})^{-s} prod_m Gamma((1/2 + i sign t_m + s + a)/2)
/ Gamma((1/2 + i t_m + a)/2), evaluated by the trapezoid rule on a vertical
line and tabulated in log x by Chebyshev panels.
"""
import cmath
import logging
import math
import time
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.polynomial import Chebyshev

from app.core.config import settings
from app.core.constants import (
    LValueMethod,
    WEIGHT_PANEL_DEGREE,
    WEIGHT_PANEL_WIDTH,
    WEIGHT_SMALL_X_ABSCISSA,
)
from app.core.exceptions import DomainError, ResourceError
from app.features.characters.arithmetic import divisors
from app.features.characters.group import CharacterGroup, DirichletCharacter
from app.features.characters.sums import gauss_sum, gauss_sums
from app.features.special.functions import log_gamma
from app.schemas.lfunctions import AfeWeightSpec, LValueResult
from app.utils.dirichlet import dirichlet_convolve, twist, unit_series

logger = logging.getLogger(__name__)

_ROW_CHUNK = 2048
_CUTOFF_SCAN = np.arange(0.0, 60.0 + 1e-9, 0.25)


def _nodes(spec: AfeWeightSpec, abscissa: float) -> np.ndarray:
    count = int(round(spec.height / spec.step))
    y = np.arange(-count, count + 1) * spec.step
    return abscissa + 1j * y


def _gamma_ratio(spec: AfeWeightSpec, s: np.ndarray) -> np.ndarray:
    log_ratio = np.zeros(s.shape, dtype=complex)
    for t in spec.shifts:
        top = log_gamma((0.5 + 1j * spec.sign * t + s + spec.parity) / 2)
        bottom = log_gamma(complex((0.5 + 1j * t + spec.parity) / 2))
        log_ratio += top - bottom
    return np.exp(log_ratio)


@lru_cache(maxsize=64)
def _integrand(spec: AfeWeightSpec, abscissa: float) -> Tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes s_j and weights h/(2 pi) F(s_j), F free of x."""
    s = _nodes(spec, abscissa)
    f = np.exp(s * s) / s * np.exp(-s * (spec.k / 2) * math.log(math.pi)) * _gamma_ratio(spec, s)
    return s, f * (spec.step / (2 * math.pi))


def weight_limit(spec: AfeWeightSpec) -> complex:
    """
    C(sign, t) = lim_{x -> 0+} W(x), the residue at s = 0.

    Equals 1 for sign = +1.
    """
    if spec.sign == 1:
        return 1.0 + 0j
    return complex(_gamma_ratio(spec, np.zeros(1, dtype=complex))[0])


def _quadrature(spec: AfeWeightSpec, log_x: np.ndarray) -> np.ndarray:
    """W at x = exp(log_x) by direct quadrature; Re s = c for x >= 1, Re s = -1/4 plus residue below."""
    log_x = np.asarray(log_x, dtype=float)
    out = np.empty(log_x.shape, dtype=complex)
    large = log_x >= 0
    residue = weight_limit(spec)
    for mask, abscissa, offset in (
        (large, spec.abscissa, 0j),
        (~large, WEIGHT_SMALL_X_ABSCISSA, residue),
    ):
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            continue
        s, f = _integrand(spec, abscissa)
        for start in range(0, idx.size, _ROW_CHUNK):
            rows = idx[start:start + _ROW_CHUNK]
            out[rows] = np.exp(-np.outer(log_x[rows], s)) @ f + offset
    return out


def afe_weight(spec: AfeWeightSpec, x) -> complex:
    """
    W_{a, sign t}(x) for x > 0.

    Args:
        spec: Weight parameters
        x: Positive real or array

    Returns:
        Complex value (array for array input)

    Raises:
        DomainError: If any x <= 0
    """
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(arr <= 0):
        raise DomainError("afe_weight requires x > 0", field="x")
    out = _quadrature(spec, np.log(arr))
    return complex(out[0]) if np.ndim(x) == 0 else out


@lru_cache(maxsize=128)
def weight_cutoff(spec: AfeWeightSpec, eps: float) -> float:
    """
    log x beyond which |W(x)| < eps, from a scan of [0, 60] in steps of 1/4.

    Returns:
        The first scan point after the last point with |W| >= eps
    """
    values = np.abs(_quadrature(spec, _CUTOFF_SCAN))
    above = np.flatnonzero(values >= eps)
    if above.size == 0:
        return 0.0
    last = int(above[-1])
    if last + 1 >= _CUTOFF_SCAN.size:
        raise ResourceError("AFE weight cutoff (log x)", f">{_CUTOFF_SCAN[-1]}", _CUTOFF_SCAN[-1])
    return float(_CUTOFF_SCAN[last + 1])


@lru_cache(maxsize=4096)
def _panel(spec: AfeWeightSpec, index: int) -> Tuple[Chebyshev, Chebyshev]:
    lo = index * WEIGHT_PANEL_WIDTH
    domain = [lo, lo + WEIGHT_PANEL_WIDTH]
    nodes = Chebyshev.basis(WEIGHT_PANEL_DEGREE + 1, domain=domain).roots().real
    values = _quadrature(spec, nodes)
    real = Chebyshev.fit(nodes, values.real, WEIGHT_PANEL_DEGREE, domain=domain)
    imag = Chebyshev.fit(nodes, values.imag, WEIGHT_PANEL_DEGREE, domain=domain)
    return real, imag


class WeightTable:
    """
    W_{a, sign t} interpolated in u = log x on fixed panels of width 1/2.

    Panels are built on first use and shared through a module cache.
    """

    def __init__(self, spec: AfeWeightSpec):
        self.spec = spec

    def __call__(self, log_x: np.ndarray) -> np.ndarray:
        log_x = np.asarray(log_x, dtype=float)
        out = np.empty(log_x.shape, dtype=complex)
        panels = np.floor(log_x / WEIGHT_PANEL_WIDTH).astype(np.int64)
        for index in np.unique(panels):
            mask = panels == index
            real, imag = _panel(self.spec, int(index))
            out[mask] = real(log_x[mask]) + 1j * imag(log_x[mask])
        return out


def tau_shift(n: int, t) -> complex:
    """
    tau_t(n) = sum over ordered factorizations n = n_1...n_k of prod n_m^{-i t_m}.

    Raises:
        DomainError: If n < 1 or t is empty
    """
    t = tuple(float(x) for x in t)
    if n < 1:
        raise DomainError(f"tau_shift requires n >= 1, got {n}", field="n")
    if not t:
        raise DomainError("tau_shift requires at least one shift", field="t")
    return _tau(n, t)


@lru_cache(maxsize=200_000)
def _tau(n: int, t: Tuple[float, ...]) -> complex:
    if len(t) == 1:
        return cmath.exp(-1j * t[0] * math.log(n))
    rest = t[1:]
    return sum(cmath.exp(-1j * t[0] * math.log(d)) * _tau(n // d, rest) for d in divisors(n))


def tau_shift_table(length: int, t) -> np.ndarray:
    """tau_t(n) for n = 0..length (entry 0 unused), by repeated Dirichlet convolution."""
    out = unit_series(length, dtype=complex)
    ones = np.ones(length + 1)
    for shift in t:
        out = dirichlet_convolve(out, twist(ones, shift), length)
    return out


class AfeEvaluator:
    """
    The AFE of prod_m L(1/2 + i t_m, chi) for characters mod q at a fixed X.

    Residue-reduced weights sum_{n = r mod q} c(n) are built once per parity
    and reused for every character of that parity.
    """

    def __init__(self, q: int, shifts, X: float, cutoff_eps: Optional[float] = None,
                 max_terms: Optional[int] = None):
        if q < 2:
            raise DomainError("afe_product requires q > 1", field="q")
        if X <= 0:
            raise DomainError(f"afe_product requires X > 0, got {X}", field="X")
        self.q = q
        self.shifts = tuple(float(t) for t in shifts)
        if not self.shifts:
            raise DomainError("afe_product requires at least one shift", field="t")
        self.k = len(self.shifts)
        self.X = float(X)
        self.eps = cutoff_eps if cutoff_eps is not None else settings.AFE_CUTOFF_EPS
        self.max_terms = max_terms if max_terms is not None else settings.AFE_MAX_TERMS
        self.conductor_scale = q ** (self.k / 2)
        self._residue_weights: Dict[int, Tuple[np.ndarray, np.ndarray, int, float]] = {}

    def _spec(self, parity: int, sign: int) -> AfeWeightSpec:
        return AfeWeightSpec.from_settings(parity, sign, self.shifts)

    def weights(self, parity: int) -> Tuple[np.ndarray, np.ndarray, int, float]:
        """
        (first-sum residue weights, dual-sum residue weights, term count, error estimate).

        Raises:
            ResourceError: If the truncated sums exceed the term cap
        """
        if parity in self._residue_weights:
            return self._residue_weights[parity]

        started = time.perf_counter()
        plus, minus = self._spec(parity, 1), self._spec(parity, -1)
        n1 = int(math.exp(weight_cutoff(plus, self.eps)) * self.conductor_scale / self.X)
        n2 = int(math.exp(weight_cutoff(minus, self.eps)) * self.X * self.conductor_scale)
        n1, n2 = max(n1, 1), max(n2, 1)
        if n1 + n2 > self.max_terms:
            raise ResourceError("AFE term count", n1 + n2, self.max_terms)

        w1, mass1 = self._reduced(plus, n1, self.shifts, math.log(self.X / self.conductor_scale))
        w2, mass2 = self._reduced(minus, n2, tuple(-t for t in self.shifts),
                                  -math.log(self.X * self.conductor_scale))
        result = (w1, w2, n1 + n2, self.eps * (mass1 + mass2))
        self._residue_weights[parity] = result
        logger.debug(
            f"AFE weights q={self.q} parity={parity} X={self.X}: {n1}+{n2} terms "
            f"in {time.perf_counter() - started:.2f}s"
        )
        return result

    def _reduced(self, spec: AfeWeightSpec, length: int, shifts, log_scale: float):
        tau = tau_shift_table(length, shifts)[1:]
        n = np.arange(1, length + 1, dtype=float)
        log_n = np.log(n)
        coeffs = tau * np.exp(-0.5 * log_n) * WeightTable(spec)(log_n + log_scale)
        residues = (np.arange(1, length + 1) % self.q)
        reduced = (np.bincount(residues, weights=coeffs.real, minlength=self.q)
                   + 1j * np.bincount(residues, weights=coeffs.imag, minlength=self.q))
        mass = float(np.sum(np.abs(tau) / np.sqrt(n)))
        return reduced, mass

    def _dual_phase(self) -> complex:
        return cmath.exp(-1j * sum(self.shifts) * math.log(self.q / math.pi))

    def for_character(self, chi: DirichletCharacter) -> LValueResult:
        """
        AFE value for one primitive character.

        Raises:
            DomainError: If chi is not primitive or has a different modulus
        """
        if chi.q != self.q:
            raise DomainError(f"character modulus {chi.q} differs from evaluator modulus {self.q}")
        if not chi.is_primitive:
            raise DomainError("afe_product requires a primitive character")
        w1, w2, _, estimate = self.weights(chi.parity)
        values = chi.values
        first = complex(np.dot(values, w1))
        dual = complex(np.dot(np.conj(values), w2))
        root = gauss_sum(chi) / ((1j ** chi.parity) * math.sqrt(self.q))
        value = first + root ** self.k * self._dual_phase() * dual
        return LValueResult(value=value, method=LValueMethod.AFE, truncation_error_estimate=estimate)

    def for_group(self, group: CharacterGroup) -> np.ndarray:
        """AFE values for every character of the group; NaN at imprimitive characters."""
        out = np.full(group.size, complex(np.nan, np.nan))
        primitive = group.primitive_mask
        if not primitive.any():
            return out
        roots = gauss_sums(group) / ((1j ** group.parities) * math.sqrt(self.q))
        for parity in (0, 1):
            mask = primitive & (group.parities == parity)
            if not mask.any():
                continue
            w1, w2, _, _ = self.weights(parity)
            first = group.transform(w1)
            dual = np.conj(group.transform(np.conj(w2)))
            out[mask] = (first + roots ** self.k * self._dual_phase() * dual)[mask]
        return out

    def term_count(self, parity: int) -> int:
        return self.weights(parity)[2]


def afe_tolerance(relative: bool) -> float:
    """Agreement tolerance of a relative or an absolute AFE deviation."""
    return settings.AFE_RELATIVE_TOLERANCE if relative else settings.AFE_ABSOLUTE_TOLERANCE


def afe_agreement(afe: complex, reference: complex) -> Tuple[float, bool, bool]:
    """
    Deviation of an AFE value from the reference value.

    The deviation is relative when |reference| > AFE_RELATIVE_FLOOR and absolute
    otherwise.

    Returns:
        (deviation, relative, within tolerance)
    """
    relative = abs(reference) > settings.AFE_RELATIVE_FLOOR
    deviation = abs(afe - reference) / abs(reference) if relative else abs(afe - reference)
    return deviation, relative, bool(deviation < afe_tolerance(relative))


def afe_product(chi: DirichletCharacter, t, X: float, cutoff_eps: Optional[float] = None) -> LValueResult:
    """
    prod_m L(1/2 + i t_m, chi) through the approximate functional equation.

    Args:
        chi: Primitive character mod q > 1
        t: Shifts
        X: Balance parameter X > 0
        cutoff_eps: Weight cutoff; defaults to AFE_CUTOFF_EPS

    Returns:
        LValueResult with method=afe

    Raises:
        DomainError: For imprimitive chi, q = 1 or X <= 0
        ResourceError: If the truncated sums exceed AFE_MAX_TERMS
    """
    return AfeEvaluator(chi.q, t, X, cutoff_eps).for_character(chi)
