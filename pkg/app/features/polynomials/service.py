"""
Check suites for the mollifier polynomials and their coefficient systems.

Each suite returns one MollifierCheckRow: the number of cases examined, the
worst deviation found and the bound it is held to.
"""
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from app.core.constants import CoefficientFlavor
from app.core.exceptions import DomainError
from app.features.characters.group import DirichletCharacter, character_group
from app.features.polynomials.coefficients import (
    b_coeffs,
    c_indicator,
    f_coeffs,
    g_coeffs,
    h_coeffs,
    mollifier_coeffs,
)
from app.features.polynomials.mollifier import (
    good_set_polynomials,
    n_poly,
    p_poly,
    scale_primes,
    smoothing_weights,
    square_primes,
    tk_mask,
    truncated_exp,
)
from app.schemas.lfunctions import ShiftSpec
from app.schemas.polynomials import MollifierCheckRow, MollifierSchedule

logger = logging.getLogger(__name__)

TAYLOR_BOUND = 1e-8
COEFFICIENT_BOUND = 1e-10
DUALITY_BOUND = 1e-10
CONJUGATION_BOUND = 1e-14

# Exponents at which the majorant relation is sampled
MAJORANT_BETAS = (0.25, 0.5, 1.0)


def _excess(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """Largest (lhs - rhs)_+ / max(1, |rhs|)."""
    if lhs.size == 0:
        return 0.0
    return float(np.max(np.maximum(lhs - rhs, 0.0) / np.maximum(1.0, np.abs(rhs))))


class MollifierCheckService:
    """Runs the mollifier check suites at one modulus."""

    def __init__(self, spec: ShiftSpec, sched: MollifierSchedule, length: int = 10_000,
                 duality_length: int = 100_000, samples: int = 4, x: Optional[float] = None):
        """
        Initialize the check service.

        Args:
            spec: Shifts and exponents
            sched: Mollifier schedule of the modulus
            length: Length of the coefficient vectors checked exhaustively
            duality_length: Largest coefficient vector built by the duality check
            samples: Number of primitive characters used by the character checks
            x: Length parameter of the smoothing weights; defaults to P_R
        """
        if samples < 1:
            raise DomainError("samples must be >= 1", field="samples")
        self.spec = spec
        self.sched = sched
        self.length = length
        self.duality_length = duality_length
        self.group = character_group(sched.q)
        self.x = x if x is not None else sched.P(sched.R)
        if sched.R and self.x < 2:
            raise DomainError(f"polynomial length x must be >= 2, got {self.x}", field="x")
        primitive = np.flatnonzero(self.group.primitive_mask)
        self.characters: List[DirichletCharacter] = [self.group.character(int(i)) for i in primitive[:samples]]

    @property
    def suites(self) -> Dict[str, Callable[[], MollifierCheckRow]]:
        return {
            "taylor_truncation": self.taylor_truncation,
            "coefficient_bounds": self.coefficient_bounds,
            "majorant_relation": self.majorant_relation,
            "polynomial_duality": self.polynomial_duality,
            "conjugation": self.conjugation,
            "good_set_census": self.good_set_census,
        }

    def run(self, names: Optional[Sequence[str]] = None) -> List[MollifierCheckRow]:
        """
        Run the named suites (all of them by default), in a fixed order.

        Raises:
            DomainError: For an unknown suite name
        """
        available = self.suites
        names = list(available) if not names else list(names)
        unknown = [n for n in names if n not in available]
        if unknown:
            raise DomainError(f"unknown check suite(s) {unknown}; choose from {list(available)}", field="suite")
        rows = []
        for name in available:
            if name in names:
                row = available[name]()
                logger.info(f"{name}: {row.cases} cases, worst {row.worst:.3e} (bound {row.bound:g})")
                rows.append(row)
        return rows

    def _empty(self, check: str, bound: float) -> MollifierCheckRow:
        return MollifierCheckRow(check=check, cases=0, worst=0.0, bound=bound, passed=True,
                                 note="R = 0: no scales to check")

    @staticmethod
    def _row(check: str, cases: int, worst: float, bound: float, note: Optional[str] = None) -> MollifierCheckRow:
        return MollifierCheckRow(check=check, cases=cases, worst=worst, bound=bound,
                                 passed=bool(worst <= bound), note=note)

    def taylor_truncation(self) -> MollifierCheckRow:
        """
        Relative error of the truncated exponential against exp(beta P) for |P| <= K_j.

        Inputs are a polar grid in the disc of radius K_j together with the
        actual P values of the good-set members, at every exponent up to a*.
        """
        if self.sched.R == 0:
            return self._empty("taylor_truncation", TAYLOR_BOUND)
        betas = sorted(set(self.spec.a) | {self.spec.a_star})
        angles = np.exp(2j * np.pi * np.arange(16) / 16)
        polys = good_set_polynomials(self.group, self.spec, self.sched)
        members = tk_mask(self.group, self.spec, self.sched, polys)
        cases, worst = 0, 0.0
        for j in range(1, self.sched.R + 1):
            K = self.sched.K[j - 1]
            grid = np.concatenate([r * K * angles for r in (0.1, 0.5, 1.0)])
            actual = polys[j - 1][:, members].ravel()
            z = np.concatenate([grid, actual[np.abs(actual) <= K]])
            for beta in betas:
                exact = np.exp(beta * z)
                approx = truncated_exp(beta * z, self.sched.degree(j))
                worst = max(worst, float(np.max(np.abs(approx - exact) / np.abs(exact))))
                cases += z.size
        # e^{-40 a*^2 K_j} lies below double precision; the asserted bound is 1e-8
        return self._row("taylor_truncation", cases, worst, TAYLOR_BOUND)

    def coefficient_bounds(self) -> MollifierCheckRow:
        """b(1) = 1, b(p), |b| and |b'| below b'', and the b'' prime and prime-power bounds."""
        if self.sched.R == 0:
            return self._empty("coefficient_bounds", COEFFICIENT_BOUND)
        spec, L = self.spec, self.length
        a_star, k = spec.a_star, spec.k
        notes = []
        cases, worst = 0, 0.0
        for j in range(1, self.sched.R + 1):
            b = b_coeffs(j, self.x, spec.a, spec.t, L, self.sched)
            b_prime = mollifier_coeffs(j, self.x, spec, L, CoefficientFlavor.B_PRIME, self.sched).values
            b_double = mollifier_coeffs(j, self.x, spec, L, CoefficientFlavor.B_DOUBLE_PRIME, self.sched).values

            worst = max(worst, abs(b[1] - 1.0))
            primes = scale_primes(j, self.sched)
            primes = primes[primes <= L]
            logp = np.log(primes.astype(float))
            expected = smoothing_weights(primes, self.x) * sum(
                a * np.exp(-1j * t * logp) for t, a in spec.pairs()
            )
            worst = max(worst, float(np.max(np.abs(b[primes] - expected), initial=0.0)))
            worst = max(worst, float(max(0.0, -np.min(b_double[1:]))))
            worst = max(worst, _excess(np.abs(b_prime[1:]), b_double[1:]))
            if j >= 2 or max(spec.a) <= 1:
                worst = max(worst, _excess(np.abs(b[1:]), b_double[1:]))
            else:
                notes.append("|b| <= b'' at j=1 needs every a_m <= 1; skipped")
            worst = max(worst, _excess(b_double[primes], np.full(primes.size, a_star)))
            if j >= 2:
                for r in range(2, int(math.log(L) / math.log(2)) + 1):
                    powers = primes.astype(np.int64) ** r
                    powers = powers[powers <= L]
                    if powers.size == 0:
                        break
                    bound = (a_star * k) ** r / math.factorial(r)
                    worst = max(worst, _excess(b_double[powers], np.full(powers.size, bound)))
            cases += L
        return self._row("coefficient_bounds", cases, worst, COEFFICIENT_BOUND, "; ".join(notes) or None)

    def majorant_relation(self) -> MollifierCheckRow:
        """f(p) = g(p) on the first scale and 0 <= f <= h c_1 at exponents beta <= 1."""
        if self.sched.R == 0:
            return self._empty("majorant_relation", COEFFICIENT_BOUND)
        L = self.length
        betas = sorted(set(MAJORANT_BETAS) | {a for a in self.spec.a if a <= 1})
        primes = scale_primes(1, self.sched)
        primes = primes[primes <= L]
        c1 = c_indicator(1, L, self.sched)
        cases, worst = 0, 0.0
        for beta in betas:
            f = f_coeffs(1, self.x, beta, L, self.sched)
            g = g_coeffs(1, self.x, beta, L, self.sched)
            h = h_coeffs(1, self.x, beta, L, self.sched)
            worst = max(worst, float(np.max(np.abs(f[primes] - g[primes]), initial=0.0)))
            worst = max(worst, float(max(0.0, -np.min(f[1:]))))
            worst = max(worst, _excess(f[1:], h[1:] * c1[1:]))
            cases += L
        return self._row("majorant_relation", cases, worst, COEFFICIENT_BOUND)

    def _duality_degree(self, j: int) -> Optional[tuple]:
        primes = scale_primes(j, self.sched)
        if primes.size == 0:
            return None
        atom = int(primes[-1])
        if j == 1:
            squares = square_primes(self.sched)
            if squares.size:
                atom = max(atom, int(squares[-1]) ** 2)
        degree = int(math.log(self.duality_length) / (self.spec.k * math.log(atom)))
        if degree < 1:
            return None
        return degree, atom ** (self.spec.k * degree)

    def polynomial_duality(self) -> MollifierCheckRow:
        """
        sum_n b(n) chi(n) n^{-s} against prod_m N_{j,x}(s + i t_m, chi; a_m).

        The degree is lowered until every term of the product fits in the
        coefficient vector, so both sides are the same finite sum.
        """
        if self.sched.R == 0:
            return self._empty("polynomial_duality", DUALITY_BOUND)
        points = (complex(0.5, 0.0), complex(0.75, 2.0))
        notes = []
        cases, worst = 0, 0.0
        for j in range(1, self.sched.R + 1):
            reduced_degree = self._duality_degree(j)
            if reduced_degree is None:
                notes.append(f"j={j}: duality length too short for degree 1")
                continue
            degree, length = reduced_degree
            degrees = list(self.sched.degrees)
            degrees[j - 1] = degree
            reduced = self.sched.model_copy(update={"degrees": tuple(degrees)})
            b = b_coeffs(j, self.x, self.spec.a, self.spec.t, length, reduced)
            n = np.arange(1, length + 1)
            log_n = np.log(n.astype(float))
            for chi in self.characters:
                weighted = b[1:] * chi.values[n % chi.q]
                for s in points:
                    lhs = complex(np.sum(weighted * np.exp(-s * log_n)))
                    rhs = 1 + 0j
                    for t, a in self.spec.pairs():
                        rhs *= n_poly(j, self.x, s + 1j * t, chi, a, reduced)
                    worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
                    cases += 1
            notes.append(f"j={j}: degree {degree}, length {length}")
        return self._row("polynomial_duality", cases, worst, DUALITY_BOUND, "; ".join(notes) or None)

    def conjugation(self) -> MollifierCheckRow:
        """P_{j,x}(1/2 - it, conj chi) = conj P_{j,x}(1/2 + it, chi), relative to sum |coefficients|."""
        if self.sched.R == 0:
            return self._empty("conjugation", CONJUGATION_BOUND)
        principal = self.group.principal
        cases, worst = 0, 0.0
        for j in range(1, self.sched.R + 1):
            scale = max(1.0, p_poly(j, self.x, 0.5, principal, self.sched).real)
            for chi in self.characters:
                for t in self.spec.t:
                    value = p_poly(j, self.x, complex(0.5, t), chi, self.sched)
                    mirrored = p_poly(j, self.x, complex(0.5, -t), chi.conjugate(), self.sched)
                    worst = max(worst, abs(mirrored - value.conjugate()) / scale)
                    cases += 1
        return self._row("conjugation", cases, worst, CONJUGATION_BOUND)

    def good_set_census(self) -> MollifierCheckRow:
        """Share of primitive characters outside the good set; recorded, never asserted."""
        primitive = self.group.primitive_count
        members = int(np.count_nonzero(tk_mask(self.group, self.spec, self.sched)))
        share = 1.0 - members / primitive if primitive else 0.0
        return MollifierCheckRow(check="good_set_census", cases=primitive, worst=share, bound=1.0, passed=True,
                                 note=f"{members} of {primitive} primitive characters in the good set")
