"""
Shifted moments of Dirichlet L-functions and their Hoelder decomposition.

M_{t,a}(q) = sum over primitive chi mod q of prod_m |L(1/2 + i t_m, chi)|^{2 a_m},
compared with phi(q) (log q)^{sum a_m^2} prod_{j<l} |zeta(1 + i(t_j - t_l) + 1/log q)|^{2 a_j a_l}.
"""
import logging
import math
import time
from math import factorial, gcd
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.constants import HOLDER_SLACK
from app.core.exceptions import DomainError, InternalError, ResourceError
from app.features.characters.arithmetic import euler_phi, phi_star
from app.features.characters.group import CharacterGroup, DirichletCharacter, character_group
from app.features.lfunctions.reference import l_reference, l_values
from app.features.polynomials.mollifier import (
    good_set_polynomials,
    mollifier_schedule,
    tk_mask,
    truncated_exp,
)
from app.features.polynomials.primes import prime_table
from app.features.special.functions import riemann_zeta
from app.infrastructure.parallel import ordered_map, pairwise_sum
from app.schemas.lfunctions import EvalOptions, ShiftSpec
from app.schemas.moments import (
    HolderExponents,
    MomentReport,
    PowerMomentRow,
    ProofSplit,
    SweepSummary,
)
from app.schemas.polynomials import MollifierSchedule

logger = logging.getLogger(__name__)

NO_PRIMITIVE_REASON = "no primitive characters"

# Exact identities of the Hoelder exponents are checked to this precision
_IDENTITY_TOLERANCE = 1e-12


def _check_shifts(q: int, spec: ShiftSpec) -> None:
    if not spec.fits_modulus(q):
        limit = float(q) ** spec.bound_exponent
        raise DomainError(
            f"shifts must satisfy |t| <= q^A = {limit:.6g} at q = {q} (A = {spec.bound_exponent:g})",
            field="t", details={"q": q, "t": list(spec.t), "A": spec.bound_exponent},
        )


def _check_modulus(q: int, spec: Optional[ShiftSpec] = None) -> None:
    if q < 3:
        raise DomainError(f"moments require q >= 3, got {q}", field="q")
    if q > settings.MAX_MOMENT_MODULUS:
        raise ResourceError("moment modulus", q, settings.MAX_MOMENT_MODULUS)
    if spec is not None:
        _check_shifts(q, spec)


def critical_values(group: CharacterGroup, spec: ShiftSpec, opts: Optional[EvalOptions] = None) -> np.ndarray:
    """
    L(1/2 + i t_m, chi) for every m and every character.

    Coinciding shifts share one evaluation.

    Returns:
        Complex array of shape (k, size)
    """
    cache: Dict[float, np.ndarray] = {}
    rows = []
    for t in spec.t:
        if t not in cache:
            cache[t] = l_values(group, complex(0.5, t), opts)
        rows.append(cache[t])
    return np.array(rows)


def _moment_terms(values: np.ndarray, spec: ShiftSpec) -> np.ndarray:
    terms = np.ones(values.shape[1])
    for m, a in enumerate(spec.a):
        terms *= np.abs(values[m]) ** (2 * a)
    return terms


def shifted_moment(q: int, spec: ShiftSpec, opts: Optional[EvalOptions] = None) -> float:
    """
    M_{t,a}(q) by direct summation over the primitive characters.

    Args:
        q: Modulus, 3 <= q <= MAX_MOMENT_MODULUS
        spec: Shifts and exponents

    Returns:
        The moment; 0 when q = 2 mod 4

    Raises:
        DomainError: If q < 3 or a shift exceeds q^A
        ResourceError: If q exceeds the moment cap
    """
    _check_modulus(q, spec)
    group = character_group(q)
    mask = group.primitive_mask
    if not mask.any():
        return 0.0
    terms = _moment_terms(critical_values(group, spec, opts), spec)
    return float(pairwise_sum(terms[mask]))


def predicted_main_term(q: int, spec: ShiftSpec) -> float:
    """
    phi(q) (log q)^{sum a_j^2} prod_{j<l} |zeta(1 + i(t_j - t_l) + 1/log q)|^{2 a_j a_l}.

    Raises:
        DomainError: If q < 3 or a shift exceeds q^A
    """
    if q < 3:
        raise DomainError(f"predicted_main_term requires q >= 3, got {q}", field="q")
    _check_shifts(q, spec)
    log_q = math.log(q)
    log_main = math.log(euler_phi(q)) + spec.a_squares * math.log(log_q)
    pairs = spec.pairs()
    for j, (tj, aj) in enumerate(pairs):
        for tl, al in pairs[j + 1:]:
            zeta = riemann_zeta(complex(1 + 1 / log_q, tj - tl))
            log_main += 2 * aj * al * math.log(abs(zeta))
    return math.exp(log_main)


def holder_exponents(spec: ShiftSpec) -> HolderExponents:
    """
    u, v and r_m with 1/u = 1/(4a*), 1/r_m = 1/(2k) - a_m/(4k a*) and 1/v closing the sum.

    Raises:
        InternalError: If 1/u + 1/v + sum 1/r_m = 1 or 2a_m/u + 2k/r_m = 1 fails
    """
    k, a_star = spec.k, spec.a_star
    inv_u = 1 / (4 * a_star)
    inv_r = [1 / (2 * k) - a / (4 * k * a_star) for a in spec.a]
    inv_v = 1 - inv_u - sum(inv_r)

    total = inv_u + inv_v + sum(inv_r)
    if abs(total - 1) > _IDENTITY_TOLERANCE:
        raise InternalError(f"Hoelder exponents sum to {total}", details={"sum": total})
    for a, r in zip(spec.a, inv_r):
        balance = 2 * a * inv_u + 2 * k * r
        if abs(balance - 1) > _IDENTITY_TOLERANCE:
            raise InternalError(f"Hoelder balance 2a/u + 2k/r is {balance} for a = {a}",
                                details={"a": a, "balance": balance})
    if min([inv_u, inv_v] + inv_r) <= 0:
        raise InternalError("Hoelder exponents must be finite", details={"inv_v": inv_v})
    return HolderExponents(u=1 / inv_u, v=1 / inv_v, r=tuple(1 / r for r in inv_r))


def _split_parts(values: np.ndarray, scale_sums: np.ndarray, spec: ShiftSpec,
                 members: np.ndarray) -> Tuple[complex, float, Tuple[float, ...]]:
    """S_0, J and S_m over the members, from L-values and sum_j P_{j,P_R}(1/2 + i t_m)."""
    k = spec.k
    a = np.asarray(spec.a)[:, None]
    re_p = scale_sums.real

    s0_terms = np.prod(values * np.exp((a - 1) * scale_sums + a * np.conj(scale_sums)), axis=0)
    weight = np.exp(2 * np.sum(a * re_p, axis=0))
    s0 = complex(pairwise_sum(s0_terms[members]))
    j_sum = float(pairwise_sum(weight[members]))

    s_m = []
    for m in range(k):
        terms = np.abs(values[m]) ** (2 * k) * weight * np.exp(-2 * k * re_p[m])
        s_m.append(float(pairwise_sum(terms[members])))
    return s0, j_sum, tuple(s_m)


def telescoped_s0(q: int, spec: ShiftSpec, sched: MollifierSchedule,
                  opts: Optional[EvalOptions] = None) -> Tuple[complex, ...]:
    """
    S_0^{(J)} for J = 0..R.

    For j <= J the factors exp((a_m - 1) P_j + a_m conj P_j) are replaced by
    N_j(1/2 + i t_m; (a_m - 1)/2)^2 conj(N_j(1/2 + i t_m; a_m/2))^2; S_0^{(0)} = S_0.
    """
    _check_modulus(q, spec)
    group = character_group(q)
    values = critical_values(group, spec, opts)
    polys = good_set_polynomials(group, spec, sched)
    members = tk_mask(group, spec, sched, polys)
    return _telescoped(values, polys, spec, sched, members)


def _telescoped(values: np.ndarray, polys: np.ndarray, spec: ShiftSpec, sched: MollifierSchedule,
                members: np.ndarray) -> Tuple[complex, ...]:
    a = np.asarray(spec.a)[:, None]
    exact = [np.exp((a - 1) * polys[j] + a * np.conj(polys[j])) for j in range(sched.R)]
    approx = [
        truncated_exp((a - 1) / 2 * polys[j], sched.degree(j + 1)) ** 2
        * np.conj(truncated_exp(a / 2 * polys[j], sched.degree(j + 1))) ** 2
        for j in range(sched.R)
    ]
    out = []
    for J in range(sched.R + 1):
        factor = np.ones_like(values)
        for j in range(sched.R):
            factor = factor * (approx[j] if j < J else exact[j])
        terms = np.prod(values * factor, axis=0)
        out.append(complex(pairwise_sum(terms[members])))
    return tuple(out)


def euler_product_majorant(q: int, spec: ShiftSpec) -> float:
    """phi(q) prod_{p<=q} (1 + |sum_m a_m p^{-i t_m}|^2 / p), the upper bound chain for J."""
    if q < 2:
        raise DomainError(f"euler_product_majorant requires q >= 2, got {q}", field="q")
    p = prime_table(q).primes.astype(float)
    inner = np.zeros(p.size, dtype=complex)
    for t, a in spec.pairs():
        inner += a * np.exp(-1j * t * np.log(p))
    return float(euler_phi(q) * math.exp(math.fsum(np.log1p(np.abs(inner) ** 2 / p))))


def growth_exponent(chi: DirichletCharacter, t: float, opts: Optional[EvalOptions] = None) -> float:
    """log|L(1/2 + i t, chi)| log log q / log q."""
    if chi.q < 3:
        raise DomainError(f"growth_exponent requires q >= 3, got {chi.q}", field="q")
    value = abs(l_reference(chi, complex(0.5, t), opts).value)
    log_q = math.log(chi.q)
    return math.log(value) * math.log(log_q) / log_q


def proof_split(q: int, spec: ShiftSpec, sched: MollifierSchedule,
                opts: Optional[EvalOptions] = None, telescope: bool = True) -> ProofSplit:
    """
    S_0, J and S_m over the good set, with the Hoelder residual.

    holder_residual = M^{1/u} J^{1/v} prod_m S_m^{1/r_m} - |S_0|, which is
    nonnegative up to rounding.

    Args:
        q: Modulus within the moment cap
        spec: Shifts and exponents
        sched: Mollifier schedule of q
        telescope: Also compute S_0^{(J)} for J = 0..R

    Raises:
        DomainError: If the schedule belongs to another modulus
        ResourceError: If q exceeds the moment cap
    """
    _check_modulus(q, spec)
    if sched.q != q:
        raise DomainError(f"schedule modulus {sched.q} differs from q = {q}")
    started = time.perf_counter()
    group = character_group(q)
    values = critical_values(group, spec, opts)
    polys = good_set_polynomials(group, spec, sched)
    members = tk_mask(group, spec, sched, polys)
    scale_sums = polys.sum(axis=0) if sched.R else np.zeros_like(values)

    s0, j_sum, s_m = _split_parts(values, scale_sums, spec, members)
    primitive = group.primitive_mask
    moment = float(pairwise_sum(_moment_terms(values, spec)[primitive])) if primitive.any() else 0.0

    holder = holder_exponents(spec)
    rhs = moment ** (1 / holder.u) * j_sum ** (1 / holder.v)
    for s, r in zip(s_m, holder.r):
        rhs *= s ** (1 / r)
    residual = rhs - abs(s0)
    if residual < -HOLDER_SLACK * max(rhs, 1.0):
        logger.warning(f"Hoelder residual {residual:.3e} below slack at q={q}")

    telescoped = _telescoped(values, polys, spec, sched, members) if telescope else ()
    logger.info(f"Proof split q={q} R={sched.R}: {int(members.sum())}/{int(primitive.sum())} good characters, "
                f"residual {residual:.6g} in {time.perf_counter() - started:.2f}s")
    return ProofSplit(
        q=q, R=sched.R, members=int(members.sum()), primitive_count=int(primitive.sum()),
        s0=s0, j_sum=j_sum, s_m=s_m, moment=moment, holder=holder, holder_rhs=rhs,
        holder_residual=residual, euler_majorant=euler_product_majorant(q, spec), telescoped=telescoped
    )


def power_moment(q: int, x: float, coeffs: Optional[Mapping[int, complex]], k: int) -> PowerMomentRow:
    """
    Both sides of the 2k-th power moment of a prime polynomial.

    lhs = sum_{chi mod q} |sum_{p<=x} a(p) chi(p) / sqrt(p)|^{2k},
    rhs = phi(q) k! (sum_{p<=x} |a(p)|^2 / p)^k.

    Args:
        q: Modulus
        x: Prime bound with x^k <= q / log q
        coeffs: a(p) by prime; None means a(p) = 1, unlisted primes get 0
        k: Positive integer

    Raises:
        DomainError: If the length hypothesis fails or a prime p <= x divides q
    """
    if k < 1:
        raise DomainError(f"power moment requires k >= 1, got {k}", field="k")
    if q < 3 or x < 2:
        raise DomainError(f"power moment requires q >= 3 and x >= 2, got q={q}, x={x}")
    if x ** k > q / math.log(q):
        raise DomainError(f"power moment requires x^k <= q/log q, got x^k = {x ** k:g} > {q / math.log(q):g}",
                          field="x")
    primes = prime_table(int(math.floor(x))).primes
    bad = [int(p) for p in primes if gcd(int(p), q) != 1]
    if bad:
        raise DomainError(f"primes {bad} up to x divide q = {q}", field="q")

    a = np.array([1.0 if coeffs is None else coeffs.get(int(p), 0.0) for p in primes], dtype=complex)
    weights = np.zeros(q, dtype=complex)
    np.add.at(weights, primes % q, a / np.sqrt(primes.astype(float)))
    group = character_group(q)
    lhs = float(pairwise_sum(np.abs(group.transform(weights)) ** (2 * k)))
    rhs = euler_phi(q) * factorial(k) * float(np.sum(np.abs(a) ** 2 / primes)) ** k
    ratio = lhs / rhs if rhs > 0 else 0.0
    return PowerMomentRow(q=q, x=x, k=k, lhs=lhs, rhs=rhs, ratio=ratio)


def power_moment_ratio(q: int, x: float, coeffs: Optional[Mapping[int, complex]], k: int) -> float:
    """lhs / rhs of power_moment."""
    return power_moment(q, x, coeffs, k).ratio


def _apply_overrides(overrides: Mapping[str, Any]) -> None:
    for name, value in overrides.items():
        setattr(settings, name, value)


def _report_task(payload: Tuple[int, Dict[str, Any], Optional[float], bool, Dict[str, Any]]) -> MomentReport:
    q, spec_data, delta, split, overrides = payload
    _apply_overrides(overrides)
    return MomentService().moment_report(q, ShiftSpec(**spec_data), delta=delta, split=split)


class MomentService:
    """Moment reports for single moduli and sweeps."""

    def __init__(self, threads: Optional[int] = None, opts: Optional[EvalOptions] = None):
        """
        Args:
            threads: Worker processes for sweeps; defaults to THREADS
            opts: Euler-Maclaurin controls
        """
        self.threads = threads or settings.THREADS
        self.opts = opts

    def moment_report(self, q: int, spec: ShiftSpec, delta: Optional[float] = None,
                      split: bool = False) -> MomentReport:
        """
        Moment, main term and ratio of one modulus.

        Moduli without primitive characters yield a zero moment with a skip reason.

        Raises:
            DomainError: If q < 3, or a split is requested below the schedule minimum
            ResourceError: If q exceeds the moment cap
        """
        _check_modulus(q, spec)
        started = time.perf_counter()
        phi, phi_q_star = euler_phi(q), phi_star(q)
        main = predicted_main_term(q, spec)
        if phi_q_star == 0:
            logger.info(f"q={q}: {NO_PRIMITIVE_REASON}")
            return MomentReport(q=q, spec=spec, phi=phi, phi_star=0, moment=0.0, main_term=main,
                                ratio=0.0, skipped_reason=NO_PRIMITIVE_REASON,
                                elapsed=time.perf_counter() - started)

        proof = None
        if split:
            sched = mollifier_schedule(q, delta, spec)
            proof = proof_split(q, spec, sched, self.opts)
            moment = proof.moment
        else:
            moment = shifted_moment(q, spec, self.opts)
        elapsed = time.perf_counter() - started
        logger.debug(f"q={q}: moment {moment:.6g}, main term {main:.6g} in {elapsed:.2f}s")
        return MomentReport(q=q, spec=spec, phi=phi, phi_star=phi_q_star, moment=moment, main_term=main,
                            ratio=moment / main, split=proof, elapsed=elapsed)

    def moment_sweep(self, moduli: Sequence[int], spec: ShiftSpec, delta: Optional[float] = None,
                     split: bool = False) -> Tuple[List[MomentReport], SweepSummary]:
        """
        Moment reports for every modulus, in the given order, plus the ratio window.

        Raises:
            DomainError: If the list is empty or contains q < 3
            ResourceError: If any modulus exceeds the moment cap
        """
        moduli = [int(q) for q in moduli]
        if not moduli:
            raise DomainError("moment_sweep requires at least one modulus", field="moduli")
        for q in moduli:
            _check_modulus(q, spec)

        logger.info(f"Sweep over {len(moduli)} moduli ({moduli[0]}..{moduli[-1]}) with {self.threads} workers")
        overrides = settings.model_dump()
        payloads = [(q, spec.model_dump(), delta, split, overrides) for q in moduli]
        reports = ordered_map(_report_task, payloads, self.threads)
        return reports, self.summarize(reports)

    @staticmethod
    def summarize(reports: Sequence[MomentReport]) -> SweepSummary:
        """Ratio window over the reports that were not skipped."""
        kept = [r.ratio for r in reports if r.skipped_reason is None]
        skipped = [r.q for r in reports if r.skipped_reason is not None]
        if not kept:
            return SweepSummary(count=0, skipped=skipped)
        low, high = min(kept), max(kept)
        return SweepSummary(count=len(kept), skipped=skipped, min_ratio=low, max_ratio=high,
                            spread=high / low if low > 0 else None)
