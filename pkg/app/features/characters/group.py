"""
Dirichlet character groups.

The unit group mod q is split by CRT into cyclic components: one per odd prime
power (generated by its smallest primitive root), a single component of order 2
for 4 || q, and the pair (-1, 5) of orders (2, 2^{e-2}) for 2^e || q with e >= 3.
A character is an exponent vector over the components; its value at a unit n is
exp(2 pi i sum_i e_i log_i(n) / n_i), kept as an exact angle until rendering.
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from math import gcd
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from app.core.config import settings
from app.core.exceptions import DomainError, ResourceError
from app.features.characters.arithmetic import euler_phi, factorize, phi_star, primitive_root

logger = logging.getLogger(__name__)


@lru_cache(maxsize=256)
def unit_roots(n: int) -> np.ndarray:
    """
    exp(2 pi i k / n) for k = 0..n-1, exact at multiples of a quarter turn.

    Args:
        n: Number of roots

    Returns:
        Read-only complex array of length n
    """
    k = np.arange(n)
    roots = np.exp(2j * np.pi * k / n)
    roots[0] = 1.0
    if n % 2 == 0:
        roots[n // 2] = -1.0
    if n % 4 == 0:
        roots[n // 4] = 1j
        roots[3 * n // 4] = -1j
    roots.flags.writeable = False
    return roots


def _valuations(x: np.ndarray, p: int, cap: int) -> np.ndarray:
    """p-adic valuation of each positive entry, capped at `cap` (zero entries get cap)."""
    v = np.zeros(x.shape, dtype=np.int64)
    x = x.copy()
    for _ in range(cap):
        hit = (x % p == 0)
        v += hit
        x = np.where(hit, x // p, 1)
    return v


@dataclass(frozen=True)
class CyclicComponent:
    """One cyclic factor of (Z/qZ)^*."""
    prime: int
    exponent: int
    modulus: int
    generator: int
    order: int
    log_table: np.ndarray
    role: str = "cyclic"

    def log(self, n: int) -> int:
        return int(self.log_table[n % self.modulus])


def _cyclic_component(p: int, e: int) -> CyclicComponent:
    m = p ** e
    g = primitive_root(m)
    order = euler_phi(m)
    table = np.full(m, -1, dtype=np.int64)
    v = 1
    for k in range(order):
        table[v] = k
        v = v * g % m
    return CyclicComponent(prime=p, exponent=e, modulus=m, generator=g, order=order, log_table=table)


def _two_components(e: int) -> List[CyclicComponent]:
    m = 2 ** e
    if e == 2:
        table = np.full(4, -1, dtype=np.int64)
        table[1], table[3] = 0, 1
        return [CyclicComponent(prime=2, exponent=2, modulus=4, generator=3, order=2, log_table=table)]

    order5 = 2 ** (e - 2)
    sign_table = np.full(m, -1, dtype=np.int64)
    five_table = np.full(m, -1, dtype=np.int64)
    v = 1
    for b in range(order5):
        sign_table[v], five_table[v] = 0, b
        sign_table[m - v], five_table[m - v] = 1, b
        v = v * 5 % m
    return [
        CyclicComponent(prime=2, exponent=e, modulus=m, generator=m - 1, order=2,
                        log_table=sign_table, role="sign"),
        CyclicComponent(prime=2, exponent=e, modulus=m, generator=5, order=order5,
                        log_table=five_table, role="five"),
    ]


class CharacterGroup:
    """
    All Dirichlet characters mod q.

    Characters are enumerated lexicographically in their exponent vectors; the
    position in that order is the character index used throughout reports.
    Every table is built once and read-only afterwards.
    """

    def __init__(self, q: int, components: List[CyclicComponent]):
        self.q = q
        self.components = tuple(components)
        self.shape: Tuple[int, ...] = tuple(c.order for c in components)
        self.size = int(np.prod(self.shape, dtype=np.int64)) if self.shape else 1
        self.exponent = reduce(lambda a, b: a // gcd(a, b) * b, self.shape, 1)
        self._weights = tuple(self.exponent // n for n in self.shape)

    def __repr__(self) -> str:
        return f"CharacterGroup(q={self.q}, shape={self.shape})"

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator["DirichletCharacter"]:
        for exps in itertools.product(*(range(n) for n in self.shape)):
            yield DirichletCharacter(self, tuple(exps))

    # -- residues ---------------------------------------------------------

    @cached_property
    def unit_residues(self) -> np.ndarray:
        """Residues 0 <= r < q coprime to q, ascending."""
        r = np.arange(self.q, dtype=np.int64)
        units = r[np.gcd(r, self.q) == 1]
        units.flags.writeable = False
        return units

    @cached_property
    def unit_coords(self) -> Tuple[np.ndarray, ...]:
        """Discrete logs of every unit residue, one array per component."""
        units = self.unit_residues
        return tuple(c.log_table[units % c.modulus] for c in self.components)

    def logs(self, n: int) -> Optional[Tuple[int, ...]]:
        """Discrete-log vector of n, or None when gcd(n, q) > 1."""
        if gcd(n, self.q) != 1:
            return None
        return tuple(c.log(n) for c in self.components)

    # -- characters -------------------------------------------------------

    def character(self, key: Union[int, Tuple[int, ...]]) -> "DirichletCharacter":
        """
        Character by index or exponent vector.

        Raises:
            DomainError: If the key is outside the group
        """
        if isinstance(key, (int, np.integer)):
            if not 0 <= key < self.size:
                raise DomainError(f"character index {key} outside 0..{self.size - 1}", field="index")
            exps = tuple(int(e) for e in np.unravel_index(int(key), self.shape)) if self.shape else ()
            return DirichletCharacter(self, exps)
        exps = tuple(int(e) for e in key)
        if len(exps) != len(self.shape) or any(not 0 <= e < n for e, n in zip(exps, self.shape)):
            raise DomainError(f"exponent vector {exps} does not fit group shape {self.shape}")
        return DirichletCharacter(self, exps)

    @property
    def principal(self) -> "DirichletCharacter":
        return DirichletCharacter(self, (0,) * len(self.shape))

    def angle_numerators(self, n: int) -> np.ndarray:
        """
        Numerators k with chi(n) = exp(2 pi i k / exponent) for every character.

        Raises:
            DomainError: If n is not a unit mod q
        """
        logs = self.logs(n)
        if logs is None:
            raise DomainError(f"{n} is not coprime to {self.q}", field="n")
        total = np.zeros(self.shape, dtype=np.int64)
        for axis, (log, weight, order) in enumerate(zip(logs, self._weights, self.shape)):
            view = [1] * len(self.shape)
            view[axis] = order
            total = total + (np.arange(order, dtype=np.int64) * (log * weight)).reshape(view)
        return (total % self.exponent).reshape(self.size)

    def values_at(self, n: int) -> np.ndarray:
        """chi(n) for every character (zeros when gcd(n, q) > 1)."""
        if gcd(n, self.q) != 1:
            return np.zeros(self.size, dtype=complex)
        return unit_roots(self.exponent)[self.angle_numerators(n)]

    @cached_property
    def parities(self) -> np.ndarray:
        """0 for even and 1 for odd characters, in enumeration order."""
        if self.q <= 2:
            return np.zeros(self.size, dtype=np.int64)
        nums = self.angle_numerators(self.q - 1)
        return (nums != 0).astype(np.int64)

    @cached_property
    def conductors(self) -> np.ndarray:
        """Conductor of every character, in enumeration order."""
        grid = np.ones(self.shape, dtype=np.int64)
        ncomp = len(self.shape)
        axis = 0
        while axis < ncomp:
            comp = self.components[axis]
            if comp.role == "sign":
                five = self.components[axis + 1]
                eps = np.arange(2).reshape(2, 1)
                j = np.arange(five.order, dtype=np.int64).reshape(1, five.order)
                v2 = _valuations(j, 2, five.exponent)
                part = np.where(j != 0, 2 ** (comp.exponent - v2), np.where(eps == 1, 4, 1))
                view = [1] * ncomp
                view[axis], view[axis + 1] = 2, five.order
                grid = grid * part.reshape(view)
                axis += 2
                continue
            x = np.arange(comp.order, dtype=np.int64)
            if comp.prime == 2:
                part = np.where(x == 0, 1, 4)
            else:
                vp = _valuations(x, comp.prime, comp.exponent - 1)
                f = np.where(x == 0, 0, comp.exponent - np.minimum(vp, comp.exponent - 1))
                part = comp.prime ** f
            view = [1] * ncomp
            view[axis] = comp.order
            grid = grid * part.reshape(view)
            axis += 1
        return grid.reshape(self.size)

    @cached_property
    def primitive_mask(self) -> np.ndarray:
        return self.conductors == self.q

    @property
    def primitive_count(self) -> int:
        return int(self.primitive_mask.sum())

    # -- transforms -------------------------------------------------------

    def transform(self, weights: np.ndarray) -> np.ndarray:
        """
        sum_a chi(a) w(a) for every character at once.

        The weights are laid out on the discrete-log grid and summed by an
        inverse multi-dimensional FFT; non-unit residues do not contribute.

        Args:
            weights: Array of shape (q,) or (q, B) indexed by residue mod q

        Returns:
            Array of shape (size,) or (size, B) in enumeration order
        """
        weights = np.asarray(weights)
        if weights.shape[0] != self.q:
            raise DomainError(f"weights must have {self.q} rows, got {weights.shape[0]}")
        extra = weights.shape[1:]
        unit_weights = weights[self.unit_residues].astype(complex)
        if not self.shape:
            return unit_weights.sum(axis=0).reshape((1,) + extra)
        grid = np.zeros(self.shape + extra, dtype=complex)
        grid[self.unit_coords] = unit_weights
        axes = tuple(range(len(self.shape)))
        out = np.fft.ifftn(grid, axes=axes) * self.size
        return out.reshape((self.size,) + extra)


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    """A character of a CharacterGroup, identified by its exponent vector."""
    group: CharacterGroup
    exponents: Tuple[int, ...]

    def __repr__(self) -> str:
        return f"DirichletCharacter(q={self.q}, exponents={self.exponents})"

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, DirichletCharacter) and other.q == self.q
                and other.exponents == self.exponents)

    def __hash__(self) -> int:
        return hash((self.q, self.exponents))

    def __call__(self, n: int) -> complex:
        return char_value(self, n)

    @property
    def q(self) -> int:
        return self.group.q

    @cached_property
    def index(self) -> int:
        if not self.exponents:
            return 0
        return int(np.ravel_multi_index(self.exponents, self.group.shape))

    def angle(self, n: int) -> Optional[Fraction]:
        """chi(n) = exp(2 pi i * angle), or None when gcd(n, q) > 1."""
        logs = self.group.logs(n)
        if logs is None:
            return None
        num = sum(e * l * w for e, l, w in zip(self.exponents, logs, self.group._weights))
        return Fraction(num % self.group.exponent, self.group.exponent)

    @cached_property
    def values(self) -> np.ndarray:
        """chi(r) for r = 0..q-1."""
        group = self.group
        out = np.zeros(group.q, dtype=complex)
        total = np.zeros(group.unit_residues.size, dtype=np.int64)
        for e, coords, w in zip(self.exponents, group.unit_coords, group._weights):
            total = total + e * w * coords
        out[group.unit_residues] = unit_roots(group.exponent)[total % group.exponent]
        out.flags.writeable = False
        return out

    @cached_property
    def conductor(self) -> int:
        return int(self.group.conductors[self.index])

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.q

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    @cached_property
    def parity(self) -> int:
        """0 when chi(-1) = 1, 1 when chi(-1) = -1."""
        return int(self.group.parities[self.index])

    @cached_property
    def order(self) -> int:
        return reduce(lambda a, b: a // gcd(a, b) * b,
                      (n // gcd(e, n) for e, n in zip(self.exponents, self.group.shape)), 1)

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(self.group, tuple((-e) % n for e, n in zip(self.exponents, self.group.shape)))


def char_value(chi: DirichletCharacter, n: int) -> complex:
    """
    chi(n) rendered to a complex double; exact for angles that are quarter turns.

    Args:
        chi: Character
        n: Any integer

    Returns:
        Root of unity, or 0 when gcd(n, q) > 1
    """
    angle = chi.angle(n)
    if angle is None:
        return 0j
    if angle.denominator in (1, 2, 4):
        return complex(unit_roots(4)[angle.numerator * (4 // angle.denominator)])
    return complex(np.exp(2j * np.pi * float(angle)))


def character_group(q: int) -> CharacterGroup:
    """
    Build the character group mod q.

    Args:
        q: Modulus, 1 <= q <= MAX_GROUP_MODULUS

    Returns:
        Cached CharacterGroup

    Raises:
        DomainError: If q < 1
        ResourceError: If q exceeds the configured cap
    """
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}", field="q")
    if q > settings.MAX_GROUP_MODULUS:
        raise ResourceError("character group modulus", q, settings.MAX_GROUP_MODULUS)
    return _build_group(q)


@lru_cache(maxsize=64)
def _build_group(q: int) -> CharacterGroup:
    components: List[CyclicComponent] = []
    for p, e in factorize(q).factors:
        if p == 2:
            if e >= 2:
                components.extend(_two_components(e))
        else:
            components.append(_cyclic_component(p, e))

    group = CharacterGroup(q, components)
    logger.debug(f"Built character group mod {q}: shape {group.shape}, phi*={phi_star(q)}")
    return group


def character(q: int, key: Union[int, Tuple[int, ...]]) -> DirichletCharacter:
    """Character mod q by index or exponent vector."""
    return character_group(q).character(key)


def conductor(chi: DirichletCharacter) -> int:
    """Smallest modulus inducing chi."""
    return chi.conductor
