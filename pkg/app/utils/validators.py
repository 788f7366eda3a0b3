"""
Validation and parsing utilities for command-line input.
"""
import math
import re
from typing import List, Optional, Tuple

from app.core.exceptions import DomainError
from app.features.characters.arithmetic import is_prime

_RANGE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")

# Longest modulus list a single flag may expand to
MAX_MODULUS_LIST = 100_000


def validate_float_text(text: str) -> Tuple[bool, Optional[str]]:
    """
    Validate a decimal number.

    Returns:
        Tuple of (is_valid, error_message)
    """
    try:
        value = float(text)
    except (TypeError, ValueError):
        return False, f"'{text}' is not a decimal number"
    if not math.isfinite(value):
        return False, f"'{text}' is not finite"
    return True, None


def parse_float_list(text: str, name: str = "value") -> Tuple[float, ...]:
    """
    Parse a comma-separated list of decimals.

    Raises:
        DomainError: If the list is empty or an entry is malformed
    """
    items = [item.strip() for item in str(text).split(",") if item.strip()]
    if not items:
        raise DomainError(f"--{name} needs at least one number", field=name)
    values = []
    for item in items:
        is_valid, error = validate_float_text(item)
        if not is_valid:
            raise DomainError(f"--{name}: {error}", field=name)
        values.append(float(item))
    return tuple(values)


def parse_int_list(text: str, name: str = "value") -> Tuple[int, ...]:
    """Parse a comma-separated list of integers."""
    items = [item.strip() for item in str(text).split(",") if item.strip()]
    if not items:
        raise DomainError(f"--{name} needs at least one integer", field=name)
    try:
        return tuple(int(item) for item in items)
    except ValueError:
        raise DomainError(f"--{name}: '{text}' is not a list of integers", field=name)


def parse_complex(text: str, name: str = "s") -> complex:
    """
    Parse a complex number written as a+bi or a+bj.

    Examples:
        >>> parse_complex("0.5+14.134725i")
        (0.5+14.134725j)
        >>> parse_complex("2")
        (2+0j)

    Raises:
        DomainError: If the text is not a complex number
    """
    cleaned = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        value = complex(cleaned)
    except ValueError:
        raise DomainError(f"--{name}: '{text}' is not a complex number", field=name)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise DomainError(f"--{name}: '{text}' is not finite", field=name)
    return value


def parse_complex_list(text: str, name: str = "s") -> Tuple[complex, ...]:
    """Parse a comma-separated list of complex numbers."""
    items = [item for item in str(text).split(",") if item.strip()]
    if not items:
        raise DomainError(f"--{name} needs at least one complex number", field=name)
    return tuple(parse_complex(item, name) for item in items)


def validate_modulus_range(low: int, high: int) -> Tuple[bool, Optional[str]]:
    """
    Validate an inclusive modulus range.

    Returns:
        Tuple of (is_valid, error_message)
    """
    if low < 1:
        return False, f"moduli must be >= 1, got {low}"
    if high < low:
        return False, f"empty range {low}..{high}"
    if high - low + 1 > MAX_MODULUS_LIST:
        return False, f"range {low}..{high} exceeds {MAX_MODULUS_LIST} moduli"
    return True, None


def parse_moduli(text: str) -> List[int]:
    """
    Parse a modulus list.

    Accepted forms: `5,7,11`, `101..499`, a mix of both, and any of these
    behind a `prime:` filter, e.g. `prime:101..499`.

    Raises:
        DomainError: If the list is empty or malformed
    """
    text = str(text).strip()
    primes_only = text.startswith("prime:")
    if primes_only:
        text = text[len("prime:"):]

    moduli: List[int] = []
    for item in (part.strip() for part in text.split(",")):
        if not item:
            continue
        match = _RANGE.match(item)
        if match:
            low, high = int(match.group(1)), int(match.group(2))
            is_valid, error = validate_modulus_range(low, high)
            if not is_valid:
                raise DomainError(f"--moduli: {error}", field="moduli")
            moduli.extend(range(low, high + 1))
        elif item.isdigit():
            moduli.append(int(item))
        else:
            raise DomainError(f"--moduli: '{item}' is neither an integer nor a range a..b", field="moduli")

    if primes_only:
        moduli = [q for q in moduli if is_prime(q)]
    if not moduli:
        raise DomainError("--moduli selects no modulus", field="moduli")
    if len(moduli) > MAX_MODULUS_LIST:
        raise DomainError(f"--moduli selects more than {MAX_MODULUS_LIST} moduli", field="moduli")
    return moduli
