"""
Helpers for dense Dirichlet-series coefficient arrays.

An array f of length L + 1 stores f(1..L) in f[1..L]; f[0] is ignored.
"""
import numpy as np


def dirichlet_convolve(f: np.ndarray, g: np.ndarray, length: int) -> np.ndarray:
    """
    (f * g)(n) = sum_{d | n} f(d) g(n/d) for n <= length.

    The loop runs over the nonzero entries of the sparser operand, so sparse
    prime-supported factors cost O(#support * length / d).

    Args:
        f: Coefficients, length >= length + 1
        g: Coefficients, length >= length + 1
        length: Truncation

    Returns:
        Array of length + 1 entries
    """
    f = np.asarray(f)[: length + 1]
    g = np.asarray(g)[: length + 1]
    if np.count_nonzero(f[1:]) > np.count_nonzero(g[1:]):
        f, g = g, f
    out = np.zeros(length + 1, dtype=np.result_type(f.dtype, g.dtype))
    for d in np.flatnonzero(f[1:]) + 1:
        d = int(d)
        m = length // d
        out[d: d * m + 1: d] += f[d] * g[1: m + 1]
    return out


def unit_series(length: int, dtype=float) -> np.ndarray:
    """The Dirichlet identity: 1 at n = 1, zero elsewhere."""
    out = np.zeros(length + 1, dtype=dtype)
    if length >= 1:
        out[1] = 1
    return out


def twist(f: np.ndarray, t: float) -> np.ndarray:
    """n -> f(n) n^{-it}."""
    n = np.arange(f.shape[0], dtype=float)
    n[0] = 1.0
    return f * np.exp(-1j * t * np.log(n))
