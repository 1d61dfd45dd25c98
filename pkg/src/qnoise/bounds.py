"""Counting bounds for nondegenerate quantum codes and the classical repetition baseline.

Finite-n checks use exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

GV_SCAN_LIMIT = 64
LOG2_3 = math.log2(3)


@dataclass(frozen=True)
class BoundQuery:
    l: int
    t: int
    n: int | None = None

    def __post_init__(self):
        if self.l < 1 or self.t < 0:
            raise ValueError("need l >= 1 and t >= 0")
        if self.n is not None and self.n < self.l:
            raise ValueError("need n >= l")


def error_volume(n: int, t: int) -> int:
    """Number of Pauli errors of weight <= t on n qubits, sum_i 3**i C(n, i)."""
    return sum(3**i * math.comb(n, i) for i in range(t + 1))


def hamming_feasible(l: int, t: int, n: int) -> bool:
    BoundQuery(l, t, n)
    return 2**l * error_volume(n, t) <= 2**n


def gv_feasible(l: int, t: int, n: int) -> bool:
    BoundQuery(l, t, n)
    return 2**l * error_volume(n, 2 * t) >= 2**n


def hamming_min_n(l: int, t: int) -> int:
    """Smallest n allowed by the quantum Hamming bound."""
    BoundQuery(l, t)
    n = l
    while not hamming_feasible(l, t, n):
        n += 1
    return n


def gv_max_n(l: int, t: int, limit: int = GV_SCAN_LIMIT) -> int:
    """Largest n <= ``limit`` satisfying the quantum Gilbert-Varshamov inequality.

    The inequality holds at n = l and eventually fails for good; the answer is
    the last feasible n before that final crossing. Equality counts as feasible.
    """
    BoundQuery(l, t)
    feasible = [n for n in range(l, limit + 1) if gv_feasible(l, t, n)]
    if feasible[-1] == limit:
        raise ValueError(f"inequality still holds at n={limit}; raise the scan limit")
    return feasible[-1]


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"entropy argument {x!r} outside [0, 1]")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def hamming_rate(x: float) -> float:
    """Asymptotic Hamming rate 1 - x log2 3 - H(x) at error rate x = t/n."""
    return 1.0 - x * LOG2_3 - binary_entropy(x)


def gv_rate(x: float) -> float:
    """Asymptotic Gilbert-Varshamov rate 1 - 2x log2 3 - H(2x)."""
    if not 0.0 <= 2 * x <= 1.0:
        raise ValueError(f"2*t/n = {2 * x!r} outside [0, 1]")
    return 1.0 - 2 * x * LOG2_3 - binary_entropy(2 * x)


def bisect_root(f, lo: float, hi: float, tol: float = 1e-8) -> float:
    flo = f(lo)
    if flo == 0:
        return lo
    if (flo > 0) == (f(hi) > 0):
        raise ValueError("root is not bracketed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def max_error_rate(tol: float = 1e-8) -> float:
    """Largest t/n for which the asymptotic Hamming rate is nonnegative (about 0.18929)."""
    return bisect_root(hamming_rate, 0.01, 0.5, tol)


def repetition_error(p: float) -> float:
    """Failure probability of three-bit majority voting: 3p^2(1-p) + p^3."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p!r} outside [0, 1]")
    return 3 * p**2 * (1 - p) + p**3
