"""Exact rational coefficient families c_k and d_k used by the operator synthesis.

The c family is defined by the factorial convolution

    1/n! = sum_{k=0..n} c_k / (n-k+1)!          (n >= 0)

whose generating function is x / (1 - exp(-x)); the d family satisfies

    1/(n+2)! = sum_{k=0..n} d_k / (n-k+1)!      (n >= 0)

and is related to c by d_k = (-1)^k c_{k+1}.  Everything is solved from the
convolutions in exact rational arithmetic; no Bernoulli-number table is
hardcoded anywhere.  The positive rationals B_k recovered from the even
entries via c_{2k} = (-1)^(k-1) B_k / (2k)! are exposed for testing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q
from math import factorial


def c_coeffs(kmax: int) -> list[Q]:
    """c_0 .. c_kmax, solved from the defining convolution."""
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    c: list[Q] = []
    for n in range(kmax + 1):
        # isolate the k = n term: c_n = 1/n! - sum_{k<n} c_k/(n-k+1)!
        s = Q(1, factorial(n))
        for k in range(n):
            s -= c[k] * Q(1, factorial(n - k + 1))
        c.append(s)
    return c


def d_coeffs(kmax: int) -> list[Q]:
    """d_0 .. d_kmax via d_k = (-1)^k c_{k+1}, then verified directly."""
    c = c_coeffs(kmax + 1)
    d = [(-1) ** k * c[k + 1] for k in range(kmax + 1)]
    for n in range(kmax + 1):
        lhs = Q(1, factorial(n + 2))
        rhs = sum(d[k] * Q(1, factorial(n - k + 1)) for k in range(n + 1))
        if lhs != rhs:
            raise AssertionError(f"d-convolution failed at n={n}")
    return d


def bernoulli_positive(kmax: int) -> list[Q]:
    """B_1 .. B_kmax in the all-positive convention B_k = (-1)^(k-1) (2k)! c_{2k}."""
    c = c_coeffs(2 * kmax)
    return [(-1) ** (k - 1) * factorial(2 * k) * c[2 * k] for k in range(1, kmax + 1)]


@dataclass(frozen=True)
class CoeffTable:
    """Frozen pair of coefficient lists with the invariants pre-checked."""

    c: tuple[Q, ...]
    d: tuple[Q, ...]

    @classmethod
    def build(cls, depth: int) -> "CoeffTable":
        # keep one extra c entry so every stored d_k has its partner c_{k+1}
        table = cls(c=tuple(c_coeffs(depth + 1)), d=tuple(d_coeffs(depth)))
        table.check()
        return table

    @property
    def depth(self) -> int:
        return len(self.d) - 1

    def check(self) -> None:
        if self.c[0] != 1 or self.c[1] != Q(1, 2):
            raise AssertionError("c_0, c_1 have the wrong values")
        for k in range(3, len(self.c), 2):
            if self.c[k] != 0:
                raise AssertionError(f"c_{k} is nonzero")
        for k, dk in enumerate(self.d):
            if dk != (-1) ** k * self.c[k + 1]:
                raise AssertionError(f"d_{k} inconsistent with c_{k + 1}")
