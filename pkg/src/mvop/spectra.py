"""Casimir eigenvalues, Delta-eigenvalues and Gel'fand-Tsetlin branching for SO(n)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import InvalidWeight, OutOfRange

__all__ = [
    "HighestWeight",
    "EigKey",
    "casimir_even",
    "casimir_odd",
    "casimir",
    "delta_eigenvalue",
    "delta_eigenvalue_via_casimir",
    "interlaces",
    "branch",
    "gt_dimension",
    "fundamental_dims",
    "top_dims",
    "fundamental_weight",
    "spherical_weight",
]


@dataclass(frozen=True)
class HighestWeight:
    """Highest weight of an irreducible SO(2l) ("even") or SO(2l+1) ("odd") module."""

    entries: tuple[int, ...]
    parity: str

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(m) for m in self.entries))
        if self.parity not in ("even", "odd"):
            raise InvalidWeight(f"parity must be 'even' or 'odd', got {self.parity!r}")
        m = self.entries
        if not m:
            raise InvalidWeight("a highest weight needs at least one entry")
        if self.parity == "odd":
            ok = all(m[i] >= m[i + 1] for i in range(len(m) - 1)) and m[-1] >= 0
        else:
            ok = all(m[i] >= m[i + 1] for i in range(len(m) - 2))
            if len(m) >= 2:
                ok = ok and m[-2] >= abs(m[-1])
        if not ok:
            raise InvalidWeight(f"{m} is not dominant for {self.parity} parity")

    @classmethod
    def for_group(cls, n: int, entries) -> "HighestWeight":
        """Weight of SO(n); checks that the length equals the rank floor(n/2)."""
        entries = tuple(entries)
        if n < 2:
            raise InvalidWeight("SO(n) weights are defined here for n >= 2")
        if len(entries) != n // 2:
            raise InvalidWeight(f"SO({n}) has rank {n // 2}, got {len(entries)} entries")
        return cls(entries, "even" if n % 2 == 0 else "odd")

    @property
    def rank(self) -> int:
        return len(self.entries)

    @property
    def group_n(self) -> int:
        return 2 * self.rank + (1 if self.parity == "odd" else 0)

    def to_json(self) -> dict:
        return {"weight": list(self.entries), "parity": self.parity}

    @classmethod
    def from_json(cls, obj: dict) -> "HighestWeight":
        return cls(tuple(obj["weight"]), obj["parity"])


@dataclass(frozen=True)
class EigKey:
    """Label (w, delta) of a spherical function inside a family."""

    w: int
    delta: int = 0

    def __post_init__(self):
        if self.w < 0:
            raise OutOfRange(f"w must be nonnegative, got {self.w}")
        if self.delta not in (-1, 0, 1):
            raise OutOfRange(f"delta must be -1, 0 or 1, got {self.delta}")


def _check(ell: int, m: HighestWeight, parity: str):
    if m.parity != parity:
        raise InvalidWeight(f"expected {parity} parity, got {m.parity}")
    if m.rank != ell:
        raise InvalidWeight(f"expected rank {ell}, got {m.rank}")


def casimir_even(ell: int, m: HighestWeight) -> Fraction:
    """Casimir eigenvalue of the SO(2l) module with highest weight m."""
    _check(ell, m, "even")
    return Fraction(sum(-mj * mj - 2 * (ell - j) * mj for j, mj in enumerate(m.entries, 1)))


def casimir_odd(ell: int, m: HighestWeight) -> Fraction:
    """Casimir eigenvalue of the SO(2l+1) module with highest weight m."""
    _check(ell, m, "odd")
    return Fraction(sum(-mj * mj - (2 * (ell - j) + 1) * mj for j, mj in enumerate(m.entries, 1)))


def casimir(m: HighestWeight) -> Fraction:
    if m.parity == "even":
        return casimir_even(m.rank, m)
    return casimir_odd(m.rank, m)


def _check_np(n: int, p: int):
    if n < 3:
        raise OutOfRange(f"n must be at least 3, got {n}")
    if not 1 <= p <= n // 2:
        raise OutOfRange(f"p must satisfy 1 <= p <= {n // 2}, got {p}")


def delta_eigenvalue(n: int, p: int, key: EigKey) -> Fraction:
    """Eigenvalue of Delta on the spherical function labelled (w, delta).

    ``-w(w+n+1)-p`` for delta = 0 and ``-w(w+n+1)-(n-p)`` for delta = +-1.
    """
    _check_np(n, p)
    if key.delta == -1 and not (n % 2 == 1 and p == (n - 1) // 2):
        raise OutOfRange("delta = -1 only occurs for odd n with p = (n-1)/2")
    w = key.w
    base = -w * (w + n + 1)
    return Fraction(base - p if key.delta == 0 else base - (n - p))


def interlaces(upper: HighestWeight, lower: HighestWeight) -> bool:
    """Betweenness conditions for restricting SO(N) to SO(N-1)."""
    a, b = upper.entries, lower.entries
    if upper.parity == "odd":
        # SO(2l+1) > SO(2l): a1 >= b1 >= a2 >= ... >= a_l >= b_l >= -a_l
        if lower.parity != "even" or lower.rank != upper.rank:
            return False
        l = upper.rank
        for j in range(l):
            if not a[j] >= b[j]:
                return False
            if j + 1 < l and not b[j] >= a[j + 1]:
                return False
        return b[-1] >= -a[-1]
    # SO(2l) > SO(2l-1): a1 >= b1 >= a2 >= ... >= a_{l-1} >= b_{l-1} >= |a_l|
    l = upper.rank
    if l == 1:
        return False
    if lower.parity != "odd" or lower.rank != l - 1:
        return False
    for j in range(l - 1):
        if not (a[j] >= b[j] >= abs(a[j + 1]) if j == l - 2 else a[j] >= b[j] >= a[j + 1]):
            return False
    return True


def branch(n: int, m: HighestWeight) -> list[HighestWeight]:
    """All SO(n-1) highest weights occurring in the restriction of m (each once), in lexicographic order."""
    if m.group_n != n:
        raise InvalidWeight(f"weight {m.entries} is not an SO({n}) weight")
    a = m.entries
    if n % 2 == 1:
        l = m.rank
        ranges = []
        for j in range(l):
            lo = a[j + 1] if j + 1 < l else -a[-1]
            ranges.append(range(lo, a[j] + 1))
        parity = "even"
    else:
        l = m.rank
        if l == 1:
            return []
        ranges = []
        for j in range(l - 1):
            lo = abs(a[j + 1]) if j == l - 2 else a[j + 1]
            ranges.append(range(lo, a[j] + 1))
        parity = "odd"
    return [HighestWeight(t, parity) for t in itertools.product(*ranges)]


@lru_cache(maxsize=None)
def _gt_dim(n: int, entries: tuple[int, ...]) -> int:
    if n <= 2:
        return 1
    m = HighestWeight.for_group(n, entries)
    return sum(_gt_dim(n - 1, b.entries) for b in branch(n, m))


def gt_dimension(n: int, m: HighestWeight) -> int:
    """Dimension of the SO(n) module, by counting Gel'fand-Tsetlin patterns."""
    if m.group_n != n:
        raise InvalidWeight(f"weight {m.entries} is not an SO({n}) weight")
    return _gt_dim(n, m.entries)


def delta_eigenvalue_via_casimir(n: int, m_top: HighestWeight, m_k: HighestWeight) -> Fraction:
    """Delta eigenvalue as the difference of SO(n+1) and SO(n) Casimir values."""
    if m_top.group_n != n + 1:
        raise InvalidWeight(f"{m_top.entries} is not an SO({n + 1}) weight")
    if m_k.group_n != n:
        raise InvalidWeight(f"{m_k.entries} is not an SO({n}) weight")
    if not interlaces(m_top, m_k):
        raise InvalidWeight(f"{m_top.entries} does not interlace {m_k.entries}")
    return casimir(m_top) - casimir(m_k)


def fundamental_weight(n: int, p: int) -> HighestWeight:
    """Highest weight (1,...,1,0,...,0) with p ones of Lambda^p(C^n)."""
    l = n // 2
    if not 0 <= p <= l:
        raise OutOfRange(f"p must satisfy 0 <= p <= {l}")
    return HighestWeight.for_group(n, (1,) * p + (0,) * (l - p))


def spherical_weight(n: int, p: int, key: EigKey) -> HighestWeight:
    """SO(n+1) weight (w+1, 1,...,1, delta, 0,...,0) with p-1 ones."""
    rank = (n + 1) // 2
    body = (key.w + 1,) + (1,) * (p - 1) + (key.delta,)
    if len(body) > rank:
        raise OutOfRange(f"p = {p} is too large for the SO({n + 1}) weight")
    return HighestWeight.for_group(n + 1, body + (0,) * (rank - len(body)))


def fundamental_dims(n: int, p: int) -> tuple[int, int]:
    """Dimensions of the two SO(n-1) submodules of Lambda^p(C^n)."""
    hi = (n - 1) // 2 if n % 2 else n // 2 - 1
    if n < 3 or not 1 <= p <= hi:
        raise OutOfRange(f"p must satisfy 1 <= p <= {hi} for n = {n}, got {p}")
    return comb(n - 1, p - 1), comb(n - 1, p)


def top_dims(ell: int) -> tuple[int, int, int]:
    """Dimensions of the SO(2l) submodules V_1, V_0, V_-1 of Lambda^l(C^{2l+1}).

    Ordered to match the components of H: (V_{+-1} half, V_0, other half).
    """
    if ell < 1:
        raise OutOfRange("ell must be at least 1")
    half = comb(2 * ell, ell) // 2
    return half, comb(2 * ell, ell - 1), half
