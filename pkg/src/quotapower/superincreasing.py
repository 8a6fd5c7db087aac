"""Closed-form Shapley values for super-increasing weights.

Weights here are in DECREASING order, ``w_1 > w_2 > ... > w_n > 0``, with
``w_i > w_{i+1} + ... + w_n``. Agent labels are 1-based. Every quota
``q in (0, w(N)]`` falls in exactly one interval ``(w(P^-), w(P)]`` where
``P^-`` is the coalition whose binary code ``beta`` is one less than that of
``P``; the values depend on ``q`` only through ``P``.

``to_increasing`` / ``from_increasing`` convert to the non-decreasing order
used by ``quotapower.game`` and ``quotapower.ballsbins`` (label ``i`` there is
label ``n + 1 - i`` here).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .game import as_fraction

__all__ = [
    "SIWeights",
    "PSet",
    "QuotaInterval",
    "LimitSpec",
    "Relation",
    "is_super_increasing",
    "beta",
    "find_pset",
    "pset_dary",
    "closed_form",
    "si_shapley",
    "si_shapley_all",
    "si_interval",
    "adjacent_relation",
    "jump_delta",
    "is_tight_jump",
    "combinatorial_tail",
    "identity_sides",
    "breakpoints",
    "limit_shapley",
    "prefix_consistency",
    "dary_weights",
    "to_increasing",
    "from_increasing",
]


def is_super_increasing(weights: Iterable[int], order: str | None = None) -> bool:
    """Strict super-increasing test.

    ``order=None`` sorts first. ``"decreasing"`` checks ``w_i > sum(w[i+1:])``
    on the sequence as given; ``"increasing"`` checks ``w_i > sum(w[:i])``.
    Non-positive weights are never super-increasing.
    """
    w = list(weights)
    if not w or any(x <= 0 for x in w):
        return False
    if order is None:
        w = sorted(w, reverse=True)
    elif order == "increasing":
        w = w[::-1]
    elif order != "decreasing":
        raise ValueError(f"unknown order {order!r}")
    tail = 0
    for x in reversed(w):
        if x <= tail:
            return False
        tail += x
    return True


@dataclass(frozen=True)
class SIWeights:
    weights: tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if not is_super_increasing(w, order="decreasing"):
            raise ValueError(
                "weights must be positive, strictly decreasing and satisfy "
                f"w_i > sum of later weights: {w}"
            )

    @classmethod
    def from_any(cls, weights: Iterable[int]) -> "SIWeights":
        return cls(tuple(sorted(weights, reverse=True)))

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def total(self) -> int:
        return sum(self.weights)

    def weight_of(self, members: Iterable[int]) -> int:
        return sum(self.weights[a - 1] for a in members)


def beta(members: Iterable[int], n: int) -> int:
    """Binary code ``sum(2**(n - i))`` of a coalition (1-based labels)."""
    total = 0
    for i in members:
        if not 1 <= i <= n:
            raise IndexError(f"agent {i} outside 1..{n}")
        total += 1 << (n - i)
    return total


def _members_of_code(code: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(1, n + 1) if code >> (n - i) & 1)


@dataclass(frozen=True)
class PSet:
    members: tuple[int, ...]
    n: int

    def __post_init__(self):
        m = tuple(int(a) for a in self.members)
        object.__setattr__(self, "members", m)
        if not m:
            raise ValueError("a PSet is non-empty")
        if any(b <= a for a, b in zip(m, m[1:])):
            raise ValueError(f"members must be strictly increasing: {m}")
        if m[0] < 1 or m[-1] > self.n:
            raise ValueError(f"members must lie in 1..{self.n}: {m}")

    @classmethod
    def from_beta(cls, code: int, n: int) -> "PSet":
        if not 1 <= code < 1 << n:
            raise ValueError(f"beta {code} outside [1, 2**{n} - 1]")
        return cls(_members_of_code(code, n), n)

    @property
    def beta(self) -> int:
        return beta(self.members, self.n)

    def predecessor(self) -> tuple[int, ...]:
        """Members of ``P^-`` (possibly empty)."""
        return _members_of_code(self.beta - 1, self.n)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"


@dataclass(frozen=True)
class QuotaInterval:
    lower: Fraction  # exclusive
    upper: Fraction  # inclusive
    pset: PSet

    def __contains__(self, q) -> bool:
        return self.lower < q <= self.upper


def _check_quota(weights: SIWeights, q) -> Fraction:
    q = as_fraction(q)
    if not 0 < q <= weights.total:
        raise ValueError(f"quota must lie in (0, {weights.total}], got {q}")
    return q


def find_pset(weights: SIWeights, q) -> PSet:
    """Greedy scan: take agent i iff q exceeds w(chosen) + w(i+1..n)."""
    q = _check_quota(weights, q)
    w = weights.weights
    n = len(w)
    suffix = [0] * (n + 1)
    for k in range(n - 1, -1, -1):
        suffix[k] = suffix[k + 1] + w[k]
    chosen = []
    acc = 0
    for k in range(n):
        if q > acc + suffix[k + 1]:
            chosen.append(k + 1)
            acc += w[k]
    return PSet(tuple(chosen), n)


def dary_weights(d: int, n: int) -> SIWeights:
    """``(d**(n-1), ..., d, 1)``."""
    if d < 2:
        raise ValueError("base must be at least 2")
    return SIWeights(tuple(d ** (n - i) for i in range(1, n + 1)))


def pset_dary(d: int, n: int, q) -> PSet:
    """Interval location for ``w_i = d**(n-i)`` from the base-d digits of ceil(q)."""
    if d < 2:
        raise ValueError("base must be at least 2")
    q = as_fraction(q)
    top = (d**n - 1) // (d - 1)
    if not 0 < q <= top:
        raise ValueError(f"quota must lie in (0, {top}], got {q}")
    c = math.ceil(q)
    digits = []
    for _ in range(n):
        c, r = divmod(c, d)
        digits.append(r)
    digits.reverse()  # digits[i-1] is t_i, most significant first
    big = [i for i in range(1, n + 1) if digits[i - 1] > 1]
    if not big:
        return PSet(tuple(i for i in range(1, n + 1) if digits[i - 1] == 1), n)
    ell = big[0]
    k = max(i for i in range(1, ell) if digits[i - 1] == 0)
    return PSet(tuple(i for i in range(1, k) if digits[i - 1] == 1) + (k,), n)


def _term(a: int, t: int) -> Fraction:
    return Fraction(1, a * math.comb(a - 1, t))


def closed_form(members: Sequence[int], i: int) -> Fraction:
    """Shapley value of agent ``i`` when the quota's interval is given by ``members``.

    Works for any increasing member list, so it also evaluates the limiting
    formula on finite sets. An empty list gives 0 (quota 0).
    """
    members = list(members)
    if i in members:
        s = members.index(i)
        value = _term(i, s)
        for t in range(s + 1, len(members)):
            value -= _term(members[t], t - 1)
        return value
    return sum(
        (_term(a, t) for t, a in enumerate(members) if a > i), Fraction(0)
    )


def si_shapley(weights: SIWeights, q, i: int) -> Fraction:
    if not 1 <= i <= weights.n:
        raise IndexError(f"agent index {i} outside 1..{weights.n}")
    return closed_form(find_pset(weights, q).members, i)


def si_shapley_all(weights: SIWeights, q) -> list[Fraction]:
    members = find_pset(weights, q).members
    return [closed_form(members, i) for i in range(1, weights.n + 1)]


def si_interval(weights: SIWeights, pset: PSet) -> QuotaInterval:
    if pset.n != weights.n:
        raise ValueError("pset and weights disagree on n")
    lower = weights.weight_of(pset.predecessor())
    return QuotaInterval(Fraction(lower), Fraction(weights.weight_of(pset.members)), pset)


def breakpoints(weights: SIWeights) -> list[QuotaInterval]:
    """All ``2**n - 1`` intervals in increasing order of quota."""
    n = weights.n
    if n > 20:
        raise ValueError("breakpoint enumeration is limited to n <= 20")
    return [si_interval(weights, PSet.from_beta(b, n)) for b in range(1, 1 << n)]


class Relation(enum.Enum):
    EQUAL = "equal"
    STRICTLY_GREATER = "strictly-greater"


def adjacent_relation(weights: SIWeights, q, i: int) -> Relation:
    """How phi_i compares to phi_{i+1}, read off membership in A(q) alone."""
    if not 1 <= i < weights.n:
        raise IndexError(f"agent index {i} outside 1..{weights.n - 1}")
    members = find_pset(weights, q).members
    here, nxt = i in members, (i + 1) in members
    if here == nxt:
        return Relation.EQUAL
    if nxt:
        return Relation.EQUAL if i + 1 == members[-1] else Relation.STRICTLY_GREATER
    return Relation.STRICTLY_GREATER


def jump_delta(weights: SIWeights, pset: PSet, i: int) -> Fraction:
    """phi_i(w(P)) - phi_i(w(P^-)); the value at quota 0 counts as 0."""
    if pset.n != weights.n:
        raise ValueError("pset and weights disagree on n")
    if not 1 <= i <= weights.n:
        raise IndexError(f"agent index {i} outside 1..{weights.n}")
    after = closed_form(pset.members, i)
    before = closed_form(pset.predecessor(), i)
    return after - before


def is_tight_jump(pset: PSet, i: int) -> bool:
    """Cases where a jump reaches 1/n.

    P = {n}; P = {1..i}; P = {i, n} with i < n; or i = n with P = {n-1}.
    """
    n = pset.n
    m = pset.members
    if m == (n,):
        return True
    if m == tuple(range(1, i + 1)):
        return True
    if i < n and m == (i, n):
        return True
    return i == n and m == (n - 1,)


def combinatorial_tail(p: int, t: int, k: int) -> Fraction:
    """``1/(p C(p-1,t)) - sum_{l=1..k} 1/((p+l) C(p+l-1, t+l-1))``.

    Telescopes to ``1/((p+k) C(p+k-1, t+k))``.
    """
    if not (p > t >= 0 and k >= 0):
        raise ValueError(f"need p > t >= 0 and k >= 0, got p={p}, t={t}, k={k}")
    value = _term(p, t)
    for ell in range(1, k + 1):
        value -= _term(p + ell, t + ell - 1)
    return value


def identity_sides(p: int, t: int) -> tuple[Fraction, Fraction]:
    """Both sides of 1/(p C(p-1,t)) + 1/(p C(p-1,t-1)) = 1/((p-1) C(p-2,t-1))."""
    if not p > t >= 1:
        raise ValueError(f"need p > t >= 1, got p={p}, t={t}")
    return _term(p, t) + _term(p, t - 1), _term(p - 1, t - 1)


def to_increasing(values: Sequence) -> list:
    """Reverse a per-agent list from decreasing-weight to increasing-weight order."""
    return list(values)[::-1]


def from_increasing(values: Sequence) -> list:
    return list(values)[::-1]


@dataclass(frozen=True)
class LimitSpec:
    """Infinite sequence ``w_i = d**(-i)`` truncated at ``depth`` agents."""

    base: int
    depth: int
    quota: Fraction

    def __post_init__(self):
        object.__setattr__(self, "quota", as_fraction(self.quota))
        if self.base < 2:
            raise ValueError("base must be at least 2")
        if self.depth < 1:
            raise ValueError("depth must be positive")
        if not 0 < self.quota < Fraction(1, self.base - 1):
            raise ValueError(
                f"quota must lie in (0, 1/(d-1)) = (0, {Fraction(1, self.base - 1)})"
            )

    @property
    def scale(self) -> int:
        return self.base**self.depth

    def prefix(self) -> SIWeights:
        """Integer weights ``d**(K-i)`` (the prefix scaled by ``d**K``)."""
        return dary_weights(self.base, self.depth)

    def weight_of(self, members: Iterable[int]) -> Fraction:
        return sum((Fraction(1, self.base**a) for a in members), Fraction(0))


def limit_shapley(spec: LimitSpec, i: int) -> tuple[Fraction, Fraction]:
    """Value for the infinite sequence and an error bound.

    The bound is 0 when the truncated interval is already the limiting one:
    either ``q = w(P)`` exactly, or ``q`` exceeds ``w(P^-)`` computed with the
    infinite tail, ``w(P) - d**-a_r + d**-a_r / (d - 1)``. Otherwise it is
    ``1/(K-1)``.
    """
    if not 1 <= i < spec.depth:
        raise ValueError(f"need 1 <= i < depth, got i={i}, depth={spec.depth}")
    prefix = spec.prefix()
    scaled = spec.quota * spec.scale
    if scaled > prefix.total:
        raise ValueError(
            f"depth {spec.depth} too shallow: quota exceeds the prefix total"
        )
    members = find_pset(prefix, scaled).members
    value = closed_form(members, i)
    d = spec.base
    upper = spec.weight_of(members)
    last = Fraction(1, d ** members[-1])
    lower_inf = upper - last + last / (d - 1)
    if spec.quota == upper or spec.quota > lower_inf:
        return value, Fraction(0)
    return value, Fraction(1, spec.depth - 1)


def prefix_consistency(d: int, m: int, q, extra_depth: int = 2) -> bool:
    """Check phi^{w|m}_i(q) = phi^{w|n}_i(w(A|m(q))) for all i <= m.

    ``w_i = d**(-i)``. The left side uses the closed form on ``m`` agents; the
    right side re-solves the remapped quota with the counting DP on ``n``
    agents for every ``n`` in ``m..m+extra_depth``.
    """
    from .game import Game, shapley_all

    q = as_fraction(q)
    top = sum((Fraction(1, d**a) for a in range(1, m + 1)), Fraction(0))
    if not 0 < q <= top:
        raise ValueError(f"quota must lie in (0, {top}], got {q}")
    prefix = dary_weights(d, m)
    members = find_pset(prefix, q * d**m).members
    lhs = [closed_form(members, i) for i in range(1, m + 1)]
    remapped = sum((Fraction(1, d**a) for a in members), Fraction(0))
    for n in range(m, m + extra_depth + 1):
        w = dary_weights(d, n).weights
        rhs = shapley_all(Game(w, remapped * d**n))
        if list(rhs[:m]) != lhs:
            return False
    return True
