"""Finite unions of half-open real intervals and relative-density checks.

The canonical form is sorted, pairwise-disjoint components [a_j, b_j) with
touching neighbors merged.  All measure computations are exact arithmetic
on endpoints; no quadrature is involved anywhere in this module.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def _merge(raw):
    ivs = sorted((float(a), float(b)) for a, b in raw)
    for a, b in ivs:
        if not b > a:
            raise DomainError(f"interval [{a}, {b}) is empty or reversed")
    merged = []
    for a, b in ivs:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return tuple((a, b) for a, b in merged)


@dataclass(frozen=True)
class MeasurableSet:
    """Sorted disjoint union of half-open intervals [a_j, b_j)."""

    components: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "components", _merge(self.components))

    @staticmethod
    def empty() -> "MeasurableSet":
        return MeasurableSet(())

    @staticmethod
    def from_intervals(raw) -> "MeasurableSet":
        return MeasurableSet(tuple(raw))

    @staticmethod
    def interval(a: float, b: float) -> "MeasurableSet":
        return MeasurableSet(((a, b),))

    def __len__(self):
        return len(self.components)

    def __bool__(self):
        return bool(self.components)

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self.components))

    def shift(self, h: float) -> "MeasurableSet":
        return MeasurableSet(tuple((a + h, b + h) for a, b in self.components))

    def union(self, other: "MeasurableSet") -> "MeasurableSet":
        return MeasurableSet(self.components + other.components)

    def intersect(self, other: "MeasurableSet") -> "MeasurableSet":
        out = []
        for a, b in self.components:
            for c, d in other.components:
                lo, hi = max(a, c), min(b, d)
                if hi > lo:
                    out.append((lo, hi))
        return MeasurableSet(tuple(out))

    def clip(self, a: float, b: float) -> "MeasurableSet":
        return self.intersect(MeasurableSet.interval(a, b))

    def complement_within(self, a: float, b: float) -> "MeasurableSet":
        out, cur = [], a
        for c, d in self.clip(a, b).components:
            if c > cur:
                out.append((cur, c))
            cur = max(cur, d)
        if b > cur:
            out.append((cur, b))
        return MeasurableSet(tuple(out))

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.components:
            out |= (x >= a) & (x < b)
        return out

    def to_list(self):
        return [[a, b] for a, b in self.components]

    @staticmethod
    def from_list(lst) -> "MeasurableSet":
        return MeasurableSet(tuple((float(a), float(b)) for a, b in lst))


def normalize(raw) -> MeasurableSet:
    """Canonicalize a raw interval list (sorts, merges, validates)."""
    return MeasurableSet.from_intervals(raw)


def intersect_measure(gset: MeasurableSet, interval) -> float:
    """Lebesgue measure of gset intersected with one interval [lo, hi)."""
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        return 0.0
    total = 0.0
    for a, b in gset.components:
        total += max(0.0, min(b, hi) - max(a, lo))
    return total


def periodic_set(gamma: float, period: float, window) -> MeasurableSet:
    """Union of [k*period, k*period + gamma*period) covering the window."""
    lo, hi = window
    k0 = int(np.floor(lo / period)) - 1
    k1 = int(np.ceil(hi / period)) + 1
    comps = [(k * period, (k + gamma) * period) for k in range(k0, k1 + 1)]
    return MeasurableSet.from_intervals(comps).clip(lo, hi)


@dataclass(frozen=True)
class DensityReport:
    """Outcome of a (gamma, a)-relative density check against a covering."""

    gamma: float
    a: int
    gamma_star: float
    worst_index: int
    dense: bool
    violations: tuple  # (n, ratio) pairs with ratio < gamma

    def to_dict(self):
        return {
            "gamma": self.gamma,
            "a": self.a,
            "gamma_star": self.gamma_star,
            "worst_index": self.worst_index,
            "dense": self.dense,
            "violations": [[n, r] for n, r in self.violations],
        }


def max_gamma(gset: MeasurableSet, cov, a: int = 1):
    """Largest gamma for which gset is (gamma, a)-dense: min over n of |G meet I_n^a| / |I_n^a|.

    Returns (gamma_star, worst_index) with indices into cov.intervals().
    """
    from .covering import amplify  # local import to avoid a cycle

    if a < 1:
        raise DomainError("amplification a must be >= 1")
    intervals = cov.intervals()
    if not intervals:
        raise DomainError("covering has no complete intervals")
    best, best_n = np.inf, -1
    for n, iv in enumerate(intervals):
        amp = amplify(iv, a)
        ratio = intersect_measure(gset, amp) / (amp[1] - amp[0])
        if ratio < best:
            best, best_n = ratio, n
    return float(best), int(best_n)


def is_dense(gset: MeasurableSet, cov, gamma: float, a: int = 1) -> DensityReport:
    """Check |G meet I_n^a| >= gamma |I_n^a| for every covering interval."""
    from .covering import amplify

    if a < 1:
        raise DomainError("amplification a must be >= 1")
    intervals = cov.intervals()
    if not intervals:
        raise DomainError("covering has no complete intervals")
    ratios = []
    for iv in intervals:
        amp = amplify(iv, a)
        ratios.append(intersect_measure(gset, amp) / (amp[1] - amp[0]))
    ratios = np.asarray(ratios)
    worst = int(np.argmin(ratios))
    violations = tuple((int(n), float(r)) for n, r in enumerate(ratios) if r < gamma)
    return DensityReport(
        gamma=float(gamma),
        a=int(a),
        gamma_star=float(ratios[worst]),
        worst_index=worst,
        dense=bool(ratios[worst] >= gamma),
        violations=violations,
    )
