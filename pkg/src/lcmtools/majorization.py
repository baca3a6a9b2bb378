"""Weak majorization primitives."""

from itertools import combinations

import numpy as np

from .exceptions import DomainError

#: Absolute slack on every prefix-sum comparison, absorbs summation round-off.
PREFIX_SLACK = 1e-12


def sort_desc(x):
    """Return the components of ``x`` sorted in descending order."""
    return -np.sort(-np.asarray(x, dtype=float).ravel())


def prefix_sums(x):
    return np.cumsum(np.asarray(x, dtype=float))


def weakly_majorizes(x, y, tol=0.0):
    """True iff ``x`` weakly majorizes ``y``.

    Every descending prefix sum of ``x`` must dominate the corresponding one
    of ``y`` up to ``tol + PREFIX_SLACK``.
    """
    x, y = np.asarray(x, dtype=float).ravel(), np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise DomainError(f"length mismatch: {x.size} vs {y.size}")
    gap = prefix_sums(sort_desc(x)) - prefix_sums(sort_desc(y))
    return bool(np.all(gap >= -(tol + PREFIX_SLACK)))


def majorization_gap(x, y):
    """Smallest prefix-sum margin ``min_k (sum x_k - sum y_k)`` and its index ``k``."""
    x, y = np.asarray(x, dtype=float).ravel(), np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise DomainError(f"length mismatch: {x.size} vs {y.size}")
    gap = prefix_sums(sort_desc(x)) - prefix_sums(sort_desc(y))
    if gap.size == 0:
        return np.inf, 0
    k = int(np.argmin(gap))
    return float(gap[k]), k + 1


def subsets_of_size(n, k):
    """All index sets ``omega`` with ``|omega| = k`` out of ``range(n)``."""
    return combinations(range(n), k)


def subset_max(v, k):
    """``max`` over all size-``k`` index subsets of the sum of ``v`` by enumeration.

    Equal to the sum of the ``k`` largest entries; the enumeration is what the
    synthesis program expands into one linear row per subset.
    """
    v = np.asarray(v, dtype=float)
    if not 0 <= k <= v.size:
        raise DomainError(f"k={k} outside [0, {v.size}]")
    return max(sum(v[list(s)]) for s in subsets_of_size(v.size, k)) if k else 0.0
