"""Seeded random systems for property suites and acceptance runs.

Poles are uniform in ``[-10, -0.1]`` (real) or conjugate pairs with real
part in the same range and ``0 < |Im| <= 5``.  Zeros use the same recipe
but their real part may reach ``+5``.  The seed defaults to
``DEFAULT_SEED`` and can be overridden with the ``LCM_SEED`` environment
variable.
"""

import os

import numpy as np

from .rational import RationalTF

DEFAULT_SEED = 20220711


def rng_from_env(default=DEFAULT_SEED):
    return np.random.default_rng(int(os.environ.get("LCM_SEED", default)))


def random_roots(rng, count, lo=-10.0, hi=-0.1, im_max=5.0, real_only=False):
    """``count`` conjugate-closed roots; pairs appear with probability 1/2."""
    out = []
    while len(out) < count:
        if not real_only and count - len(out) >= 2 and rng.random() < 0.5:
            c = complex(rng.uniform(lo, hi), rng.uniform(1e-3, im_max))
            out.extend([c, c.conjugate()])
        else:
            out.append(complex(rng.uniform(lo, hi), 0.0))
    return out


def random_system(rng, n, m, real_only=False, gain=None, repeated=False):
    """Random ``RationalTF`` with ``n`` poles and ``m`` zeros.

    ``repeated`` duplicates the first real pole (needs ``n >= 2``).
    ``gain`` defaults to a random sign times a magnitude in ``[0.5, 2]``,
    with the positive sign four times as likely.
    """
    poles = random_roots(rng, n, real_only=real_only)
    if repeated and n >= 2:
        p = complex(rng.uniform(-10.0, -0.1), 0.0)
        poles = [p, p] + random_roots(rng, n - 2, real_only=real_only)
    zeros = random_roots(rng, m, hi=5.0, real_only=real_only)
    if gain is None:
        gain = rng.uniform(0.5, 2.0) * (1.0 if rng.random() < 0.8 else -1.0)
    return RationalTF(gain, zeros, poles)


def random_majorizing_pair(rng, n, lo=0.0, hi=10.0, y=None):
    """Random ``(x, y)`` in ``[lo, hi]**n`` with ``x`` weakly majorizing ``y``.

    ``x`` starts as ``y`` sorted, receives random transfers from smaller to
    larger entries (which preserve majorization), then random nonnegative
    increments.  Both vectors are returned in shuffled order.  ``y`` may be
    given, in which case only ``x`` is random.
    """
    y = rng.uniform(lo, hi, n) if y is None else np.asarray(y, dtype=float)
    x = np.sort(y)[::-1].copy()
    for _ in range(int(rng.integers(0, 2 * n + 1))):
        if n < 2:
            break
        i, j = sorted(rng.choice(n, 2, replace=False))
        amount = rng.uniform(0, min(x[j] - lo, hi - x[i]))
        x[i] += amount
        x[j] -= amount
    if rng.random() < 0.5:
        x = np.minimum(x + rng.exponential(1.0, n) * (rng.random(n) < 0.5), hi)
    return rng.permutation(x), y


def random_commensurable(rng, max_exponent=12, max_order=4):
    """Real spectrum on the integers ``-1 .. -max_exponent`` (unit ``gamma = 1``), ``K = 1``."""
    n = int(rng.integers(1, max_order + 1))
    m = int(rng.integers(0, n + 1))
    poles = -rng.integers(1, max_exponent + 1, n).astype(float)
    zeros = -rng.integers(1, max_exponent + 1, m).astype(float)
    return RationalTF(1.0, zeros, poles)


def random_near_lcm(rng, n, spread=3.0):
    """Real ``n``-pole, ``n``-zero system whose poles sit near or right of its zeros.

    Roughly half of the draws pass the sufficient certificates at small
    ``mu``, which makes them useful for implication properties.
    """
    zeros = rng.uniform(-10.0, -0.5, n)
    poles = np.minimum(zeros + rng.normal(0.5, 1.0, n) * spread / 3.0, -0.05)
    return RationalTF(1.0, zeros, poles)


def random_feasible_point(prog, rng, max_tries=10_000):
    """Random feasible ``x = [pi, v]`` of a synthesis program, by rejection.

    Free entries are drawn uniformly below the stability bound, fixed
    entries are set exactly; draws violating any row are discarded.
    """
    pb = prog.problem
    N, top = prog.size, pb.delta ** pb.mu - pb.epsilon
    for _ in range(max_tries):
        x = np.zeros(2 * N)
        x[:pb.n_r] = np.sort(rng.uniform(0.0, top, pb.n_r))[::-1]
        for j in range(pb.n_r, pb.n_cl, 2):
            x[N + j] = x[N + j + 1] = rng.uniform(0.0, top)
        for j, z in enumerate(pb.plant.zeros):
            x[N + pb.n_cl + j] = abs(z + pb.delta) ** pb.mu
        if prog.max_violation(x)[0] == 0.0:
            return x
    raise RuntimeError("no feasible point found")
