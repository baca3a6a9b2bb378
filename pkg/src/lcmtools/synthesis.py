"""Monotone-tracking controller synthesis by convex pole placement.

The plant ``B/A`` of order ``n`` is closed with the two-degree-of-freedom law
``G U = K_c R - F Y`` where ``F`` and ``G`` have degree ``n - 1``.  The
``2n - 1`` closed-loop poles are chosen by a convex program in the shifted
variables ``pi = w sorted descending`` and ``v`` so that the closed loop
passes the complex-spectrum LCM certificate, and hence has a nonnegative
impulse response and a monotone step response.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import cvxpy as cp
import numpy as np
from scipy.optimize import linprog, minimize_scalar

from .certify import angle_bound, auto_delta, certify_corollary1
from .exceptions import CoprimalityError, DomainError, InfeasibleError, SynthesisError
from .majorization import PREFIX_SLACK, subsets_of_size
from .rational import Polynomial, RationalTF, _split_conjugates, simulate_step

#: Largest accepted constraint violation of a returned decision point.
VIOLATION_TOL = 1e-8
#: Largest accepted coefficient error of ``B F + A G`` against the target.
RESIDUAL_TOL = 1e-8
#: ``|Res(B, A)|`` at or below this is treated as a common factor.
RESULTANT_TOL = 1e-10
#: Sylvester matrices with a larger condition number are rejected.
COND_LIMIT = 1e12
#: Tolerance for the monotone-step and unit-DC-gain verification.
VERIFY_TOL = 1e-9

COSTS = ("polezero", "dominant", "feasibility")


@dataclass(frozen=True)
class SynthesisProblem:
    """Plant and tuning for one synthesis run.

    Parameters
    ----------
    plant : RationalTF
        Proper plant ``B/A`` with ``B(0) != 0``.
    delta : float
        Shift; closed-loop poles are placed with ``|p + delta| < delta``.
    mu : int
        Power of the shifted variables.
    theta : sequence of float, optional
        Angles of the shifted closed-loop poles, length ``2n - 1``.  The
        first ``n_r`` are zero and the tail comes in ``(t, -t)`` pairs.
        Defaults to all zeros.
    n_r : int, optional
        Number of real closed-loop poles (odd).  Defaults to the number of
        leading zeros in ``theta``, or ``2n - 1``.
    epsilon : float, optional
        Stability margin on ``pi_1 <= delta**mu - epsilon``.  Defaults to
        ``1e-6 * delta**mu``.
    cost : {"polezero", "dominant", "feasibility"} or callable
        ``"polezero"`` matches the dominant pole to the slowest real zero,
        ``"dominant"`` minimizes ``pi_1`` (fastest dominant pole) and
        ``"feasibility"`` is the zero objective.  A callable ``cost(pi, v)``
        must be convex and written with operations valid for both numpy
        arrays and cvxpy expressions.
    tie_break : bool
        Among optimal points pick the one with the smallest sum of free
        variables, i.e. the fastest remaining poles.
    """

    plant: RationalTF
    delta: float
    mu: int = 1
    theta: Optional[Sequence[float]] = None
    n_r: Optional[int] = None
    epsilon: Optional[float] = None
    cost: Union[str, Callable] = "polezero"
    tie_break: bool = True

    def __post_init__(self):
        plant = self.plant
        n = plant.n
        if n < 1:
            raise DomainError("plant must have at least one pole")
        if plant.m > n:
            raise DomainError(f"improper plant: m={plant.m} > n={n}")
        if int(self.mu) != self.mu or self.mu < 1:
            raise DomainError("mu must be a positive integer")
        mu = int(self.mu)
        delta = float(self.delta)
        lo = max([0.0] + [-z.real for z in plant.zeros])
        if not delta > lo:
            raise DomainError(f"delta={delta} must exceed {lo} (and be positive)")
        n_cl = 2 * n - 1
        theta = np.zeros(n_cl) if self.theta is None else np.asarray(self.theta, dtype=float)
        if theta.shape != (n_cl,):
            raise DomainError(f"theta needs {n_cl} entries, got {theta.size}")
        n_r = self.n_r
        if n_r is None:
            nonzero = np.flatnonzero(theta)
            n_r = int(nonzero[0]) if nonzero.size else n_cl
        if n_r % 2 != 1 or not 1 <= n_r <= n_cl:
            raise DomainError(f"n_r={n_r} must be odd and in [1, {n_cl}]")
        if np.any(theta[:n_r] != 0):
            raise DomainError("the first n_r angles must be zero")
        for j in range(n_r, n_cl, 2):
            if abs(theta[j] + theta[j + 1]) > 1e-12:
                raise DomainError(f"angles {j + 1} and {j + 2} must be opposite")
        bound = angle_bound(mu)
        if np.any(np.abs(theta) >= bound):
            raise DomainError(f"pole angles must satisfy |theta| < {bound:.6g} for mu={mu}")
        for z in plant.zeros:
            if abs(np.angle(z + delta)) >= bound:
                raise DomainError(f"zero {z} violates the angle bound at delta={delta}; increase delta")
        if plant.num(0.0) == 0:
            raise DomainError("B(0) = 0: no static gain K_c gives a unit DC gain")
        eps = 1e-6 * delta ** mu if self.epsilon is None else float(self.epsilon)
        if not eps > 0:
            raise DomainError("epsilon must be positive")
        if not callable(self.cost) and self.cost not in COSTS:
            raise DomainError(f"unknown cost {self.cost!r}; expected one of {COSTS} or a callable")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "theta", tuple(float(t) for t in theta))
        object.__setattr__(self, "n_r", n_r)
        object.__setattr__(self, "epsilon", eps)

    @property
    def n_cl(self):
        return 2 * self.plant.n - 1


def synthesis_auto_delta(plant, mu=1):
    """Default shift for synthesis: :func:`auto_delta` over the plant zeros only.

    Plant poles do not constrain ``delta`` because the controller moves them.
    """
    return auto_delta(RationalTF(1.0, plant.zeros, ()), mu)


@dataclass(frozen=True)
class DecisionPoint:
    """``w_sorted`` (``pi``) and ``v``, both of length ``2n - 1 + m``."""

    w_sorted: np.ndarray
    v: np.ndarray


def pole_zero_match_cost(w_sorted, zeros, delta, mu):
    """``|pi_1 - max over real zeros of (z + delta)**mu|``."""
    target = _zero_match_target(zeros, delta, mu)
    return abs(float(w_sorted[0]) - target)


def _zero_match_target(zeros, delta, mu):
    real = [z.real for z in map(complex, zeros) if z.imag == 0]
    if not real:
        raise DomainError("the pole/zero matching cost needs a real plant zero; use a custom cost")
    return (max(real) + delta) ** mu


@dataclass
class ConvexProgram:
    """Constraint rows of the synthesis program over ``x = [pi, v]``.

    Linear rows are ``A_ub x <= b_ub`` and ``A_eq x = b_eq``; ``x >= 0`` is
    implicit.  ``moments`` holds ``(k, rhs, label)`` for the concave rows
    ``sum pi**(k/mu) + sum cos(k theta) v**(k/mu) >= rhs``.
    """

    problem: SynthesisProblem
    size: int
    A_ub: np.ndarray
    b_ub: np.ndarray
    ub_labels: list
    A_eq: np.ndarray
    b_eq: np.ndarray
    eq_labels: list
    moments: list
    n_prefix: int
    free: np.ndarray
    target: Optional[float] = None

    @property
    def is_linear(self):
        return not self.moments and not callable(self.problem.cost)

    def split(self, x):
        x = np.asarray(x, dtype=float)
        return x[:self.size], x[self.size:]

    def moment_lhs(self, x, k):
        pi, v = self.split(np.maximum(x, 0.0))
        pb = self.problem
        e = k / pb.mu
        weights = np.cos(k * np.asarray(pb.theta))
        return float(np.sum(pi ** e) + weights @ (v[:pb.n_cl] ** e))

    def objective(self, x):
        pi, v = self.split(x)
        cost = self.problem.cost
        if callable(cost):
            return float(cost(pi, v))
        if cost == "polezero":
            return abs(pi[0] - self.target)
        if cost == "dominant":
            return float(pi[0])
        return 0.0

    def violations(self, x):
        """Per-constraint violations (positive = violated) and their labels."""
        x = np.asarray(x, dtype=float)
        vals = [self.A_ub @ x - self.b_ub, np.abs(self.A_eq @ x - self.b_eq), -x]
        labels = list(self.ub_labels) + list(self.eq_labels)
        labels += [f"nonnegative pi_{i + 1}" for i in range(self.size)]
        labels += [f"nonnegative v_{i + 1}" for i in range(self.size)]
        vals.append(np.array([rhs - self.moment_lhs(x, k) for k, rhs, _ in self.moments]))
        labels += [lab for _, _, lab in self.moments]
        return np.concatenate(vals), labels

    def max_violation(self, x):
        vals, labels = self.violations(x)
        i = int(np.argmax(vals))
        return max(0.0, float(vals[i])), labels[i]


def formulate(problem):
    """Build the constraint rows for ``problem``.

    Rows, over ``x = [pi, v]`` with ``N = 2n - 1 + m`` entries each:

    * stability ``pi_1 <= delta**mu - epsilon``;
    * weak majorization, one row per prefix ``k`` and index set ``S`` with
      ``|S| = k``: ``sum_{i <= k} pi_i >= sum_{i in S} v_i``;
    * moment rows for ``k = 1 .. mu - 1`` over the ``2n - 1`` closed-loop poles;
    * ordering ``pi_i >= pi_{i+1}``;
    * fixed entries: ``pi_i = 0`` for ``i > n_r``, ``v_i = 0`` for ``i <= n_r``,
      ``v`` of the plant zeros equal to ``|z + delta|**mu`` and equal ``v``
      within each conjugate pair.
    """
    pb = problem
    plant, mu, delta = pb.plant, pb.mu, pb.delta
    n_cl, n_r = pb.n_cl, pb.n_r
    N = n_cl + plant.m
    ub_rows, b_ub, ub_labels = [], [], []

    def ub(row, rhs, label):
        ub_rows.append(row)
        b_ub.append(rhs)
        ub_labels.append(label)

    row = np.zeros(2 * N)
    row[0] = 1.0
    ub(row, delta ** mu - pb.epsilon, "stability: pi_1 <= delta^mu - epsilon")
    for k in range(1, N + 1):
        for S in subsets_of_size(N, k):
            row = np.zeros(2 * N)
            row[:k] = -1.0
            row[N + np.array(S)] = 1.0
            ub(row, 0.0, f"majorization k={k} S={tuple(i + 1 for i in S)}")
    for i in range(N - 1):
        row = np.zeros(2 * N)
        row[i + 1], row[i] = 1.0, -1.0
        ub(row, 0.0, f"ordering pi_{i + 1} >= pi_{i + 2}")

    eq_rows, b_eq, eq_labels = [], [], []

    def eq(idx, rhs, label, minus=None):
        row = np.zeros(2 * N)
        row[idx] = 1.0
        if minus is not None:
            row[minus] = -1.0
        eq_rows.append(row)
        b_eq.append(rhs)
        eq_labels.append(label)

    for i in range(n_r, N):
        eq(i, 0.0, f"fixed pi_{i + 1} = 0")
    for i in range(n_r):
        eq(N + i, 0.0, f"fixed v_{i + 1} = 0")
    for j, z in enumerate(plant.zeros):
        eq(N + n_cl + j, abs(z + delta) ** mu, f"fixed v_{n_cl + j + 1} = |z_{j + 1} + delta|^mu")
    for i in range(n_r, n_cl, 2):
        eq(N + i, 0.0, f"pairing v_{i + 1} = v_{i + 2}", minus=N + i + 1)

    moments = []
    for k in range(1, mu):
        rhs = sum(abs(z + delta) ** k * math.cos(k * np.angle(z + delta)) for z in plant.zeros)
        moments.append((k, float(rhs), f"moment k={k}"))

    free = np.zeros(2 * N, dtype=bool)
    free[:n_r] = True
    free[N + n_r:N + n_cl] = True
    target = _zero_match_target(plant.zeros, delta, mu) if pb.cost == "polezero" else None
    return ConvexProgram(pb, N, np.array(ub_rows), np.array(b_ub), ub_labels,
                         np.array(eq_rows).reshape(-1, 2 * N), np.array(b_eq), eq_labels,
                         moments, N, free, target)


def _project(prog, x):
    """Snap fixed entries exactly, equalize pairs and re-sort ``pi``."""
    pb = prog.problem
    N, n_r, n_cl = prog.size, pb.n_r, pb.n_cl
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    pi, v = x[:N].copy(), x[N:].copy()
    pi[n_r:] = 0.0
    pi[:n_r] = -np.sort(-pi[:n_r])
    v[:n_r] = 0.0
    for i in range(n_r, n_cl, 2):
        v[i] = v[i + 1] = 0.5 * (v[i] + v[i + 1])
    for j, z in enumerate(pb.plant.zeros):
        v[n_cl + j] = abs(z + pb.delta) ** pb.mu
    return np.concatenate([pi, v])


def _lift_dominant(prog, x):
    """Raise ``pi_1`` just enough to clear small deficits in the rows it enters.

    Every majorization prefix and every moment row is nondecreasing in
    ``pi_1``, so solver round-off there is removed by a tiny lift; the lift
    is kept only if the overall violation does not grow.
    """
    vals, labels = prog.violations(x)
    rows = np.array([lab.startswith(("majorization", "moment")) for lab in labels])
    deficit = float(np.max(vals[rows], initial=0.0))
    if deficit <= 0.0:
        return x
    current = prog.max_violation(x)[0]
    bump = deficit
    for _ in range(60):
        y = x.copy()
        y[0] += bump
        vals, _ = prog.violations(y)
        if np.max(vals[rows]) <= 0.0:
            return y if prog.max_violation(y)[0] <= current else x
        bump *= 2.0
    return x


def _solve_lp(prog, tie_break, margin):
    N = prog.size
    opts = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}
    cost = prog.problem.cost
    # x plus one epigraph variable t >= |pi_1 - target| for the matching cost
    extra = 1 if cost == "polezero" else 0
    A_ub = np.hstack([prog.A_ub, np.zeros((prog.A_ub.shape[0], extra))])
    b_ub = prog.b_ub - margin
    A_eq = np.hstack([prog.A_eq, np.zeros((prog.A_eq.shape[0], extra))])
    c = np.zeros(2 * N + extra)
    if extra:
        for sign in (1.0, -1.0):
            row = np.zeros(2 * N + 1)
            row[0], row[-1] = sign, -1.0
            A_ub = np.vstack([A_ub, row])
            b_ub = np.append(b_ub, sign * prog.target)
        c[-1] = 1.0
    elif cost == "dominant":
        c[0] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=prog.b_eq,
                  bounds=(0, None), method="highs-ds", options=opts)
    if res.status == 2:
        return None, "infeasible"
    if res.status == 3:
        raise SynthesisError("synthesis program is unbounded")
    if res.status != 0:
        raise SynthesisError(f"linear program failed: {res.message}")
    if tie_break:
        best = res.fun
        A2 = np.vstack([A_ub, c])
        b2 = np.append(b_ub, best + 1e-9 * max(1.0, abs(best)))
        c2 = np.append(prog.free.astype(float), np.zeros(extra))
        res2 = linprog(c2, A_ub=A2, b_ub=b2, A_eq=A_eq, b_eq=prog.b_eq,
                       bounds=(0, None), method="highs-ds", options=opts)
        if res2.status == 0:
            res = res2
    return res.x[:2 * N], "scipy-highs-ds"


def _cvx_moment(prog, x, k):
    """Concave left side of the order-``k`` moment row.

    Only free entries enter; power cones on entries pinned at zero are
    degenerate and stall the interior-point solver.
    """
    pb = prog.problem
    N, n_r, n_cl = prog.size, pb.n_r, pb.n_cl
    e = k / pb.mu
    expr = cp.sum(cp.power(x[:n_r], e))
    if n_cl > n_r:
        weights = np.cos(k * np.asarray(pb.theta[n_r:]))
        expr = expr + weights @ cp.power(x[N + n_r:N + n_cl], e)
    return expr


def _cvx_model(prog, x, margin):
    pb = prog.problem
    N = prog.size
    pi, v = x[:N], x[N:]
    cons = [prog.A_ub @ x <= prog.b_ub - margin, prog.A_eq @ x == prog.b_eq]
    for k, rhs, _ in prog.moments:
        cons.append(_cvx_moment(prog, x, k) >= rhs + margin)
    cost = pb.cost
    if callable(cost):
        obj = cost(pi, v)
    elif cost == "polezero":
        obj = cp.abs(pi[0] - prog.target)
    elif cost == "dominant":
        obj = pi[0]
    else:
        obj = cp.Constant(0.0)
    return cons, obj


#: Clarabel settings; the defaults leave moment rows violated by ~1e-5.
CLARABEL_OPTS = {"tol_feas": 1e-12, "tol_gap_abs": 1e-12, "tol_gap_rel": 1e-12, "max_iter": 500}
_ACCEPTED = (cp.OPTIMAL, cp.OPTIMAL_INACCURATE)


def _clarabel(problem):
    """Solve with tight settings, then with the defaults if that is not accepted.

    Very tight tolerances occasionally end in a spurious infeasibility
    status or a solver failure; the default settings usually recover.
    """
    for opts in (CLARABEL_OPTS, {}):
        try:
            with warnings.catch_warnings():
                # accuracy is judged by direct constraint evaluation instead
                warnings.simplefilter("ignore", UserWarning)
                problem.solve(solver=cp.CLARABEL, **opts)
        except cp.error.SolverError:
            continue
        if problem.status in _ACCEPTED:
            return


def _solve_cvx(prog, tie_break, margin):
    x = cp.Variable(2 * prog.size, nonneg=True)
    cons, obj = _cvx_model(prog, x, margin)
    problem = cp.Problem(cp.Minimize(obj), cons)
    _clarabel(problem)
    if problem.status in (cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE):
        raise SynthesisError("synthesis program is unbounded")
    if problem.status not in _ACCEPTED or x.value is None:
        return None, str(problem.status)
    first = x.value.copy()
    if tie_break:
        best = problem.value
        stage2 = cp.Problem(cp.Minimize(prog.free.astype(float) @ x),
                            cons + [obj <= best + 1e-9 * max(1.0, abs(best))])
        _clarabel(stage2)
        if stage2.status in _ACCEPTED and x.value is not None:
            second = x.value.copy()
            if prog.max_violation(_project(prog, second))[0] <= VIOLATION_TOL:
                return second, "cvxpy-clarabel"
    return first, "cvxpy-clarabel"


def _infeasibility_report(prog):
    """Least-infeasible point of the elastic program and its worst constraint."""
    pb = prog.problem
    N = prog.size
    x = cp.Variable(2 * N, nonneg=True)
    s_lin = cp.Variable(prog.A_ub.shape[0], nonneg=True)
    s_mom = cp.Variable(len(prog.moments), nonneg=True) if prog.moments else None
    cons = [prog.A_ub @ x <= prog.b_ub + s_lin, prog.A_eq @ x == prog.b_eq]
    total = cp.sum(s_lin)
    for i, (k, rhs, _) in enumerate(prog.moments):
        cons.append(_cvx_moment(prog, x, k) >= rhs - s_mom[i])
        total = total + s_mom[i]
    _clarabel(cp.Problem(cp.Minimize(total), cons))
    if x.value is None:
        return InfeasibleError("synthesis program is infeasible")
    value, label = prog.max_violation(x.value)
    return InfeasibleError(f"synthesis program is infeasible; most violated: {label} (by {value:.3e})",
                           constraint=label, violation=value)


def solve(prog):
    """Solve ``prog``; return ``(DecisionPoint, diagnostics)``.

    Linear programs (``mu = 1`` and a built-in cost) use the HiGHS dual
    simplex, so the optimum is a vertex.  Other programs go through cvxpy
    with Clarabel.  Every candidate is re-checked by direct constraint
    evaluation; the solve is repeated with the inequality rows tightened by
    a growing margin until the point also passes the certificate's slack.

    Raises
    ------
    InfeasibleError
        With the most violated constraint of the least-infeasible point.
    SynthesisError
        When no point within ``VIOLATION_TOL`` could be produced.
    """
    pb = prog.problem
    scale = pb.delta ** pb.mu
    best = None
    for margin in (m * scale for m in (0.0, 1e-10, 1e-9, 1e-8, 1e-7)):
        if prog.is_linear:
            x, solver = _solve_lp(prog, pb.tie_break, margin)
        else:
            x, solver = _solve_cvx(prog, pb.tie_break, margin)
        if x is None:
            break
        x = _project(prog, x)
        violation, label = prog.max_violation(x)
        # free entries pushed to zero stop just short of it; snap them if that helps
        snapped = _project(prog, np.where(prog.free & (x <= 1e-9 * scale), 0.0, x))
        snapped_violation, snapped_label = prog.max_violation(snapped)
        if snapped_violation <= violation:
            x = snapped
        x = _lift_dominant(prog, x)
        violation, label = prog.max_violation(x)
        if best is None or violation < best[0]:
            best = (violation, label, x, solver, margin)
        # the certificate's slack is PREFIX_SLACK relative to the largest entry;
        # a tenth of it leaves room for round-off in pole restoration
        if violation <= 0.1 * PREFIX_SLACK * max(1.0, float(np.max(x))):
            break
    if best is None:
        raise _infeasibility_report(prog)
    violation, label, x, solver, margin = best
    if violation > VIOLATION_TOL:
        raise SynthesisError(f"solver output violates {label} by {violation:.3e}")
    pi, v = prog.split(x)
    diag = {"objective": prog.objective(x), "max_violation": violation,
            "worst_constraint": label, "solver": solver, "margin": margin}
    return DecisionPoint(pi, v), diag


def restore_poles(point, problem):
    """Closed-loop poles from a decision point.

    ``pi_j**(1/mu) - delta`` for the ``n_r`` real poles and
    ``v_j**(1/mu) exp(i theta_j) - delta`` for the pairs; each pair is
    emitted as an exact conjugate pair.
    """
    pb = problem
    mu, delta = pb.mu, pb.delta
    pi, v = np.maximum(point.w_sorted, 0.0), np.maximum(point.v, 0.0)
    poles = [complex(pi[j] ** (1.0 / mu) - delta, 0.0) for j in range(pb.n_r)]
    for j in range(pb.n_r, pb.n_cl, 2):
        p = v[j] ** (1.0 / mu) * np.exp(1j * pb.theta[j]) - delta
        poles.extend([complex(p), complex(p).conjugate()])
    return poles


def char_poly(poles):
    """Monic real polynomial with the given conjugate-closed roots."""
    _split_conjugates(poles)
    return Polynomial.from_roots(poles)


def sylvester_matrix(b, a):
    """``2n x 2n`` matrix with ``M @ [f, g]`` the coefficients of ``B F + A G``.

    ``b`` and ``a`` are length-``n + 1`` descending coefficient arrays; column
    ``j < n`` holds ``b`` shifted down by ``j`` and column ``n + j`` holds ``a``
    shifted down by ``j``.
    """
    b, a = np.asarray(b, dtype=float), np.asarray(a, dtype=float)
    n = b.size - 1
    M = np.zeros((2 * n, 2 * n))
    for j in range(n):
        M[j:j + n + 1, j] = b
        M[j:j + n + 1, n + j] = a
    return M


def solve_sylvester(plant, a_cl):
    """Controller coefficients ``(f, g)`` with ``B F + A G = a_cl``.

    Raises
    ------
    CoprimalityError
        If ``B`` and ``A`` share a root (``|Res(B, A)| <= 1e-10``) or the
        Sylvester matrix is numerically singular.
    SynthesisError
        If the solution misses ``a_cl`` by more than ``1e-8`` in any coefficient.
    """
    n = plant.n
    target = np.asarray(a_cl, dtype=float)
    if target.size != 2 * n or target[0] != 1.0:
        raise DomainError(f"a_cl must be monic of degree {2 * n - 1}")
    res = np.prod([plant.num(p) for p in plant.poles])
    if abs(res) <= RESULTANT_TOL:
        raise CoprimalityError(f"B and A share a root (|Res(B, A)| = {abs(res):.3e})")
    M = sylvester_matrix(plant.num.padded(n + 1), plant.den.padded(n + 1))
    cond = np.linalg.cond(M)
    if cond > COND_LIMIT:
        raise CoprimalityError(f"Sylvester matrix is near singular (cond = {cond:.3e})")
    sol = np.linalg.solve(M, target)
    f, g = sol[:n], sol[n:]
    residual = np.max(np.abs(M @ sol - target))
    check = (plant.num * Polynomial(f) + plant.den * Polynomial(g)).padded(2 * n)
    residual = max(residual, float(np.max(np.abs(check - target))))
    if residual > RESIDUAL_TOL:
        raise SynthesisError(f"B F + A G misses a_cl by {residual:.3e}")
    return f, g


def compute_Kc(plant, F, G):
    """Static gain giving the closed loop a unit DC gain."""
    b0 = float(plant.num(0.0))
    if b0 == 0.0:
        raise DomainError("B(0) = 0: no static gain K_c gives a unit DC gain")
    return (b0 * float(F(0.0)) + float(plant.den(0.0)) * float(G(0.0))) / b0


@dataclass
class SynthesisResult:
    """Controller and closed loop of one synthesis run."""

    F: Polynomial
    G: Polynomial
    K_c: float
    closed_loop_poles: tuple
    closed_loop: RationalTF
    a_cl: Polynomial
    point: DecisionPoint
    objective: float
    max_violation: float
    sylvester_residual: float
    solver: str
    diagnostics: dict = field(default_factory=dict)


def synthesize(problem):
    """Run the full chain and verify the closed loop.

    formulate, solve, restore the poles, expand the characteristic
    polynomial, solve the Sylvester system and set ``K_c``.  The closed loop
    must then pass the complex-spectrum certificate at the problem's
    ``(mu, delta)``, have a unit DC gain and a nondecreasing sampled step
    response; otherwise SynthesisError is raised.
    """
    plant = problem.plant
    prog = formulate(problem)
    point, diag = solve(prog)
    poles = restore_poles(point, problem)
    radius = (problem.delta ** problem.mu - problem.epsilon) ** (1.0 / problem.mu)
    for p in poles:
        if abs(p + problem.delta) > radius * (1 + 1e-9) + 1e-12 or p.real >= 0:
            raise SynthesisError(f"restored pole {p} lies outside the stability disk")
    a_cl = char_poly(poles)
    f, g = solve_sylvester(plant, a_cl)
    F, G = Polynomial(f), Polynomial(g)
    K_c = compute_Kc(plant, F, G)
    closed = RationalTF(K_c * plant.gain, plant.zeros, tuple(poles))
    residual = float(np.max(np.abs((plant.num * F + plant.den * G).padded(2 * plant.n)
                                   - np.asarray(a_cl))))

    cert = certify_corollary1(closed, problem.mu, problem.delta, allow_boundary=True)
    if not cert.certified:
        raise SynthesisError(f"closed loop is not certified: {cert.verdict.value} {cert.witness}")
    dc = closed.dc_gain()
    if abs(dc - 1.0) > VERIFY_TOL:
        raise SynthesisError(f"closed-loop DC gain {dc} differs from 1")
    slowest = min(abs(p.real) for p in poles)
    t = np.linspace(0.0, 50.0 / slowest, 4000)
    y = simulate_step(closed, t)
    if np.min(np.diff(y)) < -VERIFY_TOL:
        raise SynthesisError("closed-loop step response is not monotone")
    diag = dict(diag, certificate=cert, step_check_points=t.size)
    return SynthesisResult(F, G, K_c, tuple(poles), closed, a_cl, point,
                           diag["objective"], diag["max_violation"], residual,
                           diag["solver"], diag)


def sensitivity(plant, F, G, omega):
    """``|S(i omega)|`` with ``S = A G / (B F + A G)``."""
    s = 1j * np.asarray(omega, dtype=float)
    AG = plant.den(s) * G(s)
    return np.abs(AG / (plant.num(s) * F(s) + AG))


def sensitivity_peak(plant, F, G, omega_min=1e-3, omega_max=1e4, n_grid=2000):
    """Peak of ``|S(i omega)|`` on a log grid, refined by golden-section search."""
    omega = np.logspace(np.log10(omega_min), np.log10(omega_max), n_grid)
    mag = sensitivity(plant, F, G, omega)
    i = int(np.argmax(mag))
    peak = float(mag[i])
    if 0 < i < n_grid - 1:
        u = np.log10(omega[i - 1:i + 2])
        res = minimize_scalar(lambda x: -float(sensitivity(plant, F, G, 10.0 ** x)),
                              bracket=tuple(u), method="golden", tol=1e-10)
        if u[0] <= res.x <= u[2]:
            peak = max(peak, -float(res.fun))
    return peak


def cascade_polynomials(num, den):
    """``(F, G)`` equivalent to the cascade law ``U = (num/den) (R - Y)``."""
    return Polynomial(np.atleast_1d(num)), Polynomial(np.atleast_1d(den))


def cascade_closed_loop(plant, num, den):
    """Reference-to-output transfer function of the cascade loop."""
    F, G = cascade_polynomials(num, den)
    N = plant.num * F
    return RationalTF.from_coeffs(N.coeffs, (N + plant.den * G).coeffs)
