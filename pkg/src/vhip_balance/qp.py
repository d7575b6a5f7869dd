"""Dense strictly convex quadratic programming for the per-tick controller.

Solves  minimize x' W x  subject to  A x = b,  G x <= h  with W symmetric
positive-definite, by a primal active-set method over factorized KKT
systems. Problems here are tiny (10 variables for the balance controller),
so worst-case latency matters more than asymptotic scaling; every working
set change is a fresh dense solve.

When the equality-constrained minimum violates the inequalities, a phase-1
feasibility LP locates a starting point (or certifies infeasibility).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import linprog

Matrix = NDArray[np.float64]
Vector = NDArray[np.float64]

SOLVED = "solved"
INFEASIBLE = "infeasible"
MAX_ITERATIONS = "max_iterations"


class RankDeficientError(ValueError):
    """Equality constraint rows are linearly dependent."""


@dataclass(frozen=True)
class QPProblem:
    """minimize x' W x  s.t.  A x = b,  G x <= h."""

    W: Matrix
    A: Matrix
    b: Vector
    G: Matrix
    h: Vector

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        n = W.shape[0]
        if W.shape != (n, n):
            raise ValueError(f"W must be square, got {W.shape}")
        if not np.allclose(W, W.T, atol=1e-12):
            raise ValueError("W must be symmetric within 1e-12")
        try:
            np.linalg.cholesky(W)
        except np.linalg.LinAlgError:
            raise ValueError("W must be positive-definite") from None
        A = np.asarray(self.A, dtype=float).reshape(-1, n)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        G = np.asarray(self.G, dtype=float).reshape(-1, n)
        h = np.asarray(self.h, dtype=float).reshape(-1)
        if A.shape[0] != b.shape[0]:
            raise ValueError(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
        if G.shape[0] != h.shape[0]:
            raise ValueError(f"G has {G.shape[0]} rows but h has {h.shape[0]} entries")
        if A.shape[0] > n:
            raise ValueError(f"more equality constraints ({A.shape[0]}) than variables ({n})")
        for name, value in (("W", W), ("A", A), ("b", b), ("G", G), ("h", h)):
            if not np.all(np.isfinite(value)):
                raise ValueError(f"{name} has non-finite entries")
            object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        return self.W.shape[0]


@dataclass(frozen=True)
class QPSolution:
    x: Vector
    active_set: tuple[int, ...]
    dual_eq: Vector
    dual_ineq: Vector
    status: str
    iterations: int = 0


def objective_value(problem: QPProblem, x: Vector) -> float:
    return float(x @ problem.W @ x)


class ActiveSetSolver:
    """Primal active-set solver with deterministic pivoting.

    One instance holds per-solve scratch state and must not be shared by
    concurrent solves; create one instance per control loop.
    """

    def __init__(
        self,
        feasibility_tol: float = 1e-9,
        stationarity_tol: float = 1e-8,
        max_iterations: int = 50,
    ):
        self.feasibility_tol = feasibility_tol
        self.stationarity_tol = stationarity_tol
        self.max_iterations = max_iterations

    def solve(self, problem: QPProblem, warm_start: tuple[int, ...] | None = None) -> QPSolution:
        """Return the unique global minimizer, or a non-solved status.

        ``warm_start`` is an optional guess of the optimal active set; it
        can only shorten the iteration count, never change the optimum.
        """
        n, p, m = problem.n, problem.A.shape[0], problem.G.shape[0]
        if p > 0 and np.linalg.matrix_rank(problem.A) < p:
            raise RankDeficientError("equality constraint rows are linearly dependent")

        if warm_start is not None:
            solution = self._try_working_set(problem, tuple(sorted(warm_start)))
            if solution is not None:
                return solution

        x = self._equality_minimum(problem)
        if x is None or np.any(problem.G @ x > problem.h + self.feasibility_tol):
            x = self._phase1(problem)
            if x is None:
                return QPSolution(
                    x=np.full(n, np.nan),
                    active_set=(),
                    dual_eq=np.full(p, np.nan),
                    dual_ineq=np.full(m, np.nan),
                    status=INFEASIBLE,
                )
        return self._primal_active_set(problem, x)

    # -- internals --------------------------------------------------------

    def _kkt_solve(self, problem: QPProblem, working: list[int]):
        """Solve the equality-constrained subproblem for the working set.

        Returns (x, dual_eq, dual_working) or None if the KKT matrix is
        singular (linearly dependent working set).
        """
        n, p = problem.n, problem.A.shape[0]
        Gw = problem.G[working]
        k = len(working)
        K = np.zeros((n + p + k, n + p + k))
        K[:n, :n] = 2.0 * problem.W
        K[:n, n:n + p] = problem.A.T
        K[n:n + p, :n] = problem.A
        K[:n, n + p:] = Gw.T
        K[n + p:, :n] = Gw
        rhs = np.concatenate([np.zeros(n), problem.b, problem.h[working]])
        try:
            sol = np.linalg.solve(K, rhs)
        except np.linalg.LinAlgError:
            return None
        return sol[:n], sol[n:n + p], sol[n + p:]

    def _equality_minimum(self, problem: QPProblem) -> Vector | None:
        result = self._kkt_solve(problem, [])
        return None if result is None else result[0]

    def _phase1(self, problem: QPProblem) -> Vector | None:
        """Feasibility LP: minimize sum(s) s.t. A x = b, G x - s <= h, s >= 0.

        Returns a feasible point, or None when the residual stays positive
        (the constraint set is empty).
        """
        n, m = problem.n, problem.G.shape[0]
        cost = np.concatenate([np.zeros(n), np.ones(m)])
        A_ub = np.hstack([problem.G, -np.eye(m)])
        A_eq = np.hstack([problem.A, np.zeros((problem.A.shape[0], m))]) \
            if problem.A.shape[0] else None
        bounds = [(None, None)] * n + [(0.0, None)] * m
        result = linprog(
            cost,
            A_ub=A_ub,
            b_ub=problem.h,
            A_eq=A_eq,
            b_eq=problem.b if problem.A.shape[0] else None,
            bounds=bounds,
            method="highs",
        )
        if not result.success or result.fun > 10.0 * self.feasibility_tol * max(1, m):
            return None
        return result.x[:n]

    def _try_working_set(self, problem: QPProblem, working: tuple[int, ...]) -> QPSolution | None:
        """Check whether a candidate active set is already optimal."""
        if any(i < 0 or i >= problem.G.shape[0] for i in working):
            return None
        result = self._kkt_solve(problem, list(working))
        if result is None:
            return None
        x, nu, mu_w = result
        if np.any(problem.G @ x > problem.h + self.feasibility_tol):
            return None
        if np.any(mu_w < -self.stationarity_tol):
            return None
        return self._package(problem, x, nu, list(working), np.maximum(mu_w, 0.0), 1)

    def _primal_active_set(self, problem: QPProblem, x: Vector) -> QPSolution:
        working: list[int] = []
        m = problem.G.shape[0]
        nu = np.zeros(problem.A.shape[0])
        for iteration in range(1, self.max_iterations + 1):
            result = self._kkt_solve(problem, working)
            if result is None:
                # Dependent working set; drop the most recent addition.
                working.pop()
                continue
            x_eq, nu, mu_w = result
            step = x_eq - x
            if np.max(np.abs(step), initial=0.0) <= self.feasibility_tol:
                x = x_eq
                if len(working) == 0 or np.min(mu_w) >= -self.stationarity_tol:
                    return self._package(problem, x, nu, working, mu_w, iteration)
                # Drop the constraint with the most negative multiplier
                # (lowest index on ties, for determinism).
                drop = int(np.argmin(mu_w))
                del working[drop]
                continue
            # Step toward x_eq, blocked by the nearest violated constraint.
            alpha = 1.0
            blocker = -1
            gx = problem.G @ x
            gstep = problem.G @ step
            for i in range(m):
                if i in working or gstep[i] <= self.feasibility_tol:
                    continue
                alpha_i = (problem.h[i] - gx[i]) / gstep[i]
                if alpha_i < alpha - 1e-14:
                    alpha = max(alpha_i, 0.0)
                    blocker = i
            x = x + alpha * step
            if blocker >= 0:
                working.append(blocker)
        return QPSolution(
            x=x,
            active_set=tuple(working),
            dual_eq=nu,
            dual_ineq=np.zeros(m),
            status=MAX_ITERATIONS,
            iterations=self.max_iterations,
        )

    def _package(
        self,
        problem: QPProblem,
        x: Vector,
        nu: Vector,
        working: list[int],
        mu_w: Vector,
        iterations: int,
    ) -> QPSolution:
        mu = np.zeros(problem.G.shape[0])
        for idx, i in enumerate(working):
            mu[i] = mu_w[idx]
        return QPSolution(
            x=x,
            active_set=tuple(working),
            dual_eq=nu,
            dual_ineq=mu,
            status=SOLVED,
            iterations=iterations,
        )


def kkt_residuals(problem: QPProblem, solution: QPSolution) -> tuple[float, float, float, float]:
    """KKT residual norms (stationarity, primal eq, primal ineq, complementarity)."""
    if solution.status != SOLVED:
        raise ValueError(f"KKT residuals require a solved QP, got status {solution.status!r}")
    x = solution.x
    stationarity = 2.0 * problem.W @ x + problem.A.T @ solution.dual_eq \
        + problem.G.T @ solution.dual_ineq
    primal_eq = problem.A @ x - problem.b if problem.A.shape[0] else np.zeros(0)
    slack = problem.G @ x - problem.h
    primal_ineq = np.maximum(slack, 0.0)
    complementarity = solution.dual_ineq * slack
    norm = lambda v: float(np.max(np.abs(v), initial=0.0))  # noqa: E731
    return norm(stationarity), norm(primal_eq), norm(primal_ineq), norm(complementarity)
