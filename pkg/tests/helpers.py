"""Shared test utilities: random QP generation and a brute-force oracle."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from vhip_balance.qp import QPProblem, objective_value


def random_qp(
    rng: np.random.Generator,
    n: int = 10,
    p: int = 7,
    m: int = 10,
    infeasible_bias: float = 0.0,
) -> QPProblem:
    """Random strictly convex QP with full-rank equalities.

    The inequality offsets are drawn around a random anchor point satisfying
    the equalities, so most problems are feasible with a mix of active and
    inactive rows at the optimum. ``infeasible_bias`` shifts the offsets to
    produce genuinely empty constraint sets some of the time.
    """
    q = rng.standard_normal((n, n))
    q, _ = np.linalg.qr(q)
    W = q @ np.diag(rng.uniform(0.1, 2.0, size=n)) @ q.T
    W = 0.5 * (W + W.T)

    while True:
        A = rng.standard_normal((p, n)) if p else np.zeros((0, n))
        if p == 0 or np.linalg.matrix_rank(A) == p:
            break
    x_anchor = rng.standard_normal(n)
    b = A @ x_anchor

    G = rng.standard_normal((m, n))
    slack = rng.uniform(-0.3, 1.0, size=m) - infeasible_bias
    h = G @ x_anchor + slack
    return QPProblem(W=W, A=A, b=b, G=G, h=h)


def enumerate_qp(problem: QPProblem, tol: float = 1e-8):
    """Globally solve a strictly convex QP by enumerating active sets.

    Tries every subset of inequality rows of size at most n - p as additional
    equalities, solves the KKT system, and keeps candidates that are primal
    feasible with non-negative multipliers on the tried rows. Returns
    ``(status, x, objective)`` with status "solved" or "infeasible".

    For a strictly convex QP with linearly independent equality rows, the
    optimum (when it exists) satisfies the KKT conditions with some active
    set of size at most n - p, so the enumeration is exhaustive.
    """
    n, p, m = problem.n, problem.A.shape[0], problem.G.shape[0]
    best_x, best_obj = None, np.inf
    for k in range(n - p + 1):
        for subset in combinations(range(m), k):
            Gw = problem.G[list(subset)]
            size = n + p + k
            K = np.zeros((size, size))
            K[:n, :n] = 2.0 * problem.W
            K[:n, n:n + p] = problem.A.T
            K[n:n + p, :n] = problem.A
            K[:n, n + p:] = Gw.T
            K[n + p:, :n] = Gw
            rhs = np.concatenate([np.zeros(n), problem.b, problem.h[list(subset)]])
            try:
                sol = np.linalg.solve(K, rhs)
            except np.linalg.LinAlgError:
                continue
            x = sol[:n]
            mu = sol[n + p:]
            if np.any(mu < -tol):
                continue
            if np.any(problem.G @ x > problem.h + tol):
                continue
            obj = objective_value(problem, x)
            if obj < best_obj:
                best_obj, best_x = obj, x
    if best_x is None:
        return "infeasible", None, np.inf
    return "solved", best_x, best_obj
