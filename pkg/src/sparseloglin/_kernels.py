"""Hot numeric kernels: simplex pivoting and Poisson-Newton iteration.

Both kernels are written as loop-plus-numpy code that compiles cleanly
under numba.  When numba is importable they are JIT-compiled; setting
the environment variable ``SPARSELOGLIN_DISABLE_NUMBA=1`` (or running
without numba installed) selects the pure-numpy fallback, which is the
same code uncompiled.  ``benchmarks/bench_kernels.py`` compares the two
paths.
"""

import os

import numpy as np

__all__ = [
    "HAS_NUMBA",
    "using_numba",
    "simplex_core",
    "newton_poisson_core",
    "simplex_core_numpy",
    "newton_poisson_core_numpy",
]

# Simplex status codes
OPTIMAL = 0
UNBOUNDED = 3
ITERATION_LIMIT = 5

# Newton status codes
CONVERGED = 0
MAX_ITER = 1
STALLED = 2


def _simplex_core(T, basis, tol, max_iter):
    """Minimize over a dense tableau in place using Bland's rule.

    ``T`` is (m+1, n+1): rows 0..m-1 hold [A | b] with b >= 0 and an
    identity embedded at the columns listed in ``basis``; the last row
    holds [reduced costs | -objective].  Entering variable: lowest
    column index with reduced cost below -tol.  Leaving variable:
    minimum ratio, ties broken by lowest basic-variable index.  Returns
    (status, pivot_count).
    """
    m = T.shape[0] - 1
    n = T.shape[1] - 1
    pivots = 0
    while True:
        pivcol = -1
        for j in range(n):
            if T[m, j] < -tol:
                pivcol = j
                break
        if pivcol < 0:
            return OPTIMAL, pivots

        best = np.inf
        for i in range(m):
            a = T[i, pivcol]
            if a > tol:
                r = T[i, n] / a
                if r < best:
                    best = r
        if best == np.inf:
            return UNBOUNDED, pivots
        # Degenerate ties are resolved toward the lowest basic-variable
        # index; together with the entering rule this is Bland's
        # anti-cycling pivot.
        thresh = best + 1e-9 * (1.0 + abs(best))
        pivrow = -1
        for i in range(m):
            a = T[i, pivcol]
            if a > tol:
                r = T[i, n] / a
                if r <= thresh and (pivrow < 0 or basis[i] < basis[pivrow]):
                    pivrow = i

        piv = T[pivrow, pivcol]
        T[pivrow, :] = T[pivrow, :] / piv
        col = T[:, pivcol].copy()
        col[pivrow] = 0.0
        T -= np.outer(col, T[pivrow, :])
        T[:, pivcol] = 0.0
        T[pivrow, pivcol] = 1.0
        basis[pivrow] = pivcol

        pivots += 1
        if pivots >= max_iter:
            return ITERATION_LIMIT, pivots


def _newton_poisson_core(X, y, theta0, grad_tol, step_tol, max_iter):
    """Maximize the Poisson log-likelihood y'(X theta) - sum(exp(X theta)).

    Damped Newton: full step first, halved until the objective stops
    getting worse (a 1e-12 relative band lets the final steps polish
    the gradient once the objective is flat to machine precision).

    Convergence requires BOTH a small gradient and a small Newton step.
    When the maximizer lies on the boundary (extended-MLE case with all
    cells included) the gradient still vanishes along the divergent
    path while the step stays O(1), so a gradient-only test would
    silently accept a diverging parameter vector.

    Returns (theta, status, n_iter, grad_norm).
    """
    n_rows, d = X.shape
    theta = theta0.copy()
    eta = X @ theta
    if np.max(eta) > 700.0:
        # start must be evaluable; caller guarantees a sane theta0
        return theta, STALLED, 0, np.inf
    mu = np.exp(eta)
    f = y @ eta - mu.sum()

    status = MAX_ITER
    it = 0
    gnorm = np.inf
    while it < max_iter:
        grad = X.T @ (y - mu)
        gnorm = np.max(np.abs(grad))

        H = X.T @ (X * mu.reshape(-1, 1))
        # tiny ridge keeps the solve well-posed when means collapse
        lam = 1e-12 * max(np.trace(H) / d, 1.0)
        for k in range(d):
            H[k, k] += lam
        delta = np.linalg.solve(H, grad)

        if gnorm <= grad_tol and np.max(np.abs(delta)) <= step_tol * (1.0 + np.max(np.abs(theta))):
            status = CONVERGED
            break

        step = 1.0
        accepted = False
        f_floor = f - 1e-12 * (1.0 + abs(f))
        for _ in range(60):
            eta_try = X @ (theta + step * delta)
            if np.max(eta_try) <= 700.0:
                mu_try = np.exp(eta_try)
                f_try = y @ eta_try - mu_try.sum()
                if f_try > f_floor:
                    theta = theta + step * delta
                    eta = eta_try
                    mu = mu_try
                    f = max(f, f_try)
                    accepted = True
                    break
            step *= 0.5
        it += 1
        if not accepted:
            status = STALLED
            break

    return theta, status, it, gnorm


def _env_disabled():
    return os.environ.get("SPARSELOGLIN_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false")


HAS_NUMBA = False
simplex_core = _simplex_core
newton_poisson_core = _newton_poisson_core
simplex_core_numpy = _simplex_core
newton_poisson_core_numpy = _newton_poisson_core

if not _env_disabled():
    try:
        from numba import njit

        simplex_core = njit(cache=True)(_simplex_core)
        newton_poisson_core = njit(cache=True)(_newton_poisson_core)
        HAS_NUMBA = True
    except ImportError:
        pass


def using_numba():
    """True when the JIT-compiled kernels are active."""
    return HAS_NUMBA
