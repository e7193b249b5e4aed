"""Extended maximum likelihood fitting on the facial set.

Cells outside the face are treated as structural zeros: the Poisson
model is fit on the remaining cells only, over the span of a maximal
linearly independent subset of the restricted design columns.  Columns
not selected are reported as aliased (no finite estimate exists for
them).  Degrees of freedom, BIC, and the corrected BIC all use the
face dimension rather than the nominal model dimension.

The log-likelihood convention is l(m) = sum n log m - sum m with
0 log 0 = 0, i.e. no factorial constant.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .design import build_design, matrix_rank

__all__ = [
    "Coefficient",
    "FitResult",
    "FitError",
    "fit",
    "loglik",
    "deviance",
    "bic",
    "cbic",
    "standard_errors",
]


class FitError(RuntimeError):
    """Fit could not be completed: inconsistent inputs or no convergence."""


@dataclass(frozen=True)
class Coefficient:
    """One design column: its estimate, or an aliased marker."""

    label: object  # design.ColumnLabel
    estimate: float  # nan when aliased
    std_error: float  # nan when aliased or information is singular
    aliased: bool

    @property
    def term(self):
        return self.label.term


@dataclass(frozen=True)
class FitResult:
    """Extended-MLE fit summary."""

    fitted_means: np.ndarray = field(repr=False)  # per cell, 0 off the face
    coefficients: tuple = ()
    estimable_columns: tuple = ()  # design column indices kept in the fit
    loglik: float = np.nan
    deviance: float = np.nan
    model_dimension: int = 0  # d
    face_dimension: int = 0  # rank of the restricted design
    n_face_cells: int = 0
    residual_df: int = 0
    total: int = 0  # N
    bic: float = np.nan
    cbic: float = np.nan
    converged: bool = False
    n_iter: int = 0
    moment_residual: float = np.nan
    in_face: np.ndarray = field(default=None, repr=False)
    design: object = field(default=None, repr=False)

    def aliased_columns(self):
        return tuple(c for c in self.coefficients if c.aliased)

    def aliased_terms(self):
        return tuple(c.term for c in self.coefficients if c.aliased)


def _select_independent_columns(xf, order, rel_tol=None):
    """Greedy maximal independent column subset, preferring earlier columns.

    Walks columns in ``order`` and keeps one whenever it is not in the
    span of those already kept (twice-orthogonalized Gram-Schmidt).
    With the canonical order this prefers lower-order terms, so the
    aliased columns are the highest-order dependent ones.
    """
    if rel_tol is None:
        rel_tol = xf.shape[1] * np.float64(np.finfo(np.float64).eps) ** 0.5
    basis = []
    kept = []
    for j in order:
        v = xf[:, j]
        norm0 = np.linalg.norm(v)
        if norm0 == 0.0:
            continue
        r = v.copy()
        for q in basis:
            r -= (q @ r) * q
        for q in basis:
            r -= (q @ r) * q
        rnorm = np.linalg.norm(r)
        if rnorm > rel_tol * norm0:
            basis.append(r / rnorm)
            kept.append(int(j))
    return kept


def loglik(fitted_means, counts):
    """sum n log m - sum m with 0 log 0 = 0; -inf if n > 0 where m = 0."""
    m = np.asarray(fitted_means, dtype=np.float64)
    n = np.asarray(counts, dtype=np.float64)
    pos = m > 0.0
    if np.any(n[~pos] > 0):
        return -np.inf
    return float(n[pos] @ np.log(m[pos]) - m.sum())


def deviance(fitted_means, counts):
    """Poisson deviance 2 sum [n log(n/m) - (n - m)] over fitted cells."""
    m = np.asarray(fitted_means, dtype=np.float64)
    n = np.asarray(counts, dtype=np.float64)
    pos = m > 0.0
    if np.any(n[~pos] > 0):
        return np.inf
    npos = n[pos]
    mpos = m[pos]
    terms = -(npos - mpos)
    nz = npos > 0
    terms[nz] += npos[nz] * np.log(npos[nz] / mpos[nz])
    return float(2.0 * terms.sum())


def bic(result, total=None):
    """l - (d/2) log N with the nominal model dimension d."""
    n = result.total if total is None else total
    return result.loglik - 0.5 * result.model_dimension * math.log(n)


def cbic(result, total=None):
    """l - (d_F/2) log N: the dimension-corrected criterion."""
    n = result.total if total is None else total
    return result.loglik - 0.5 * result.face_dimension * math.log(n)


def standard_errors(result):
    """Per-column standard errors; nan marks aliased or unavailable."""
    return np.array([c.std_error for c in result.coefficients])


def fit(
    table,
    model,
    facial_set=None,
    design=None,
    columns=None,
    max_iter=100,
    grad_tol=None,
    rank_rel_tol=None,
    require_convergence=True,
):
    """Fit the Poisson log-linear model restricted to the facial set.

    With ``facial_set=None`` the model is fit on all cells (the
    ordinary MLE attempt; it diverges when the MLE does not exist
    unless ``require_convergence=False``).  ``columns`` may name an
    explicit independent subset of design columns to estimate; the
    fitted means do not depend on that choice, only the parametrization
    does.
    """
    if table.total == 0:
        raise FitError("all-zero table")
    if design is None:
        design = build_design(table, model)
    n_cells = table.n_cells

    if facial_set is None:
        in_face = np.ones(n_cells, dtype=bool)
    else:
        in_face = facial_set.in_face.copy()
        if np.any((table.counts > 0) & ~in_face):
            raise FitError("facial set excludes a cell with a positive count")

    xf = design.matrix[in_face]
    nf = table.counts[in_face].astype(np.float64)
    n_face = int(in_face.sum())
    total = table.total
    d = design.d
    d_face = matrix_rank(xf, rel_tol=rank_rel_tol)

    if columns is None:
        kept = _select_independent_columns(xf, range(d))
        if len(kept) != d_face:
            raise FitError(
                f"column selection found {len(kept)} independent columns, rank is {d_face}"
            )
    else:
        kept = [int(j) for j in columns]
        if matrix_rank(xf[:, kept], rel_tol=rank_rel_tol) != len(kept) or len(kept) != d_face:
            raise FitError("explicit column set is not a maximal independent subset")

    x_star = np.ascontiguousarray(xf[:, kept])
    theta0 = np.zeros(len(kept))
    if kept and kept[0] == 0:
        theta0[0] = math.log(total / n_face)
    if grad_tol is None:
        grad_tol = 1e-10 * max(1.0, float(total))

    theta, status, n_iter, gnorm = _kernels.newton_poisson_core(
        x_star, nf, theta0, float(grad_tol), 1e-8, int(max_iter)
    )
    converged = status == _kernels.CONVERGED
    if require_convergence and not converged:
        how = "stalled" if status == _kernels.STALLED else f"hit the {max_iter}-iteration cap"
        raise FitError(
            f"fit {how} after {n_iter} iterations (grad norm {gnorm:.3e}); "
            "if the MLE may not exist, fit on the facial set"
        )

    mu = np.exp(x_star @ theta)
    fitted = np.zeros(n_cells)
    fitted[in_face] = mu
    fitted.flags.writeable = False
    moment_residual = float(np.max(np.abs(x_star.T @ (mu - nf)))) if len(kept) else 0.0

    # observed information on the kept columns
    info = x_star.T @ (x_star * mu.reshape(-1, 1))
    se = np.full(len(kept), np.nan)
    try:
        cov = np.linalg.inv(info)
        diag = np.diag(cov)
        ok = diag > 0
        se[ok] = np.sqrt(diag[ok])
    except np.linalg.LinAlgError:
        pass

    kept_pos = {j: k for k, j in enumerate(kept)}
    coefficients = []
    for j in range(d):
        if j in kept_pos:
            k = kept_pos[j]
            coefficients.append(
                Coefficient(design.column_labels[j], float(theta[k]), float(se[k]), False)
            )
        else:
            coefficients.append(
                Coefficient(design.column_labels[j], np.nan, np.nan, True)
            )

    ll = loglik(fitted, table.counts)
    result = FitResult(
        fitted_means=fitted,
        coefficients=tuple(coefficients),
        estimable_columns=tuple(kept),
        loglik=ll,
        deviance=deviance(fitted, table.counts),
        model_dimension=d,
        face_dimension=d_face,
        n_face_cells=n_face,
        residual_df=n_face - d_face,
        total=total,
        bic=ll - 0.5 * d * math.log(total),
        cbic=ll - 0.5 * d_face * math.log(total),
        converged=converged,
        n_iter=int(n_iter),
        moment_residual=moment_residual,
        in_face=in_face,
        design=design,
    )
    return result
