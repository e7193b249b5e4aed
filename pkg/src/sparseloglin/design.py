"""Baseline-coded 0/1 design matrices and sufficient statistics.

Each model term contributes one indicator column per combination of
non-baseline levels of its factors; the intercept column of ones comes
first.  Interaction columns are elementwise products of the constituent
main-effect indicators, so every entry is 0 or 1 and every cell's row
is a binary vector.  For a hierarchical model this coding always has
full column rank, which is verified numerically at construction.
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .formula import INTERCEPT

__all__ = ["ColumnLabel", "DesignMatrix", "SufficientStatistic", "build_design", "sufficient_statistic", "matrix_rank"]


def matrix_rank(a, rel_tol=None):
    """Numerical rank: singular values below rel_tol * s_max count as zero.

    The default rel_tol is ncols * machine epsilon.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.size == 0 or min(a.shape) == 0:
        return 0
    if rel_tol is None:
        rel_tol = a.shape[1] * np.finfo(np.float64).eps
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


@dataclass(frozen=True)
class ColumnLabel:
    """Ties one design column to its term and non-baseline level combination."""

    term: frozenset
    levels: tuple  # ((factor_name, level_label), ...), empty for the intercept

    def __str__(self):
        if self.term == INTERCEPT:
            return "(Intercept)"
        return ":".join(f"{name}{level}" for name, level in self.levels)


@dataclass(frozen=True)
class DesignMatrix:
    """Full-column-rank 0/1 design matrix with labeled columns.

    Row i is the binary vector of cell i in canonical cell order;
    column 0 is the intercept.
    """

    matrix: np.ndarray = field(repr=False)
    column_labels: tuple
    factor_names: tuple

    def __post_init__(self):
        m = np.ascontiguousarray(self.matrix, dtype=np.float64)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def d(self):
        """Number of free log-linear parameters."""
        return self.matrix.shape[1]

    @property
    def n_cells(self):
        return self.matrix.shape[0]

    def column_terms(self):
        return tuple(lab.term for lab in self.column_labels)


@dataclass(frozen=True)
class SufficientStatistic:
    """t = X'n, computed in exact integer arithmetic."""

    t: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.int64)
        t.flags.writeable = False
        object.__setattr__(self, "t", t)


def build_design(table, model, rank_rel_tol=None):
    """Build the design matrix of a hierarchical model on a table.

    Columns appear intercept first, then terms in canonical order
    (size, then name), then within a term the non-baseline level
    combinations in lexicographic order with the term's last factor
    varying fastest.
    """
    factor_pos = {name: k for k, name in enumerate(table.factor_names)}
    missing = model.factors - set(factor_pos)
    if missing:
        raise ValueError(f"model factor(s) {sorted(missing)} not in table")

    coords = table.cell_coords()
    n_cells = table.n_cells

    # Per-factor non-baseline indicator columns; level index 0 is baseline.
    indicator = {}
    for name, k in factor_pos.items():
        for lev in range(1, table.factors[k].n_levels):
            indicator[name, lev] = (coords[:, k] == lev).astype(np.float64)

    columns = [np.ones(n_cells)]
    labels = [ColumnLabel(INTERCEPT, ())]
    for term in model.canonical_terms():
        if term == INTERCEPT:
            continue
        names = sorted(term, key=factor_pos.get)
        level_ranges = [range(1, table.factors[factor_pos[n]].n_levels) for n in names]
        for combo in product(*level_ranges):
            col = np.ones(n_cells)
            for name, lev in zip(names, combo):
                col = col * indicator[name, lev]
            columns.append(col)
            labels.append(
                ColumnLabel(
                    term,
                    tuple(
                        (name, table.factors[factor_pos[name]].levels[lev])
                        for name, lev in zip(names, combo)
                    ),
                )
            )

    X = np.column_stack(columns)
    d = X.shape[1]
    rank = matrix_rank(X, rel_tol=rank_rel_tol)
    if rank != d:
        raise ValueError(
            f"design matrix is rank deficient (rank {rank} < {d} columns); "
            "baseline coding of a hierarchical model should be full rank"
        )
    return DesignMatrix(X, tuple(labels), table.factor_names)


def sufficient_statistic(design, counts):
    """t = X'counts, exact in int64."""
    counts = np.asarray(counts, dtype=np.int64)
    if counts.shape != (design.n_cells,):
        raise ValueError(
            f"counts has shape {counts.shape}, expected ({design.n_cells},)"
        )
    xt = design.matrix.astype(np.int64).T
    return SufficientStatistic(xt @ counts, counts)
