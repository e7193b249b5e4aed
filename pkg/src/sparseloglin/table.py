"""Contingency tables over named factors with finite level sets.

A table stores one nonnegative integer count per cell of the full
cross-classification.  Cells are ordered lexicographically in factor
order with the *last* factor varying fastest; that ordering is the
contract for all row indexing downstream (design matrices, facial
sets, reports).
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FactorSpec",
    "ContingencyTable",
    "TableError",
    "parse_table",
    "serialize_table",
    "marginal",
    "binarize",
]


class TableError(ValueError):
    """Malformed table input: duplicate cells, bad counts, ragged rows."""


@dataclass(frozen=True)
class FactorSpec:
    """A named factor with an ordered set of at least two levels.

    Level order is fixed at construction; the first level is the
    baseline for design-matrix coding.
    """

    name: str
    levels: tuple

    def __post_init__(self):
        if len(self.levels) < 2:
            raise TableError(f"factor {self.name!r} needs >= 2 levels, got {len(self.levels)}")
        if len(set(self.levels)) != len(self.levels):
            raise TableError(f"factor {self.name!r} has duplicate levels")

    @property
    def n_levels(self):
        return len(self.levels)


@dataclass(frozen=True)
class ContingencyTable:
    """Counts over the full product of factor level sets.

    ``counts`` is a flat int64 vector of length prod(n_levels) in
    canonical cell order.  Instances are immutable and safe to share
    across threads.
    """

    factors: tuple
    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        names = [f.name for f in self.factors]
        if len(set(names)) != len(names):
            raise TableError("duplicate factor names")
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (self.n_cells,):
            raise TableError(
                f"counts has shape {counts.shape}, expected ({self.n_cells},)"
            )
        if (counts < 0).any():
            raise TableError("negative cell count")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @property
    def shape(self):
        return tuple(f.n_levels for f in self.factors)

    @property
    def n_cells(self):
        return int(np.prod(self.shape))

    @property
    def factor_names(self):
        return tuple(f.name for f in self.factors)

    @property
    def total(self):
        """Grand total N."""
        return int(self.counts.sum())

    def cell_coords(self):
        """Level-index coordinates of every cell, shape (n_cells, n_factors).

        Row order is the canonical cell order (last factor fastest).
        """
        grids = np.indices(self.shape).reshape(len(self.factors), -1)
        return grids.T

    def flat_index(self, coords):
        """Map level-index coordinates to the flat cell position."""
        coords = tuple(coords)
        if len(coords) != len(self.factors):
            raise TableError(f"cell {coords} has wrong arity")
        for c, f in zip(coords, self.factors):
            if not 0 <= c < f.n_levels:
                raise TableError(f"coordinate {c} out of range for factor {f.name!r}")
        return int(np.ravel_multi_index(coords, self.shape))

    def cell_labels(self):
        """Level labels of every cell in canonical order."""
        return [
            tuple(f.levels[c] for f, c in zip(self.factors, coords))
            for coords in self.cell_coords()
        ]

    def zero_cells(self):
        """Flat positions of the sampling zeros."""
        return np.flatnonzero(self.counts == 0)

    def marginal(self, subset):
        """Marginal count vector over the named factor subset.

        The result is ordered canonically over the subset's product
        space, keeping the subset factors in table factor order.  The
        empty subset yields the length-1 vector (N,).
        """
        return marginal(self, subset)

    def binarize(self):
        """Indicator table: 1 where the count is positive, else 0."""
        return binarize(self)


def _levels_from_column(values):
    # First-appearance order, unless every label parses as a number,
    # in which case ascending numeric order.
    seen = list(dict.fromkeys(values))
    try:
        numeric = [float(v) for v in seen]
    except ValueError:
        return tuple(seen)
    order = np.argsort(numeric, kind="stable")
    return tuple(seen[i] for i in order)


def _split_row(line):
    if "," in line:
        return [tok.strip() for tok in line.split(",")]
    return line.split()


def parse_table(source, freq_column="freq"):
    """Parse a contingency table from delimited text.

    ``source`` is a string or an iterable of lines.  The header names
    the factor columns plus the frequency column; each data row names
    one cell.  Cells absent from the input get count 0.  Duplicate
    cells, ragged rows, and negative or non-integer frequencies are
    errors.
    """
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in source]
    lines = [ln for ln in (ln.strip() for ln in lines) if ln and not ln.startswith("#")]
    if not lines:
        raise TableError("empty input")

    header = _split_row(lines[0])
    if freq_column not in header:
        raise TableError(f"frequency column {freq_column!r} not in header {header}")
    freq_pos = header.index(freq_column)
    factor_names = [h for h in header if h != freq_column]
    if not factor_names:
        raise TableError("no factor columns")

    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        toks = _split_row(ln)
        if len(toks) != len(header):
            raise TableError(f"line {lineno}: expected {len(header)} fields, got {len(toks)}")
        freq_tok = toks[freq_pos]
        try:
            freq = int(freq_tok)
        except ValueError:
            raise TableError(f"line {lineno}: non-integer frequency {freq_tok!r}") from None
        if freq < 0:
            raise TableError(f"line {lineno}: negative frequency {freq}")
        levels = tuple(t for i, t in enumerate(toks) if i != freq_pos)
        rows.append((levels, freq, lineno))

    factors = tuple(
        FactorSpec(name, _levels_from_column([r[0][k] for r in rows]))
        for k, name in enumerate(factor_names)
    )
    level_pos = [{lab: i for i, lab in enumerate(f.levels)} for f in factors]

    shape = tuple(f.n_levels for f in factors)
    counts = np.zeros(int(np.prod(shape)), dtype=np.int64)
    seen = np.zeros(counts.shape, dtype=bool)
    for levels, freq, lineno in rows:
        coords = tuple(level_pos[k][lab] for k, lab in enumerate(levels))
        flat = int(np.ravel_multi_index(coords, shape))
        if seen[flat]:
            raise TableError(f"line {lineno}: duplicate cell {levels}")
        seen[flat] = True
        counts[flat] = freq

    return ContingencyTable(factors, counts)


def serialize_table(table, freq_column="freq", delimiter=","):
    """Render a table as delimited text that parse_table round-trips."""
    lines = [delimiter.join([*table.factor_names, freq_column])]
    for labels, count in zip(table.cell_labels(), table.counts):
        lines.append(delimiter.join([*(str(x) for x in labels), str(int(count))]))
    return "\n".join(lines) + "\n"


def marginal(table, subset):
    """Sum counts over the factors not in ``subset``.

    Returns the marginal count vector over the subset's product space
    in canonical order (subset factors kept in table factor order).
    """
    subset = set(subset)
    unknown = subset - set(table.factor_names)
    if unknown:
        raise TableError(f"unknown factor(s) {sorted(unknown)}")
    keep = [k for k, name in enumerate(table.factor_names) if name in subset]
    drop = tuple(k for k in range(len(table.factors)) if k not in keep)
    cube = table.counts.reshape(table.shape)
    return cube.sum(axis=drop).reshape(-1) if drop else cube.reshape(-1)


def binarize(table):
    """Replace every positive count by 1, preserving the zero pattern."""
    return ContingencyTable(table.factors, (table.counts > 0).astype(np.int64))
