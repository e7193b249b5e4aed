"""Built-in datasets for examples, tests, and the CLI."""

from importlib import resources

import numpy as np

from .table import ContingencyTable, FactorSpec, parse_table

__all__ = ["haberman", "example3x3x3", "rochdale", "load", "DATASETS"]

# Classic 2x2x2 table in which the no-three-way-interaction MLE fails
# to exist: the two diagonal zeros lie off the face of the margin cone.
_HABERMAN_CSV = """\
a,b,c,freq
0,0,0,0
0,0,1,1
0,1,0,2
0,1,1,1
1,0,0,4
1,0,1,1
1,1,0,3
1,1,1,0
"""


def haberman():
    """2x2x2 table with counts (0,1,2,1,4,1,3,0), N=12."""
    return parse_table(_HABERMAN_CSV)


def example3x3x3():
    """3x3x3 table with seven zero cells, N=20.

    Under the all-two-way model, one zero cell (a=1,b=3,c=1) is on the
    face and the other six are not.
    """
    # count[a][b][c], levels 1..3
    counts = np.array(
        [
            [[0, 1, 1], [1, 1, 1], [0, 1, 1]],
            [[0, 1, 1], [1, 1, 1], [1, 1, 1]],
            [[1, 1, 1], [1, 0, 0], [1, 0, 0]],
        ],
        dtype=np.int64,
    )
    factors = tuple(FactorSpec(name, ("1", "2", "3")) for name in "abc")
    return ContingencyTable(factors, counts.reshape(-1))


def rochdale():
    """Household survey cross-classification: 8 binary factors, N=665.

    Factors: a wife economically active; b wife over 38; c husband
    unemployed; d child under 5; e wife at least high-school;
    f husband at least high-school; g Asian origin; h another household
    member working.  165 of the 256 cells are empty.
    """
    path = resources.files("sparseloglin.data").joinpath("rochdale.csv")
    if not path.is_file():
        raise FileNotFoundError("bundled rochdale.csv is missing")
    return parse_table(path.read_text())


DATASETS = {
    "haberman": haberman,
    "example3x3x3": example3x3x3,
    "rochdale": rochdale,
}


def load(name):
    """Load a built-in dataset by name."""
    try:
        loader = DATASETS[name]
    except KeyError:
        raise KeyError(f"unknown dataset {name!r}; available: {sorted(DATASETS)}") from None
    return loader()
