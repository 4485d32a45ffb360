"""Index-to-coordinate layouts for placing linear data on a square grid.

Three layouts are provided: plain row-major order, the Hilbert space-filling
curve, and a center-out square spiral. Each is exposed as a ``LayoutMap``
holding the full index -> (row, col) table, which downstream converters use
for scatter placement.

Frozen conventions (documented once, relied on by golden tests):
  * Hilbert orientation: index 0 -> (0, 0) and index 4**order - 1 ->
    (0, side - 1).
  * Spiral: 16x16 grid, starts at (7, 7), clockwise (right, down, left, up)
    with run lengths 1, 1, 2, 2, ..., 15, 15 and a final run of 15.
"""

from dataclasses import dataclass, field

import numpy as np

from binviz import _kernels

HILBERT_MAX_ORDER = 12


@dataclass(frozen=True)
class LayoutMap:
    """A bijection from linear indices to grid cells.

    ``table[i] == (row, col)`` for every index in [0, len(table)).
    """

    kind: str
    side: int
    table: np.ndarray = field(repr=False)

    def __len__(self):
        return self.table.shape[0]

    def coords(self, index):
        row, col = self.table[index]
        return int(row), int(col)

    def inverse(self):
        """Dense (side, side) array of indices, -1 for unvisited cells."""
        inv = np.full((self.side, self.side), -1, dtype=np.int64)
        inv[self.table[:, 0], self.table[:, 1]] = np.arange(len(self))
        return inv

    def dump_csv(self, path):
        """Debug dump as ``index,row,col`` rows, for cross-implementation diffs."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("index,row,col\n")
            for i, (r, c) in enumerate(self.table):
                fh.write(f"{i},{r},{c}\n")


def row_major(side):
    """Row-major layout: index i -> (i // side, i % side)."""
    if side < 1:
        raise ValueError(f"side must be >= 1, got {side}")
    idx = np.arange(side * side, dtype=np.int64)
    table = np.column_stack((idx // side, idx % side))
    return LayoutMap(kind="row_major", side=side, table=table)


def hilbert(order):
    """Hilbert curve over the full 2^order x 2^order grid.

    Consecutive indices always map to 4-neighbor-adjacent cells.
    """
    if not 1 <= order <= HILBERT_MAX_ORDER:
        raise ValueError(
            f"hilbert order must be in [1, {HILBERT_MAX_ORDER}], got {order}"
        )
    side = 1 << order
    rows, cols = _kernels.hilbert_coords(order, side * side)
    return LayoutMap(kind="hilbert", side=side, table=np.column_stack((rows, cols)))


def spiral16():
    """Center-out clockwise spiral visiting all 256 cells of a 16x16 grid."""
    table = np.empty((256, 2), dtype=np.int64)
    r, c = 7, 7
    table[0] = (r, c)
    moves = [(0, 1), (1, 0), (0, -1), (-1, 0)]
    filled = 1
    direction = 0
    run = 1
    while filled < 256:
        for _ in range(2):
            dr, dc = moves[direction]
            for _ in range(run):
                r += dr
                c += dc
                table[filled] = (r, c)
                filled += 1
                if filled == 256:
                    break
            direction = (direction + 1) % 4
            if filled == 256:
                break
        run += 1
    return LayoutMap(kind="spiral", side=16, table=table)
