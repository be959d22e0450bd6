"""Grids, points, arithmetic progressions, colorings, and exact discrepancy.

The central evaluation routine, :func:`disc_eval`, computes the exact maximum
absolute color sum over every arithmetic progression contained in a grid by
scanning, for each sign-normalized difference vector, the residue-class lines
of the grid and reducing each line with prefix sums.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

Point = tuple[int, ...]

# Prefix sums are accumulated in int64; keep cell counts far below overflow.
MAX_CELLS = 1 << 40


class ColoringFormatError(ValueError):
    """Raised when a coloring file violates the text format contract."""


@dataclass(frozen=True)
class GridShape:
    """Box [1..N_1] x ... x [1..N_d] of cell counts per axis."""

    dims: tuple[int, ...]

    def __init__(self, dims: Iterable[int]):
        dims = tuple(int(n) for n in dims)
        if len(dims) < 1:
            raise ValueError("grid needs at least one axis")
        if any(n < 1 for n in dims):
            raise ValueError(f"axis lengths must be >= 1, got {dims}")
        total = 1
        for n in dims:
            total *= n
        if total > MAX_CELLS:
            raise ValueError(f"grid with {total} cells exceeds supported size")
        object.__setattr__(self, "dims", dims)

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def cell_count(self) -> int:
        total = 1
        for n in self.dims:
            total *= n
        return total

    def strides(self) -> tuple[int, ...]:
        """C-order strides: axis 1 is the slowest-varying axis."""
        out = [1] * self.d
        for i in range(self.d - 2, -1, -1):
            out[i] = out[i + 1] * self.dims[i + 1]
        return tuple(out)

    def contains(self, p: Sequence[int]) -> bool:
        return len(p) == self.d and all(1 <= x <= n for x, n in zip(p, self.dims))

    def flat_index(self, p: Sequence[int]) -> int:
        if not self.contains(p):
            raise ValueError(f"point {tuple(p)} not in grid {self.dims}")
        return sum((x - 1) * s for x, s in zip(p, self.strides()))

    def point_of(self, flat: int) -> Point:
        if not 0 <= flat < self.cell_count:
            raise ValueError(f"flat index {flat} out of range")
        coords = []
        for s in self.strides():
            coords.append(flat // s + 1)
            flat %= s
        return tuple(coords)

    def iter_points(self) -> Iterator[Point]:
        return itertools.product(*(range(1, n + 1) for n in self.dims))


@dataclass(frozen=True)
class APSpec:
    """Arithmetic progression {start + i*diff : 0 <= i < length}."""

    start: tuple[int, ...]
    diff: tuple[int, ...]
    length: int

    def __init__(self, start: Sequence[int], diff: Sequence[int], length: int):
        start = tuple(int(x) for x in start)
        diff = tuple(int(x) for x in diff)
        if len(start) != len(diff):
            raise ValueError("start and diff must have equal dimension")
        if all(b == 0 for b in diff):
            raise ValueError("difference vector must be nonzero")
        if length < 1:
            raise ValueError("length must be >= 1")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "diff", diff)
        object.__setattr__(self, "length", int(length))

    def points(self) -> list[Point]:
        a, b = self.start, self.diff
        return [tuple(a[i] + t * b[i] for i in range(len(a))) for t in range(self.length)]


def ap_points(ap: APSpec, shape: GridShape) -> tuple[list[Point], bool]:
    """Expand an AP into points and report whether all of them lie in the grid."""
    pts = ap.points()
    inside = all(shape.contains(p) for p in pts)
    return pts, inside


class PartialColoring:
    """Map from grid cells to {-1, 0, +1}; 0 marks an uncolored cell.

    Values are stored densely in C order, so axis 1 is the slowest axis.
    """

    def __init__(self, shape: GridShape, values: np.ndarray):
        values = np.asarray(values, dtype=np.int8)
        if values.shape == (shape.cell_count,):
            values = values.reshape(shape.dims)
        if values.shape != shape.dims:
            raise ValueError(f"values shape {values.shape} != grid dims {shape.dims}")
        if not np.isin(values, (-1, 0, 1)).all():
            raise ValueError("coloring entries must be in {-1, 0, 1}")
        self.shape = shape
        self.values = values

    @classmethod
    def zeros(cls, shape: GridShape) -> "PartialColoring":
        return cls(shape, np.zeros(shape.dims, dtype=np.int8))

    @classmethod
    def constant(cls, shape: GridShape, value: int) -> "PartialColoring":
        return cls(shape, np.full(shape.dims, value, dtype=np.int8))

    @property
    def is_full(self) -> bool:
        return bool((self.values != 0).all())

    @property
    def uncolored_count(self) -> int:
        return int((self.values == 0).sum())

    def __getitem__(self, p: Sequence[int]) -> int:
        if not self.shape.contains(p):
            raise ValueError(f"point {tuple(p)} not in grid {self.shape.dims}")
        return int(self.values[tuple(x - 1 for x in p)])

    def copy(self) -> "PartialColoring":
        return PartialColoring(self.shape, self.values.copy())


def chi_sum(chi: PartialColoring, ap: APSpec) -> int:
    """Exact signed color sum over the AP's points; the AP must lie in the grid."""
    pts, inside = ap_points(ap, chi.shape)
    if not inside:
        raise ValueError(f"AP {ap} leaves the grid {chi.shape.dims}")
    return sum(chi[p] for p in pts)


def normalize_sign(b: Sequence[int]) -> tuple[int, ...]:
    """Flip the vector so its first nonzero coordinate is positive."""
    for x in b:
        if x != 0:
            return tuple(b) if x > 0 else tuple(-y for y in b)
    raise ValueError("zero vector has no sign normalization")


def enumerate_directions(shape: GridShape, max_len: int = 2) -> list[tuple[int, ...]]:
    """Sign-normalized nonzero differences admitting an AP of length >= max_len.

    A progression of length l >= max_len with difference b fits in the grid
    only if |b_i| <= (N_i - 1) / (max_len - 1) on every axis, so the returned
    box is exhaustive for that length filter.  With max_len = 2 this is the
    full direction set.
    """
    if max_len < 2:
        raise ValueError("max_len must be >= 2")
    radii = [(n - 1) // (max_len - 1) for n in shape.dims]
    out = []
    for b in itertools.product(*(range(-r, r + 1) for r in radii)):
        if all(x == 0 for x in b):
            continue
        for x in b:
            if x != 0:
                if x > 0:
                    out.append(b)
                break
    return out


@dataclass(frozen=True)
class DiscResult:
    value: int
    witness: APSpec


def _line_layout(shape: GridShape, b: Sequence[int], coords: list[np.ndarray]):
    """Assign each grid cell a (line row, position) under translation by b.

    Lines are the maximal sequences x, x+b, x+2b, ... inside the grid; every
    AP with difference b is a contiguous interval of exactly one line.
    """
    dims = shape.dims
    n = shape.cell_count
    strides = shape.strides()
    step = sum(bi * si for bi, si in zip(b, strides))
    k = None
    max_len = None
    for i, bi in enumerate(b):
        if bi == 0:
            continue
        ci = coords[i]
        ki = (ci - 1) // bi if bi > 0 else (dims[i] - ci) // (-bi)
        k = ki if k is None else np.minimum(k, ki)
        axis_len = (dims[i] - 1) // abs(bi) + 1
        max_len = axis_len if max_len is None else min(max_len, axis_len)
    flat = np.arange(n, dtype=np.int64)
    start_flat = flat - k * step
    starts = np.flatnonzero(k == 0)
    row_map = np.empty(n, dtype=np.int64)
    row_map[starts] = np.arange(starts.size, dtype=np.int64)
    rows = row_map[start_flat]
    return rows, k, starts, max_len


def _direction_scan(values_flat: np.ndarray, shape: GridShape, b, coords):
    """Max interval |sum| over all lines of direction b, plus scan internals."""
    rows, k, starts, max_len = _line_layout(shape, b, coords)
    table = np.zeros((starts.size, max_len), dtype=np.int64)
    table[rows, k] = values_flat
    np.cumsum(table, axis=1, out=table)
    hi = np.maximum(table.max(axis=1), 0)
    lo = np.minimum(table.min(axis=1), 0)
    per_row = hi - lo
    return per_row, table, rows, starts


def disc_eval(
    chi: PartialColoring,
    direction_filter: Callable[[tuple[int, ...]], bool] | None = None,
) -> DiscResult:
    """Exact max of |chi(A)| over every AP contained in the grid, with witness.

    Uncolored cells contribute 0.  ``direction_filter`` restricts the scan to
    differences it accepts (used e.g. to evaluate only APs moving along a
    chosen axis); filtered runs still cover length-1 APs of accepted
    directions.
    """
    shape = chi.shape
    values_flat = chi.values.reshape(-1).astype(np.int64)
    dirs = enumerate_directions(shape, max_len=2)
    if direction_filter is not None:
        dirs = [b for b in dirs if direction_filter(b)]
    coords = _grid_coords(shape)

    best_val = 0
    best_dir = None
    for b in dirs:
        per_row, _, _, _ = _direction_scan(values_flat, shape, b, coords)
        v = int(per_row.max()) if per_row.size else 0
        if v > best_val:
            best_val = v
            best_dir = b

    if best_dir is None:
        # Zero coloring, or no admissible direction at all: any singleton is a
        # witness attaining the value.
        diff = tuple(1 if i == 0 else 0 for i in range(shape.d))
        if direction_filter is not None and dirs:
            diff = dirs[0]
        flat_amax = int(np.abs(values_flat).argmax())
        val = int(abs(values_flat[flat_amax]))
        if val > 0:
            return DiscResult(val, APSpec(shape.point_of(flat_amax), diff, 1))
        return DiscResult(0, APSpec(shape.point_of(0), diff, 1))

    per_row, table, rows, starts = _direction_scan(values_flat, shape, best_dir, coords)
    r = int(per_row.argmax())
    prefix = np.concatenate(([0], table[r]))
    line_len = int(np.count_nonzero(rows == r))
    j_hi = min(int(prefix.argmax()), line_len)
    j_lo = min(int(prefix.argmin()), line_len)
    i0, j0 = min(j_hi, j_lo), max(j_hi, j_lo)
    start_pt = shape.point_of(int(starts[r]))
    witness_start = tuple(x + i0 * bi for x, bi in zip(start_pt, best_dir))
    witness = APSpec(witness_start, best_dir, j0 - i0)
    return DiscResult(best_val, witness)


def _grid_coords(shape: GridShape) -> list[np.ndarray]:
    """1-based coordinate arrays of every cell in flat C order."""
    n = shape.cell_count
    flat = np.arange(n, dtype=np.int64)
    coords = []
    for s, dim in zip(shape.strides(), shape.dims):
        coords.append((flat // s) % dim + 1)
    return coords


def enumerate_contained_aps(shape: GridShape) -> list[APSpec]:
    """Every AP contained in the grid: all intervals of all lines, plus each
    singleton exactly once."""
    out = [APSpec(p, tuple(1 if i == 0 else 0 for i in range(shape.d)), 1)
           for p in shape.iter_points()]
    for b in enumerate_directions(shape, max_len=2):
        for start, length in iter_lines(shape, b):
            for i in range(length):
                for l in range(2, length - i + 1):
                    a = tuple(x + i * bi for x, bi in zip(start, b))
                    out.append(APSpec(a, b, l))
    return out


def iter_lines(shape: GridShape, b: Sequence[int]) -> Iterator[tuple[Point, int]]:
    """(start point, length) of every maximal line of the grid under b."""
    coords = _grid_coords(shape)
    rows, k, starts, _ = _line_layout(shape, b, coords)
    lengths = np.bincount(rows, minlength=starts.size)
    for flat, length in zip(starts, lengths):
        yield shape.point_of(int(flat)), int(length)


# ---------------------------------------------------------------------------
# Coloring file format:
#   line 1: d
#   line 2: N_1 ... N_d
#   then N_1*...*N_d entries in {-1, 0, 1}, whitespace-separated, C order
#   (axis 1 slowest).
# ---------------------------------------------------------------------------

def write_coloring(path, chi: PartialColoring) -> None:
    dims = chi.shape.dims
    lines = [str(len(dims)), " ".join(str(n) for n in dims)]
    flat = chi.values.reshape(-1)
    width = dims[-1]
    for i in range(0, flat.size, width):
        lines.append(" ".join(str(int(v)) for v in flat[i:i + width]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_coloring(path) -> PartialColoring:
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ColoringFormatError("file too short")
    try:
        d = int(tokens[0])
    except ValueError as exc:
        raise ColoringFormatError(f"bad dimension field {tokens[0]!r}") from exc
    if d < 1 or len(tokens) < 1 + d:
        raise ColoringFormatError("missing axis lengths")
    try:
        dims = tuple(int(t) for t in tokens[1:1 + d])
    except ValueError as exc:
        raise ColoringFormatError("bad axis length") from exc
    shape = GridShape(dims)
    body = tokens[1 + d:]
    if len(body) != shape.cell_count:
        raise ColoringFormatError(
            f"expected {shape.cell_count} entries, found {len(body)}")
    values = np.empty(shape.cell_count, dtype=np.int8)
    for i, t in enumerate(body):
        if t == "1":
            values[i] = 1
        elif t == "-1":
            values[i] = -1
        elif t == "0":
            values[i] = 0
        else:
            raise ColoringFormatError(f"entry {t!r} outside alphabet {{-1,0,1}}")
    return PartialColoring(shape, values)
