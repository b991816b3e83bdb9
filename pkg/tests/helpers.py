"""Shared test utilities: the shape catalog and a tiny set-based window model.

The catalog is the fixed universe the equivalence suites sweep: every
failable shape of dimension up to 3 whose cell count stays within a cap.
The set-based helpers re-derive window geometry from first principles
(explicit cell sets), independent of both the engine and the oracle.
"""

import itertools

from relpoly import SystemShape, validate_shape


def extent_tuples(d, max_volume):
    """All d-tuples of positive extents whose product is <= max_volume."""
    if d == 0:
        yield ()
        return
    for first in range(1, max_volume + 1):
        for rest in extent_tuples(d - 1, max_volume // first):
            yield (first, *rest)


def catalog(max_volume=16, dims=(1, 2, 3)):
    """Every failable shape with d in dims and volume <= max_volume."""
    shapes = []
    for d in dims:
        for n in extent_tuples(d, max_volume):
            for s in itertools.product(*[range(1, x + 1) for x in n]):
                shapes.append(validate_shape(n, s))
    return shapes


def window_cells(shape: SystemShape, offsets):
    """Cells of one window as a set of 0-based coordinate tuples."""
    return set(
        itertools.product(
            *[range(e - 1, e - 1 + sr) for e, sr in zip(offsets, shape.s)]
        )
    )


def union_cells(shape, group):
    cells = set()
    for e in group:
        cells |= window_cells(shape, e)
    return cells


def intersection_cells(shape, group):
    group = list(group)
    cells = window_cells(shape, group[0])
    for e in group[1:]:
        cells &= window_cells(shape, e)
    return cells
