"""Free-coordinate layout of the gauge-reduced square system.

With body 1 pinned at the origin and the echelon rotation frame, body ``i``
(0-based) carries ``min(i, n-2)`` free coordinates.  The retained equation
components mirror the free coordinates exactly: for each body ``i >= 1`` the
first ``min(i, n-2)`` components of its balance equation are kept, which
leaves a square system.  The dropped components are implied by the
translation identity and the wedge (rotation) identities whenever the
echelon leading entries are nonzero.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "ambient_dim",
    "free_count",
    "free_slots",
    "reduced_indices",
    "coords_from_free",
    "free_from_coords",
]


def ambient_dim(n: int) -> int:
    return n - 2


@lru_cache(maxsize=None)
def free_slots(n: int) -> tuple[tuple[int, int], ...]:
    """(body, component) pairs in packing order, body-major."""
    if n < 3:
        raise ValueError("need n >= 3")
    d = ambient_dim(n)
    slots = []
    for body in range(1, n):
        for comp in range(min(body, d)):
            slots.append((body, comp))
    return tuple(slots)


def free_count(n: int) -> int:
    return len(free_slots(n))


@lru_cache(maxsize=None)
def reduced_indices(n: int) -> np.ndarray:
    """Flat indices (body * d + comp) of the retained rows/columns."""
    d = ambient_dim(n)
    idx = np.array([body * d + comp for body, comp in free_slots(n)], dtype=np.intp)
    idx.setflags(write=False)
    return idx


def coords_from_free(free, n: int) -> np.ndarray:
    """Expand a packed free vector into (n, n-2) echelon coordinates."""
    d = ambient_dim(n)
    free = np.asarray(free, dtype=float)
    if free.shape != (free_count(n),):
        raise ValueError("free vector has the wrong length")
    coords = np.zeros((n, d))
    coords.ravel()[reduced_indices(n)] = free
    return coords


def free_from_coords(coords) -> np.ndarray:
    """Pack echelon coordinates into the free vector (zeros are dropped)."""
    coords = np.asarray(coords, dtype=float)
    n = coords.shape[0]
    if coords.shape != (n, ambient_dim(n)):
        raise ValueError("coordinates must be (n, n-2)")
    return coords.ravel()[reduced_indices(n)].copy()
