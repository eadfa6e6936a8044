"""Characteristics of the Euclidean motion group on a Monge patch.

A surface z(x, y) is invariant under a rigid-motion generator exactly when
the corresponding characteristic vanishes identically:

    translations   Q1 = -dz/dx        Q2 = -dz/dy        Q3 = 1
    rotations      Q4 = y z_x - x z_y
                   Q5 = x - z z_x     Q6 = y - z z_y

Q3 never vanishes: no surface is invariant under a pure z-translation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .geometry import MongePatch, _first_diff


@dataclass(frozen=True)
class CharacteristicSet:
    """The six characteristic fields, indexed Q[j-1] for generator j."""

    Q: np.ndarray      # shape (6, nx, ny)
    valid: np.ndarray  # shared stencil-interior mask

    def __post_init__(self):
        if self.Q.shape[0] != 6 or self.Q.shape[1:] != self.valid.shape:
            raise InvalidInputError(
                f"characteristics must be (6, nx, ny) matching the mask, got {self.Q.shape}")


def characteristics(patch: MongePatch) -> CharacteristicSet:
    """Evaluate all six generator characteristics with centered differences."""
    z = patch.z
    z1 = _first_diff(z, patch.hx, 0)
    z2 = _first_diff(z, patch.hy, 1)
    X, Y = patch.meshgrid()
    Q = np.stack([
        -z1,
        -z2,
        np.ones_like(z),
        Y * z1 - X * z2,
        X - z * z1,
        Y - z * z2,
    ])
    return CharacteristicSet(Q=Q, valid=patch.interior_mask(1))


def patch_scale(patch: MongePatch) -> float:
    """Coordinate scale max(|x|, |y|, |z|) used to normalize tolerances."""
    return float(max(np.max(np.abs(patch.x_nodes)), np.max(np.abs(patch.y_nodes)),
                     np.max(np.abs(patch.z))))


def invariance_test(patch: MongePatch, generator_index: int, tol: float) -> bool:
    """True iff the characteristic of generator ``generator_index`` (1..6)
    vanishes on all valid nodes within ``tol * (1 + patch scale)``.

    Generator 3 (z-translation) always returns False.
    """
    if generator_index not in (1, 2, 3, 4, 5, 6):
        raise InvalidInputError(f"generator index must be in 1..6, got {generator_index}")
    if generator_index == 3:
        return False
    cs = characteristics(patch)
    field = cs.Q[generator_index - 1]
    bound = tol * (1.0 + patch_scale(patch))
    return bool(np.max(np.abs(field[cs.valid])) <= bound)
