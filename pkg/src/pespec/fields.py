"""Named initial conditions and documented test fields.

Every field here lands in the hydrostatic solenoidal space (even in z,
divergence-free vertical average); the random ones are reproducible from a
seed via the splitmix stream.
"""

from __future__ import annotations

import numpy as np

from . import rng
from .hydrostatic import project_H
from .torus import (
    SpectralField,
    TorusGrid,
    field_from_values,
    forward_transform,
    project_mean_zero,
)


def _from_values(grid: TorusGrid, v1: np.ndarray, v2: np.ndarray) -> SpectralField:
    vals = np.stack([v1, v2])
    return forward_transform(field_from_values(grid, vals))


def cosx_cosz(grid: TorusGrid, amplitude: float = 1.0) -> SpectralField:
    """(a cos x1 cos z, 0): the classic single-mode hydrostatic state."""
    if grid.n_dims != 2:
        raise ValueError("cosx_cosz is a 2d field")
    x1, z = grid.meshgrid()
    v1 = amplitude * np.cos(x1 / grid.lambdas[0]) * np.cos(z / grid.lambdas[1])
    return _from_values(grid, v1, np.zeros_like(v1))


def smooth_2d(grid: TorusGrid, amplitude: float = 0.25) -> SpectralField:
    """Deterministic multi-mode smooth 2d state used by the energy and
    uniqueness studies:

        v1 = a (cos x1 cos z + 0.5 sin 2x1 cos 2z - 0.3 cos x1 cos 2z)
        v2 = a (sin x1 cos z - 0.4 sin x1 cos 3z + 0.6 cos 2x1 cos z)

    All terms are even in z with zero vertical mean, so the state is in the
    hydrostatic space as written.
    """
    if grid.n_dims != 2:
        raise ValueError("smooth_2d is a 2d field")
    x1g, zg = grid.meshgrid()
    x1 = x1g / grid.lambdas[0]
    z = zg / grid.lambdas[1]
    v1 = amplitude * (
        np.cos(x1) * np.cos(z)
        + 0.5 * np.sin(2 * x1) * np.cos(2 * z)
        - 0.3 * np.cos(x1) * np.cos(2 * z)
    )
    v2 = amplitude * (
        np.sin(x1) * np.cos(z)
        - 0.4 * np.sin(x1) * np.cos(3 * z)
        + 0.6 * np.cos(2 * x1) * np.cos(z)
    )
    return _from_values(grid, v1, v2)


def random_state(
    grid: TorusGrid,
    seed: int,
    k_max=None,
    amplitude: float = 1.0,
    mean_free_z: bool = False,
) -> SpectralField:
    """Random band-limited field projected into the hydrostatic space.

    With ``mean_free_z`` the vertical mean is stripped as well (the flux
    decomposition preconditions this).  Normalized so the L2 norm equals
    ``amplitude``.
    """
    u = rng.random_field(grid, 2, seed, k_max=k_max)
    u = project_H(u)
    if mean_free_z:
        u = project_mean_zero(u, grid.vertical_axis)
    n = u.l2_norm()
    if n == 0.0:
        raise ValueError("random state collapsed to zero after projection")
    return SpectralField(grid, u.coeffs * (amplitude / n))


def analytic_2d(grid: TorusGrid, seed: int = 11, strip: float = 8.0,
                amplitude: float = 1.0) -> SpectralField:
    """Documented analytic test field for the decay study.

    A fixed low-mode trigonometric polynomial plus a random-phase tail with
    radial amplitude exp(-|k|/strip).  The default strip keeps every
    mollification level's content far above the double-precision
    cancellation floor, so fitted slopes are clean through N = 6.
    """
    if grid.n_dims != 2:
        raise ValueError("analytic_2d is a 2d field")
    base = smooth_2d(grid, amplitude=1.0)
    tail = rng.random_field(
        grid, 2, seed,
        k_max=tuple(s // 2 - 2 for s in grid.sizes),
        envelope=lambda q: np.exp(-q / strip),
    )
    u = project_H(SpectralField(grid, base.coeffs + 0.5 * tail.coeffs))
    n = u.l2_norm()
    return SpectralField(grid, u.coeffs * (amplitude / n))


NAMED_FIELDS = {
    "cosx-cosz": cosx_cosz,
    "smooth-2d": smooth_2d,
    "random-H": random_state,
    "analytic-2d": analytic_2d,
}


def make_named_field(name: str, grid: TorusGrid, **params) -> SpectralField:
    if name not in NAMED_FIELDS:
        raise ValueError(
            f"unknown initial field {name!r}; known: {sorted(NAMED_FIELDS)}"
        )
    return NAMED_FIELDS[name](grid, **params)
