"""The hydrostatic solenoidal space, diagnostic vertical velocity, and
membership checks.

States are horizontal velocities v with two components, even in the
vertical coordinate, whose vertical average is divergence-free.  On a 3d
grid (x1, x2, z) the divergence is over both horizontal axes; on a 2d grid
(x1, z) only the first component advects and only d/dx1 of its vertical
average is constrained.

The vertical velocity is diagnostic: dz w = -div_H v with w = 0 on the top
of the period cell (z = pi*lambda_z).  Periodicity of w is equivalent to
the constraint on the vertical average, so diagnose_w refuses states
outside the space instead of silently producing a non-periodic field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .torus import ConstraintError, SpectralField, enforce_parity


def _mode(v: SpectralField, mode=None) -> str:
    inferred = "2d" if v.grid.n_dims == 2 else "3d"
    if mode is not None and mode != inferred:
        raise ValueError(f"mode {mode!r} does not match a {v.grid.n_dims}d grid")
    return inferred


def _check_components(v: SpectralField) -> None:
    if v.components != 2:
        raise ValueError(
            f"hydrostatic states carry 2 horizontal components, got {v.components}"
        )
    if v.grid.n_dims not in (2, 3):
        raise ValueError("hydrostatic states live on 2d or 3d grids")


@dataclass(eq=False)
class HydrostaticState:
    """A horizontal velocity field tagged with its model dimension."""

    v: SpectralField

    def __post_init__(self):
        _check_components(self.v)

    @property
    def mode(self) -> str:
        return _mode(self.v)


def horizontal_divergence(v: SpectralField) -> SpectralField:
    """div_H v as a scalar field: sum over advecting horizontal components."""
    _check_components(v)
    g = v.grid
    h_axes = g.horizontal_axes
    d = np.zeros((1, *g.sizes), dtype=np.complex128)
    for comp, ax in enumerate(h_axes):
        mult = 1j * g.frequencies(ax)
        d[0] += v.coeffs[comp] * g.axis_profile(ax, mult)
    return SpectralField(g, d)


def diagnose_w(v: SpectralField, tol: float = 1e-10) -> SpectralField:
    """Vertical velocity from spectral antidifferentiation of -div_H v.

    The k_z = 0 coefficients are fixed by w = 0 at z = pi*lambda_z; the
    result is odd in z for even states and satisfies
    dz w + div_H v = 0 exactly in coefficients.
    """
    _check_components(v)
    g = v.grid
    zax = g.vertical_axis
    div = horizontal_divergence(v).coeffs
    kz = g.wavenumbers(zax)
    lam_z = g.lambdas[zax]

    # the vertical mean of div_H v must vanish, else w cannot be periodic
    sl = [slice(None)] * div.ndim
    sl[zax + 1] = 0
    bar = div[tuple(sl)]
    scale = float(np.max(np.abs(v.coeffs))) + 1e-300
    worst = float(np.max(np.abs(bar))) if bar.size else 0.0
    if worst > tol * scale:
        raise ConstraintError(
            "state outside the hydrostatic space: vertical mean of div_H v "
            f"has coefficient magnitude {worst:.3e} (limit {tol * scale:.3e})"
        )

    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(kz == 0, 0.0, lam_z / np.where(kz == 0, 1, kz))
    w = div * g.axis_profile(zax, 1j * inv)

    # pin w(z = pi*lambda_z) = 0: the k_z = 0 slot absorbs the alternating sum
    signs = np.where(kz % 2 == 0, 1.0, -1.0)
    top = np.sum(w * g.axis_profile(zax, signs), axis=zax + 1, keepdims=True)
    wsl = [slice(None)] * w.ndim
    wsl[zax + 1] = slice(0, 1)
    w[tuple(wsl)] = -top
    return SpectralField(g, w)


def project_H(v: SpectralField) -> SpectralField:
    """Orthogonal projection onto the hydrostatic solenoidal space.

    Even-symmetrizes in z, then applies the Leray projection over the
    horizontal wavenumbers to the vertical average (in the 2d model:
    removes every x1-dependent mode of the averaged first component).
    Idempotent, self-adjoint, energy non-increasing.
    """
    _check_components(v)
    g = v.grid
    zax = g.vertical_axis
    out = enforce_parity(v, zax, "even").coeffs
    sl = [slice(None)] * out.ndim
    sl[zax + 1] = 0
    bar = out[tuple(sl)]  # shape (2, *horizontal sizes)

    if g.n_dims == 3:
        ax1, ax2 = g.horizontal_axes
        k1 = g.frequencies(ax1).reshape(-1, 1)
        k2 = g.frequencies(ax2).reshape(1, -1)
        k_dot_v = k1 * bar[0] + k2 * bar[1]
        k2sum = k1 * k1 + k2 * k2
        factor = k_dot_v / np.where(k2sum == 0.0, 1.0, k2sum)
        factor = np.where(k2sum == 0.0, 0.0, factor)
        bar = bar.copy()
        bar[0] -= k1 * factor
        bar[1] -= k2 * factor
    else:
        (ax1,) = g.horizontal_axes
        k1 = g.wavenumbers(ax1)
        bar = bar.copy()
        bar[0] = np.where(k1 == 0, bar[0], 0.0)

    out[tuple(sl)] = bar
    return SpectralField(g, out)


@dataclass(frozen=True)
class HMembershipReport:
    """Residuals of the two structural constraints, plus the verdict."""

    parity_residual: float
    divergence_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.parity_residual <= self.tol and self.divergence_residual <= self.tol


def check_in_H(v: SpectralField, tol: float = 1e-10) -> HMembershipReport:
    """L2 sizes of the odd-in-z part and of div_H of the vertical average."""
    _check_components(v)
    g = v.grid
    zax = g.vertical_axis
    odd_part = v.coeffs - enforce_parity(v, zax, "even").coeffs
    parity_res = float(np.sqrt(g.volume * np.sum(np.abs(odd_part) ** 2)))

    div = horizontal_divergence(v).coeffs
    sl = [slice(None)] * div.ndim
    sl[zax + 1] = 0
    bar = div[tuple(sl)]
    h_vol = 1.0
    for ax in g.horizontal_axes:
        h_vol *= 2.0 * np.pi * g.lambdas[ax]
    div_res = float(np.sqrt(h_vol * np.sum(np.abs(bar) ** 2)))
    return HMembershipReport(parity_res, div_res, tol)
