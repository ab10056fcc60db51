"""Dyadic frequency cutoffs, blocks, low-pass and mollification operators.

The radial cutoff chi is built from the classic smooth step

    h(t) = exp(-1/t) for t > 0, else 0
    S(t) = h(t) / (h(t) + h(1-t))

as chi(xi) = 1 for |xi| <= 1/2, S(2*(1-|xi|)) for 1/2 < |xi| < 1, 0 beyond.
This gives exactly computable samples, e.g. chi(3/4) = 1/2.  The ring
profile is rho(xi) = chi(xi/2) - chi(xi), supported on 1/2 < |xi| < 2,
and the dyadic block at index j multiplies the coefficient at wavenumber k
by rho(2^-j * k/lambda).

All operators here are pure Fourier multipliers; blocks with distinct j are
independent and can be evaluated concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .torus import SpectralField, TorusGrid


def chi(xi):
    """Smooth radial low-pass profile: 1 on |xi|<=1/2, 0 on |xi|>=1."""
    q = np.abs(np.asarray(xi, dtype=np.float64))
    out = np.zeros_like(q)
    out[q <= 0.5] = 1.0
    mid = (q > 0.5) & (q < 1.0)
    if np.any(mid):
        t = 2.0 * (1.0 - q[mid])
        a = np.exp(-1.0 / t)
        b = np.exp(-1.0 / (1.0 - t))
        out[mid] = a / (a + b)
    if np.ndim(xi) == 0:
        return float(out)
    return out


def rho(xi):
    """Ring profile chi(xi/2) - chi(xi), supported on 1/2 < |xi| < 2."""
    q = np.asarray(xi, dtype=np.float64)
    out = chi(0.5 * q) - chi(q)
    if np.ndim(xi) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class CutoffProfile:
    """Handle for the cutoff pair; stateless, provided for naming purposes."""

    def chi(self, xi):
        return chi(xi)

    def rho(self, xi):
        return rho(xi)


DEFAULT_PROFILE = CutoffProfile()


@dataclass(frozen=True)
class BlockIndex:
    """A dyadic index j together with the axis carrying the decomposition."""

    j: int
    axis: int


def block_range(grid: TorusGrid, axis) -> range:
    """Indices j whose ring can meet a representable nonzero wavenumber.

    The ring of block j is the open annulus 2^(j-1) < |k/lambda| < 2^(j+1);
    representable nonzero frequencies on an axis run from 1/lambda to
    (n/2)/lambda.  Blocks outside the returned range are identically zero.
    """
    ax = grid.resolve_axis(axis)
    q_min = 1.0 / grid.lambdas[ax]
    q_max = (grid.sizes[ax] // 2) / grid.lambdas[ax]
    j_lo = math.floor(math.log2(q_min)) - 1
    j_hi = math.ceil(math.log2(q_max)) + 1
    return range(j_lo, j_hi + 1)


def _radial_frequency(grid: TorusGrid, axes: tuple[int, ...]) -> np.ndarray:
    q2 = np.zeros((1,) * grid.n_dims)
    for ax in axes:
        f = grid.frequencies(ax)
        q2 = q2 + grid.axis_profile(ax, f * f)
    return np.sqrt(q2)


def _resolve_axes(grid: TorusGrid, axes) -> tuple[int, ...]:
    """Accept an axis designator, 'h' for the horizontal pair, or a tuple."""
    if axes == "h":
        return grid.horizontal_axes
    if isinstance(axes, tuple):
        return tuple(grid.resolve_axis(a) for a in axes)
    return (grid.resolve_axis(axes),)


def dyadic_block(u: SpectralField, j: int, axis) -> SpectralField:
    """Frequency-localized piece of u at dyadic scale 2^j along one axis."""
    ax = u.grid.resolve_axis(axis)
    mult = rho(np.ldexp(u.grid.frequencies(ax), -j))
    return u.with_coeffs(u.coeffs * u.grid.axis_profile(ax, mult))


def fattened_block(u: SpectralField, j: int, axis) -> SpectralField:
    """Sum of blocks j-1, j, j+1; acts as the identity on block j's ring."""
    ax = u.grid.resolve_axis(axis)
    q = u.grid.frequencies(ax)
    # rho_{j-1} + rho_j + rho_{j+1} telescopes to two chi evaluations
    mult = chi(np.ldexp(q, -(j + 2))) - chi(np.ldexp(q, -(j - 1)))
    return u.with_coeffs(u.coeffs * u.grid.axis_profile(ax, mult))


def low_pass(u: SpectralField, m: int, axis) -> SpectralField:
    """Sum of dyadic blocks j <= m-3; drops the k=0 mode by construction."""
    ax = u.grid.resolve_axis(axis)
    q = u.grid.frequencies(ax)
    mult = chi(np.ldexp(q, -(m - 2)))
    mult[u.grid.wavenumbers(ax) == 0] = 0.0
    return u.with_coeffs(u.coeffs * u.grid.axis_profile(ax, mult))


def mollify_lowpass(
    u: SpectralField, N: int, axes, keep_mean: bool = False
) -> SpectralField:
    """Smooth low-pass at cutoff level N: the sum of blocks j <= N.

    ``axes`` is a single axis designator, a tuple of axes, or "h" for the
    horizontal pair; tuples use the radial frequency magnitude over those
    axes.  By default the multiplier follows the block sum and annihilates
    the joint zero mode (the mean along the chosen axes); with
    ``keep_mean=True`` the raw profile value chi(0)=1 is kept there, which
    is the unit-mass smoothing-kernel convention the commutator identities
    require.
    """
    axs = _resolve_axes(u.grid, axes)
    q = _radial_frequency(u.grid, axs)
    mult = chi(np.ldexp(q, -(N + 1)))
    if not keep_mean:
        mult = np.where(q == 0.0, 0.0, mult)
    return u.with_coeffs(u.coeffs * mult)


def verify_partition(grid: TorusGrid, axis) -> float:
    """Max deviation of sum_j rho(2^-j k/lambda) from 1 over nonzero k."""
    ax = grid.resolve_axis(axis)
    q = np.abs(grid.frequencies(ax))
    q = q[q > 0]
    total = np.zeros_like(q)
    for j in block_range(grid, ax):
        total += rho(np.ldexp(q, -j))
    return float(np.max(np.abs(total - 1.0))) if q.size else 0.0
