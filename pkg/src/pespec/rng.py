"""Deterministic pseudo-random streams and random band-limited fields.

The generator is the splitmix construction on 64-bit state:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)
    uniform = (z >> 11) * 2^-53            # in [0, 1)

Because the state sequence is just seed + i*GOLDEN mod 2^64, the whole
stream can also be produced vectorized; both paths give identical values,
so seeded artifacts are reproducible from any language with 64-bit
integers.

Random fields draw two centered uniforms (real, imaginary) per coefficient
slot, walking the components in order and each coefficient array in C
order over the fft layout.  The draw happens for every slot before any
masking, so the stream consumed is a function of the grid shape alone.
"""

from __future__ import annotations

import numpy as np

from .torus import SpectralField, TorusGrid, hermitianize

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Sequential splitmix stream of 64-bit words and uniforms."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53


def uniform_array(seed: int, count: int) -> np.ndarray:
    """The first ``count`` uniforms of SplitMix64(seed), vectorized."""
    idx = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + idx * np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def random_field(
    grid: TorusGrid,
    components: int,
    seed: int,
    k_max=None,
    envelope=None,
) -> SpectralField:
    """Random real band-limited field with unit-scale coefficients.

    k_max      per-axis integer cutoff (scalar or per-axis tuple); slots with
               any |k_axis| beyond it are zeroed.  Default: size/4.
    envelope   optional callable of the physical frequency magnitude |k/lam|
               applied as a radial amplitude profile.
    """
    sizes = grid.sizes
    n_slots = components * int(np.prod(sizes))
    draws = uniform_array(seed, 2 * n_slots)
    re = draws[0::2].reshape((components, *sizes)) - 0.5
    im = draws[1::2].reshape((components, *sizes)) - 0.5
    c = re + 1j * im

    if k_max is None:
        k_max = tuple(s // 4 for s in sizes)
    elif np.isscalar(k_max):
        k_max = (int(k_max),) * grid.n_dims
    for ax, km in enumerate(k_max):
        keep = np.abs(grid.wavenumbers(ax)) <= km
        c = c * grid.axis_profile(ax, keep.astype(float))

    if envelope is not None:
        q2 = np.zeros((1,) * grid.n_dims)
        for ax in range(grid.n_dims):
            f = grid.frequencies(ax)
            q2 = q2 + grid.axis_profile(ax, f * f)
        c = c * envelope(np.sqrt(q2))

    return SpectralField(grid, hermitianize(c))
