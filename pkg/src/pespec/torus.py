"""Real periodic fields on n-tori and their discrete Fourier representation.

Conventions used across the package:

* An axis of ``size`` points with scale ``lam`` covers a circle of period
  ``2*pi*lam``.  Collocation points are ``x_m = -pi*lam + 2*pi*lam*m/size``.
* A field with integer wavenumber ``k`` on that axis oscillates like
  ``exp(1j*k*x/lam)``; its physical frequency is ``k/lam``.
* Coefficients are stored in numpy fft layout ``[0, 1, .., n/2-1, -n/2, .., -1]``
  with the Nyquist slot ``-n/2`` appearing once.  Fields are real, so arrays
  are conjugate-symmetric and the Nyquist coefficient is forced real.
* Arrays carry a leading component axis: shape ``(components, *sizes)``.
  Scalars use ``components == 1``.

All operations are pure: they never mutate their inputs, so values can be
shared freely between threads.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


class ConstraintError(ValueError):
    """A structural precondition on the input field is violated."""


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class TorusGrid:
    """Uniform collocation grid on a product of circles.

    sizes       per-axis point counts (powers of two, >= 4)
    lambdas     per-axis torus scales (period 2*pi*lambda)
    axis_roles  "horizontal" or "vertical" per axis; exactly one vertical
                axis for n_dims >= 2
    """

    sizes: tuple[int, ...]
    lambdas: tuple[float, ...]
    axis_roles: tuple[str, ...]

    def __post_init__(self):
        n = len(self.sizes)
        if not 1 <= n <= 3:
            raise ValueError(f"n_dims must be 1..3, got {n}")
        if len(self.lambdas) != n or len(self.axis_roles) != n:
            raise ValueError("sizes, lambdas and axis_roles must have equal length")
        for s in self.sizes:
            if not _is_pow2(s) or s < 4:
                raise ValueError(f"axis size {s} is not a power of two >= 4")
        for lam in self.lambdas:
            if not lam > 0:
                raise ValueError(f"lambda must be positive, got {lam}")
        for r in self.axis_roles:
            if r not in (HORIZONTAL, VERTICAL):
                raise ValueError(f"unknown axis role {r!r}")
        n_vert = sum(r == VERTICAL for r in self.axis_roles)
        if n >= 2 and n_vert != 1:
            raise ValueError("exactly one vertical axis required for n_dims >= 2")
        if n == 1 and n_vert > 1:
            raise ValueError("at most one vertical axis")

    @property
    def n_dims(self) -> int:
        return len(self.sizes)

    @property
    def vertical_axis(self) -> int:
        for i, r in enumerate(self.axis_roles):
            if r == VERTICAL:
                return i
        raise ValueError("grid has no vertical axis")

    @property
    def horizontal_axes(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.axis_roles) if r == HORIZONTAL)

    @property
    def volume(self) -> float:
        v = 1.0
        for lam in self.lambdas:
            v *= 2.0 * np.pi * lam
        return v

    @property
    def cell_volume(self) -> float:
        return self.volume / float(np.prod(self.sizes))

    def resolve_axis(self, axis) -> int:
        """Map an axis designator (int, 'z', 'x1', 'x2') to an axis index."""
        if isinstance(axis, (int, np.integer)):
            if not 0 <= axis < self.n_dims:
                raise ValueError(f"axis {axis} out of range for {self.n_dims}d grid")
            return int(axis)
        if axis == "z":
            return self.vertical_axis
        if isinstance(axis, str) and axis.startswith("x"):
            h = self.horizontal_axes
            idx = int(axis[1:]) - 1
            if not 0 <= idx < len(h):
                raise ValueError(f"no horizontal axis {axis!r} on this grid")
            return h[idx]
        raise ValueError(f"cannot resolve axis designator {axis!r}")

    def axis_name(self, axis: int) -> str:
        if self.axis_roles[axis] == VERTICAL:
            return "z"
        return f"x{self.horizontal_axes.index(axis) + 1}"

    def wavenumbers(self, axis) -> np.ndarray:
        """Integer wavenumbers of the given axis in fft layout."""
        ax = self.resolve_axis(axis)
        return _wavenumbers(self.sizes[ax])

    def frequencies(self, axis) -> np.ndarray:
        """Physical frequencies k/lambda of the given axis in fft layout."""
        ax = self.resolve_axis(axis)
        return _wavenumbers(self.sizes[ax]) / self.lambdas[ax]

    def axis_profile(self, axis, values_1d: np.ndarray) -> np.ndarray:
        """Reshape a per-wavenumber 1d array for broadcasting over coeffs."""
        ax = self.resolve_axis(axis)
        shape = [1] * self.n_dims
        shape[ax] = self.sizes[ax]
        return np.asarray(values_1d).reshape(shape)

    def coordinates(self, axis) -> np.ndarray:
        ax = self.resolve_axis(axis)
        n, lam = self.sizes[ax], self.lambdas[ax]
        return -np.pi * lam + 2.0 * np.pi * lam * np.arange(n) / n

    def meshgrid(self) -> list[np.ndarray]:
        """Sparse collocation coordinate arrays, broadcastable to ``sizes``."""
        axes = [self.coordinates(i) for i in range(self.n_dims)]
        return list(np.meshgrid(*axes, indexing="ij", sparse=True))


def grid_1d(n: int, lam: float = 1.0, role: str = VERTICAL) -> TorusGrid:
    return TorusGrid((n,), (float(lam),), (role,))


def grid_2d(n1: int, nz: int, lam=(1.0, 1.0)) -> TorusGrid:
    return TorusGrid((n1, nz), (float(lam[0]), float(lam[1])), (HORIZONTAL, VERTICAL))


def grid_3d(n1: int, n2: int, nz: int, lam=(1.0, 1.0, 1.0)) -> TorusGrid:
    return TorusGrid(
        (n1, n2, nz),
        (float(lam[0]), float(lam[1]), float(lam[2])),
        (HORIZONTAL, HORIZONTAL, VERTICAL),
    )


@lru_cache(maxsize=256)
def _wavenumbers(n: int) -> np.ndarray:
    k = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
    k.setflags(write=False)
    return k


@lru_cache(maxsize=64)
def _offset_phase(sizes: tuple[int, ...]) -> np.ndarray:
    """Product of (-1)^k over all axes: the grid starts at -pi*lambda."""
    ph = np.ones(sizes)
    for ax, n in enumerate(sizes):
        k = _wavenumbers(n)
        sign = np.where(k % 2 == 0, 1.0, -1.0)
        shape = [1] * len(sizes)
        shape[ax] = n
        ph = ph * sign.reshape(shape)
    ph.setflags(write=False)
    return ph


def values_from_coeffs(coeffs: np.ndarray, sizes: tuple[int, ...]) -> np.ndarray:
    """Sample sum_k c_k exp(ik.x/lam) on the collocation grid (real part)."""
    axes = tuple(range(coeffs.ndim - len(sizes), coeffs.ndim))
    n_tot = int(np.prod(sizes))
    return np.fft.ifftn(coeffs * _offset_phase(tuple(sizes)), axes=axes).real * n_tot


def coeffs_from_values(values: np.ndarray, sizes: tuple[int, ...]) -> np.ndarray:
    axes = tuple(range(values.ndim - len(sizes), values.ndim))
    n_tot = int(np.prod(sizes))
    return np.fft.fftn(values, axes=axes) / n_tot * _offset_phase(tuple(sizes))


def _reflect(coeffs: np.ndarray, spatial_axis_offset: int = 1) -> np.ndarray:
    """Index map k -> -k on every spatial axis."""
    out = coeffs
    for ax in range(spatial_axis_offset, coeffs.ndim):
        n = coeffs.shape[ax]
        idx = (-np.arange(n)) % n
        out = np.take(out, idx, axis=ax)
    return out


def hermitianize(coeffs: np.ndarray) -> np.ndarray:
    """Project onto conjugate-symmetric arrays (real fields, Nyquist real)."""
    return 0.5 * (coeffs + np.conj(_reflect(coeffs)))


@dataclass(eq=False)
class SpectralField:
    """Fourier coefficients of a real vector field on a torus grid."""

    grid: TorusGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != self.grid.n_dims + 1 or c.shape[1:] != self.grid.sizes:
            raise ValueError(
                f"coefficient shape {c.shape} does not match grid sizes "
                f"{self.grid.sizes} (expected (components, *sizes))"
            )
        self.coeffs = c

    @property
    def components(self) -> int:
        return self.coeffs.shape[0]

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, coeffs)

    def component(self, i: int) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs[i : i + 1])

    def l2_norm(self) -> float:
        """Plancherel L2 norm: (2 pi lam)^(n/2) times the coefficient l2 norm."""
        return float(np.sqrt(self.grid.volume * np.sum(np.abs(self.coeffs) ** 2)))


@dataclass(eq=False)
class PhysicalField:
    """Collocation values of a real vector field, shape (components, *sizes)."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != self.grid.n_dims + 1 or v.shape[1:] != self.grid.sizes:
            raise ValueError(
                f"value shape {v.shape} does not match grid sizes "
                f"{self.grid.sizes} (expected (components, *sizes))"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("physical field contains non-finite values")
        self.values = v

    @property
    def components(self) -> int:
        return self.values.shape[0]


def field_from_values(grid: TorusGrid, values: np.ndarray) -> PhysicalField:
    """Build a PhysicalField, accepting scalar arrays without a component axis."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim == grid.n_dims:
        v = v[np.newaxis]
    return PhysicalField(grid, v)


def forward_transform(f: PhysicalField) -> SpectralField:
    """Discrete Fourier coefficients of a sampled real field."""
    if not isinstance(f, PhysicalField):
        raise ValueError("forward_transform expects a PhysicalField")
    c = coeffs_from_values(f.values, f.grid.sizes)
    return SpectralField(f.grid, hermitianize(c))


def inverse_transform(u: SpectralField) -> PhysicalField:
    """Collocation samples of a coefficient array (real part)."""
    if not isinstance(u, SpectralField):
        raise ValueError("inverse_transform expects a SpectralField")
    return PhysicalField(u.grid, values_from_coeffs(u.coeffs, u.grid.sizes))


def _pointwise_magnitude(values: np.ndarray) -> np.ndarray:
    if values.shape[0] == 1:
        return np.abs(values[0])
    return np.sqrt(np.sum(values * values, axis=0))


def quadrature_norm(f: PhysicalField, p) -> float:
    """L^p norm by rectangle quadrature; p = inf is the grid maximum.

    Vector fields are reduced pointwise to their Euclidean magnitude first.
    The rule is exact for p = 2 on band-limited fields and within the
    tolerance budget elsewhere.
    """
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"norm exponent must satisfy p >= 1, got {p}")
    mag = _pointwise_magnitude(f.values)
    if np.isinf(p):
        return float(mag.max())
    return float((np.sum(mag**p) * f.grid.cell_volume) ** (1.0 / p))


def project_mean_zero(u: SpectralField, axis) -> SpectralField:
    """Zero every coefficient with k = 0 on the given axis (idempotent)."""
    ax = u.grid.resolve_axis(axis)
    c = u.coeffs.copy()
    sl = [slice(None)] * c.ndim
    sl[ax + 1] = 0
    c[tuple(sl)] = 0.0
    return SpectralField(u.grid, c)


def enforce_parity(u: SpectralField, axis, parity: str) -> SpectralField:
    """Symmetrize 0.5*(u(x) +/- u(-x)) along one axis (idempotent)."""
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    ax = u.grid.resolve_axis(axis)
    n = u.grid.sizes[ax]
    idx = (-np.arange(n)) % n
    refl = np.take(u.coeffs, idx, axis=ax + 1)
    sign = 1.0 if parity == "even" else -1.0
    return SpectralField(u.grid, 0.5 * (u.coeffs + sign * refl))


def derivative(u: SpectralField, axis, order: int = 1) -> SpectralField:
    """Spectral derivative along one axis: multiply by (i k/lambda)^order."""
    ax = u.grid.resolve_axis(axis)
    mult = (1j * u.grid.frequencies(ax)) ** order
    return SpectralField(u.grid, u.coeffs * u.grid.axis_profile(ax, mult))


# ---------------------------------------------------------------------------
# Band adjustment: refining and coarsening coefficient arrays.
#
# Padding splits the (real) Nyquist coefficient evenly between the +n/2 and
# -n/2 slots of the finer array so the represented function is unchanged;
# truncation folds the pair back.  The spatial axes are the trailing ones.
# ---------------------------------------------------------------------------


def _pad_axis(c: np.ndarray, ax: int, n_new: int) -> np.ndarray:
    n = c.shape[ax]
    half = n // 2
    shape = list(c.shape)
    shape[ax] = n_new
    out = np.zeros(shape, dtype=c.dtype)
    src = np.moveaxis(c, ax, -1)
    dst = np.moveaxis(out, ax, -1)
    dst[..., :half] = src[..., :half]
    if half > 1:
        dst[..., n_new - (half - 1) :] = src[..., half + 1 :]
    ny = 0.5 * src[..., half]
    dst[..., half] += ny
    dst[..., n_new - half] += ny
    return out


def _truncate_axis(c: np.ndarray, ax: int, n_new: int) -> np.ndarray:
    n = c.shape[ax]
    half_new = n_new // 2
    shape = list(c.shape)
    shape[ax] = n_new
    out = np.zeros(shape, dtype=c.dtype)
    src = np.moveaxis(c, ax, -1)
    dst = np.moveaxis(out, ax, -1)
    dst[..., :half_new] = src[..., :half_new]
    if half_new > 1:
        dst[..., half_new + 1 :] = src[..., n - (half_new - 1) :]
    dst[..., half_new] = src[..., half_new] + src[..., n - half_new]
    return out


def pad_coeffs(c: np.ndarray, new_sizes: tuple[int, ...]) -> np.ndarray:
    """Embed coefficients into a finer band (trailing axes are spatial)."""
    nsp = len(new_sizes)
    for i, n_new in enumerate(new_sizes):
        ax = c.ndim - nsp + i
        n_old = c.shape[ax]
        if n_new == n_old:
            continue
        if n_new < n_old:
            raise ValueError("pad_coeffs target smaller than source")
        c = _pad_axis(c, ax, n_new)
    return c


def truncate_coeffs(c: np.ndarray, new_sizes: tuple[int, ...]) -> np.ndarray:
    """Restrict coefficients to a coarser band (adjoint of pad_coeffs)."""
    nsp = len(new_sizes)
    for i, n_new in enumerate(new_sizes):
        ax = c.ndim - nsp + i
        n_old = c.shape[ax]
        if n_new == n_old:
            continue
        if n_new > n_old:
            raise ValueError("truncate_coeffs target larger than source")
        c = _truncate_axis(c, ax, n_new)
    return c


def refined_grid(grid: TorusGrid, factor: int = 2) -> TorusGrid:
    return TorusGrid(
        tuple(s * factor for s in grid.sizes), grid.lambdas, grid.axis_roles
    )


def pad_spectrum(u: SpectralField, factor: int = 2) -> SpectralField:
    """Same field on a grid refined by an integer factor."""
    g = refined_grid(u.grid, factor)
    return SpectralField(g, pad_coeffs(u.coeffs, g.sizes))


def truncate_spectrum(u: SpectralField, grid: TorusGrid) -> SpectralField:
    """Band-restrict a field onto a coarser grid on the same torus."""
    if grid.lambdas != u.grid.lambdas:
        raise ValueError("truncate_spectrum requires matching torus scales")
    return SpectralField(grid, truncate_coeffs(u.coeffs, grid.sizes))


# ---------------------------------------------------------------------------
# TBSF binary snapshots.
#
# Layout (little endian): magic "TBSF", u32 version=1, u32 n_dims,
# u32 components, then per axis (u32 size, f64 lambda, u8 role with
# 0=horizontal 1=vertical), then the complex coefficients as f64 (re, im)
# pairs, component-major, axes in declaration order, last axis fastest.
# ---------------------------------------------------------------------------

TBSF_MAGIC = b"TBSF"
TBSF_VERSION = 1
_ROLE_CODE = {HORIZONTAL: 0, VERTICAL: 1}
_ROLE_NAME = {0: HORIZONTAL, 1: VERTICAL}


def save_tbsf(path, u: SpectralField) -> None:
    g = u.grid
    head = [struct.pack("<4sIII", TBSF_MAGIC, TBSF_VERSION, g.n_dims, u.components)]
    for size, lam, role in zip(g.sizes, g.lambdas, g.axis_roles):
        head.append(struct.pack("<IdB", size, lam, _ROLE_CODE[role]))
    body = np.ascontiguousarray(u.coeffs).astype("<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(b"".join(head))
        fh.write(body)


def load_tbsf(path) -> SpectralField:
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, n_dims, components = struct.unpack_from("<4sIII", raw, 0)
    if magic != TBSF_MAGIC:
        raise ValueError(f"not a TBSF file: bad magic {magic!r}")
    if version != TBSF_VERSION:
        raise ValueError(f"unsupported TBSF version {version}")
    off = struct.calcsize("<4sIII")
    sizes, lambdas, roles = [], [], []
    for _ in range(n_dims):
        size, lam, role = struct.unpack_from("<IdB", raw, off)
        off += struct.calcsize("<IdB")
        sizes.append(size)
        lambdas.append(lam)
        roles.append(_ROLE_NAME[role])
    grid = TorusGrid(tuple(sizes), tuple(lambdas), tuple(roles))
    count = components * int(np.prod(sizes))
    coeffs = np.frombuffer(raw, dtype="<c16", count=count, offset=off)
    coeffs = coeffs.astype(np.complex128).reshape((components, *sizes))
    return SpectralField(grid, coeffs)
