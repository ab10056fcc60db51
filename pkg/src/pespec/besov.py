"""Anisotropic mixed Besov norms, fractional derivatives, exponent rules.

A norm descriptor names the space via (s, p, q), the axis carrying the
dyadic decomposition, and an inner norm over the remaining axes.  The
default evaluation order takes the inner norm first (pointwise along the
decomposition axis), e.g.

    a_j = || sup_{x_H} |block_j u| ||_{L^p_z},   norm = l^q of 2^{s j} a_j.

Setting ``swap_order`` evaluates the axis norm per horizontal point first
and the inner norm outside.  Vector fields are reduced pointwise to their
Euclidean magnitude before any norm is taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lp
from .torus import SpectralField, values_from_coeffs

INNER_NONE = "none"
INNER_LINF_H = "LinfH"
INNER_L2_H = "L2H"


def _fmt_exp(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:g}"


@dataclass(frozen=True)
class BesovSpec:
    """Descriptor of a homogeneous dyadic norm on one axis.

    s           regularity weight exponent (2^{s j} per block)
    p           integrability along the decomposition axis, in [1, inf]
    q           summability over blocks, in [1, inf]
    axis        axis designator carrying the decomposition ('z', 'x1', int)
    inner       norm over the remaining axes: 'LinfH', 'L2H' or 'none'
    swap_order  if True, the axis L^p is taken inside and the inner norm
                outside (the swapped mixed-norm convention)
    """

    s: float
    p: float
    q: float
    axis: object = "z"
    inner: str = INNER_NONE
    swap_order: bool = False

    def __post_init__(self):
        if not float(self.p) >= 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not float(self.q) >= 1.0:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if self.inner not in (INNER_NONE, INNER_LINF_H, INNER_L2_H):
            raise ValueError(f"unknown inner norm {self.inner!r}")

    def column_name(self) -> str:
        name = (
            f"B{self.s:g}_{_fmt_exp(float(self.p))}_{_fmt_exp(float(self.q))}"
            f"_{self.axis}_{self.inner}"
        )
        if self.swap_order:
            name += "_swap"
        return name


def parse_spec(text: str) -> BesovSpec:
    """Parse 's=-0.25,p=4,q=inf,axis=z,inner=LinfH' into a BesovSpec."""
    kw: dict = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ValueError(f"bad spec fragment {item!r} (expected key=value)")
        key, val = (x.strip() for x in item.split("=", 1))
        if key in ("s", "p", "q"):
            kw[key] = float(val)
        elif key == "axis":
            kw["axis"] = int(val) if val.lstrip("+-").isdigit() else val
        elif key == "inner":
            kw["inner"] = val
        elif key == "order":
            kw["swap_order"] = {"inner-first": False, "inner-last": True}[val]
        else:
            raise ValueError(f"unknown spec key {key!r}")
    for required in ("s", "p", "q"):
        if required not in kw:
            raise ValueError(f"spec is missing {required!r}")
    return BesovSpec(**kw)


def _axis_lp(mag: np.ndarray, ax: int, p: float, weight: float) -> np.ndarray:
    if np.isinf(p):
        return mag.max(axis=ax)
    return (np.sum(mag**p, axis=ax) * weight) ** (1.0 / p)


def _block_norm(u: SpectralField, block: SpectralField, spec: BesovSpec) -> float:
    grid = u.grid
    ax = grid.resolve_axis(spec.axis)
    vals = values_from_coeffs(block.coeffs, grid.sizes)
    if vals.shape[0] == 1:
        mag = np.abs(vals[0])
    else:
        mag = np.sqrt(np.sum(vals * vals, axis=0))
    others = tuple(i for i in range(grid.n_dims) if i != ax)
    w_ax = 2.0 * np.pi * grid.lambdas[ax] / grid.sizes[ax]
    if spec.inner == INNER_NONE:
        if np.isinf(spec.p):
            return float(mag.max())
        return float((np.sum(mag**spec.p) * grid.cell_volume) ** (1.0 / spec.p))
    w_h = 1.0
    for i in others:
        w_h *= 2.0 * np.pi * grid.lambdas[i] / grid.sizes[i]

    def inner_reduce(a: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
        if spec.inner == INNER_LINF_H:
            return a.max(axis=axes) if axes else a
        return np.sqrt(np.sum(a * a, axis=axes) * w_h) if axes else a

    if not spec.swap_order:
        per_z = inner_reduce(mag, others)  # 1d along the decomposition axis
        return float(_axis_lp(per_z, 0, spec.p, w_ax))
    per_h = _axis_lp(mag, ax, spec.p, w_ax)  # axis norm per remaining point
    out = inner_reduce(per_h, tuple(range(per_h.ndim)))
    return float(out)


def besov_norm(u: SpectralField, spec: BesovSpec) -> float:
    """Weighted l^q over dyadic blocks of mixed-norm block sizes."""
    if not isinstance(spec, BesovSpec):
        raise ValueError("besov_norm expects a BesovSpec")
    ax = u.grid.resolve_axis(spec.axis)
    terms = []
    for j in lp.block_range(u.grid, ax):
        b = lp.dyadic_block(u, j, ax)
        if not np.any(b.coeffs):
            continue
        terms.append(_block_norm(u, b, spec) * 2.0 ** (spec.s * j))
    if not terms:
        return 0.0
    arr = np.asarray(terms)
    if np.isinf(spec.q):
        return float(arr.max())
    return float(np.sum(arr**spec.q) ** (1.0 / spec.q))


def frac_derivative(u: SpectralField, s: float, axis) -> SpectralField:
    """Fractional derivative |k/lambda|^s along one axis; k=0 is zeroed."""
    ax = u.grid.resolve_axis(axis)
    q = np.abs(u.grid.frequencies(ax))
    with np.errstate(divide="ignore"):
        mult = np.where(q == 0.0, 0.0, q ** float(s))
    return u.with_coeffs(u.coeffs * u.grid.axis_profile(ax, mult))


@dataclass(frozen=True)
class SerrinExponents:
    """Validated exponent triple for the scaling-critical condition."""

    beta: float
    p: float
    gamma: float


def validate_exponents(beta: float, p: float, gamma: float) -> SerrinExponents:
    """Accept (beta, p, gamma) iff 2<p,beta<inf, 2/beta+2/p=1, 2<gamma<inf."""
    beta, p, gamma = float(beta), float(p), float(gamma)
    if not (2.0 < p < math.inf):
        raise ValueError(f"exponent range violated: need 2 < p < inf, got p={p:g}")
    if not (2.0 < beta < math.inf):
        raise ValueError(
            f"exponent range violated: need 2 < beta < inf, got beta={beta:g}"
        )
    if not (2.0 < gamma < math.inf):
        raise ValueError(
            f"exponent range violated: need 2 < gamma < inf, got gamma={gamma:g}"
        )
    if abs(2.0 / beta + 2.0 / p - 1.0) > 1e-12:
        raise ValueError(
            "scaling relation 2/beta + 2/p = 1 violated: "
            f"2/{beta:g} + 2/{p:g} = {2.0 / beta + 2.0 / p:.17g}"
        )
    return SerrinExponents(beta, p, gamma)


def serrin_beta(p: float) -> float:
    """The time exponent paired with p by the scaling relation."""
    p = float(p)
    if not (2.0 < p < math.inf):
        raise ValueError(f"exponent range violated: need 2 < p < inf, got p={p:g}")
    return 2.0 * p / (p - 2.0)


def rescale_dyadic(u: SpectralField, m: int) -> SpectralField:
    """Parabolic rescaling by 2^m: 2^m * u(2^m x) on the torus of scale
    lambda/2^m.  Integer wavenumbers are preserved; coefficients scale by
    2^m, so the map is exact for dyadic scale changes."""
    from .torus import TorusGrid

    g = u.grid
    new = TorusGrid(
        g.sizes, tuple(np.ldexp(lam, -m) for lam in g.lambdas), g.axis_roles
    )
    return SpectralField(new, np.ldexp(1.0, m) * u.coeffs)


def sobolev_embed_check(
    u: SpectralField, s1: float, p1: float, s0: float, p0: float, q: float,
    axis="z",
) -> float:
    """Ratio of the lower-index norm to the higher-index norm under the
    embedding relation s1 - 1/p1 = s0 - 1/p0 (1/inf = 0)."""

    def inv(p):
        return 0.0 if math.isinf(p) else 1.0 / p

    if abs((s1 - inv(p1)) - (s0 - inv(p0))) > 1e-12:
        raise ValueError(
            "embedding relation s1 - 1/p1 = s0 - 1/p0 violated: "
            f"{s1 - inv(p1):g} vs {s0 - inv(p0):g}"
        )
    denom = besov_norm(u, BesovSpec(s=s1, p=p1, q=q, axis=axis))
    if denom == 0.0:
        raise ValueError("embedding ratio undefined for the zero field")
    numer = besov_norm(u, BesovSpec(s=s0, p=p0, q=q, axis=axis))
    return numer / denom
