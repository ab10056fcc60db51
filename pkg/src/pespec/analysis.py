"""Trilinear flux decompositions, mollification commutators, and the
Gronwall uniqueness envelope.

Everything here reduces to exact spectral algebra on a 2x zero-padded
grid: products of band-limited fields are formed pointwise on the padded
collocation grid, where the rectangle rule integrates them exactly, so
the decomposition identities (six-term flux split, eight-term commutator
split) hold to roundoff rather than to quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import besov
from .besov import BesovSpec, SerrinExponents, serrin_beta, validate_exponents
from .hydrostatic import HydrostaticState, diagnose_w, project_H
from .lp import block_range, chi, mollify_lowpass, rho
from .solver import BlowupError, RunSeries, Solver, SolverConfig
from .torus import (
    ConstraintError,
    PhysicalField,
    SpectralField,
    TorusGrid,
    coeffs_from_values,
    pad_coeffs,
    pad_spectrum,
    refined_grid,
    values_from_coeffs,
)

EPS = 1e-300


def _as_field(v) -> SpectralField:
    return v.v if isinstance(v, HydrostaticState) else v


def _mode_of(grid: TorusGrid, mode: str | None) -> str:
    inferred = "3d" if grid.n_dims == 3 else "2d"
    if mode is not None and mode.lower() != inferred:
        raise ValueError(f"mode {mode!r} does not match a {inferred} grid")
    return inferred


def _big_sizes(grid: TorusGrid) -> tuple[int, ...]:
    return tuple(2 * s for s in grid.sizes)


def _phys(coeffs: np.ndarray, big: tuple[int, ...]) -> np.ndarray:
    """Physical samples of original-grid coefficients on the 2x grid."""
    return values_from_coeffs(pad_coeffs(coeffs, big), big)


def _dot(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.dot(x.ravel(), y.ravel()))


def _require_z_mean_free(u: SpectralField, label: str, tol: float) -> None:
    zax = u.grid.vertical_axis
    sl = [slice(None)] * u.coeffs.ndim
    sl[1 + zax] = slice(0, 1)
    bar = float(np.max(np.abs(u.coeffs[tuple(sl)])))
    scale = float(np.max(np.abs(u.coeffs))) + EPS
    if bar > tol * scale:
        raise ConstraintError(
            f"{label} must be z-mean-free for the dyadic decomposition; "
            f"strip the vertical mean first (relative mean size {bar / scale:.3e})"
        )


# ---------------------------------------------------------------------------
# Direct trilinear flux integrals.
# ---------------------------------------------------------------------------


def direct_flux(v_d, v_1, mode: str | None = None) -> tuple[float, float]:
    """Advective flux integrals of the difference field at one time slice.

    Returns (direct_H, direct_z) where direct_H contracts the horizontal
    advection tensor against the horizontal gradient of the difference
    field and direct_z pairs the diagnosed vertical velocity with the
    vertical shear.  Quadrature on the 2x grid is exact.
    """
    v_d = _as_field(v_d)
    v_1 = _as_field(v_1)
    g = v_d.grid
    if v_1.grid != g:
        raise ValueError("both fields must live on the same grid")
    mode = _mode_of(g, mode)
    big = _big_sizes(g)
    cell = g.volume / math.prod(big)
    zax = g.vertical_axis

    w_d = diagnose_w(v_d)
    p1 = [_phys(v_1.coeffs[i], big) for i in range(2)]
    pw = _phys(w_d.coeffs[0], big)

    def d_phys(i: int, ax: int) -> np.ndarray:
        mult = g.axis_profile(ax, 1j * g.frequencies(ax))
        return _phys(v_d.coeffs[i] * mult, big)

    direct_h = 0.0
    if mode == "3d":
        for slot, ax in enumerate(g.horizontal_axes):
            pa = _phys(v_d.coeffs[slot], big)
            for i in range(2):
                direct_h += _dot(pa * p1[i], d_phys(i, ax))
    else:
        pa = _phys(v_d.coeffs[0], big)
        for i in range(2):
            direct_h += _dot(pa * p1[i], d_phys(i, 0))
    direct_z = sum(_dot(pw * p1[i], d_phys(i, zax)) for i in range(2))
    return cell * direct_h, cell * direct_z


# ---------------------------------------------------------------------------
# Six-term dyadic decomposition of the flux.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FluxBreakdown:
    """The six paraproduct/remainder sums and the direct integrals they
    must reconstruct."""

    J: tuple[float, float, float, float, float, float]
    direct_H: float
    direct_z: float
    j_range: tuple[int, ...]
    mode: str

    @property
    def total(self) -> float:
        return float(sum(self.J))

    @property
    def mismatch(self) -> float:
        scale = abs(self.direct_H) + abs(self.direct_z) + EPS
        return abs(self.total - (self.direct_H + self.direct_z)) / scale


def _z_multipliers(g: TorusGrid):
    """Per-level multiplier profiles (block, windowed block) on the z axis."""
    zax = g.vertical_axis
    q = g.frequencies(zax)
    jr = list(block_range(g, zax))
    rho_j = [g.axis_profile(zax, rho(np.ldexp(q, -j))) for j in jr]
    fat_j = [
        g.axis_profile(
            zax, chi(np.ldexp(q, -(j + 2))) - chi(np.ldexp(q, -(j - 1)))
        )
        for j in jr
    ]
    fatrho_j = [f * r for f, r in zip(fat_j, rho_j)]
    return jr, rho_j, fatrho_j


def _prefix(arrs: list) -> list:
    out = []
    acc = None
    for a in arrs:
        acc = a.copy() if acc is None else acc + a
        out.append(acc)
    return out


def _family_sums(A, prefA, B, prefB, C) -> tuple[float, float, float]:
    """Paraproduct windows for one scalar triple (a, b, c).

    A, B are per-level physical blocks of a and b; C holds the doubly
    windowed blocks of c.  Returns the two paraproduct sums (block of a
    against retarded low-pass of b, and vice versa) plus the diagonal
    remainder sum.
    """
    n = len(A)
    prefC = _prefix(C)

    def window_c(i: int) -> np.ndarray:
        hi = min(i + 3, n - 1)
        out = prefC[hi]
        if i - 4 >= 0:
            out = out - prefC[i - 4]
        return out

    j1 = j2 = j3 = 0.0
    for i in range(n):
        xi = window_c(i)
        if i >= 3:
            j1 += _dot(A[i] * prefB[i - 3], xi)
            j2 += _dot(prefA[i - 3] * B[i], xi)
    for k in range(n):
        for l in range(max(0, k - 2), min(n, k + 3)):
            j3 += _dot(A[k] * B[l], prefC[min(max(k, l) + 3, n - 1)])
    return j1, j2, j3


def flux_decompose(v_d, v_1, mode: str | None = None, tol: float = 1e-10) -> FluxBreakdown:
    """Split the advective flux into the six dyadic interaction sums.

    Inputs must be z-mean-free (the dyadic blocks annihilate the vertical
    mean, so a barotropic part would silently drop out of the sums; its
    contribution belongs to a separate direct_flux call).
    """
    v_d = _as_field(v_d)
    v_1 = _as_field(v_1)
    g = v_d.grid
    if v_1.grid != g:
        raise ValueError("both fields must live on the same grid")
    mode = _mode_of(g, mode)
    _require_z_mean_free(v_d, "difference field", tol)
    _require_z_mean_free(v_1, "base field", tol)
    w_d = diagnose_w(v_d)
    _require_z_mean_free(w_d, "diagnosed vertical velocity", tol)

    big = _big_sizes(g)
    cell = g.volume / math.prod(big)
    zax = g.vertical_axis
    jr, rho_j, fatrho_j = _z_multipliers(g)

    def blocks(c: np.ndarray, mults: list) -> list:
        return [_phys(c * m, big) for m in mults]

    def deriv(i: int, ax: int) -> np.ndarray:
        return v_d.coeffs[i] * g.axis_profile(ax, 1j * g.frequencies(ax))

    b_blocks = [blocks(v_1.coeffs[i], rho_j) for i in range(2)]
    b_pref = [_prefix(b) for b in b_blocks]

    j1 = j2 = j3 = 0.0
    h_slots = list(enumerate(g.horizontal_axes)) if mode == "3d" else [(0, 0)]
    for slot, ax in h_slots:
        a_blocks = blocks(v_d.coeffs[slot], rho_j)
        a_pref = _prefix(a_blocks)
        for i in range(2):
            c_blocks = blocks(deriv(i, ax), fatrho_j)
            s1, s2, s3 = _family_sums(a_blocks, a_pref, b_blocks[i], b_pref[i], c_blocks)
            j1 += s1
            j2 += s2
            j3 += s3

    j4 = j5 = j6 = 0.0
    w_blocks = blocks(w_d.coeffs[0], rho_j)
    w_pref = _prefix(w_blocks)
    for i in range(2):
        c_blocks = blocks(deriv(i, zax), fatrho_j)
        s4, s5, s6 = _family_sums(w_blocks, w_pref, b_blocks[i], b_pref[i], c_blocks)
        j4 += s4
        j5 += s5
        j6 += s6

    direct_h, direct_z = direct_flux(v_d, v_1, mode)
    J = tuple(cell * s for s in (j1, j2, j3, j4, j5, j6))
    return FluxBreakdown(J=J, direct_H=direct_h, direct_z=direct_z,
                         j_range=tuple(jr), mode=mode)


# ---------------------------------------------------------------------------
# Mollification commutators (two-parameter smoothing identity).
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class CommutatorTerms:
    """The eight commutator pieces at cutoff level N, as physical fields
    on the 2x quadrature grid, plus the exact commutators they sum to."""

    N: int
    mode: str
    p: float
    grid: TorusGrid
    I: tuple
    commutator_vv: PhysicalField
    commutator_wv: PhysicalField
    norms: dict
    residual_vv: float
    residual_wv: float


def _pair_products(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """All componentwise products f_a * g_b, flattened a-major."""
    return (f[:, None, ...] * g[None, ...]).reshape(
        f.shape[0] * g.shape[0], *f.shape[1:]
    )


def _l1_norm(vals: np.ndarray, g: TorusGrid) -> float:
    mag = np.sqrt(np.sum(vals * vals, axis=0))
    return float(np.sum(mag) * g.cell_volume)


def _mixed_norm(vals: np.ndarray, g: TorusGrid, q: float, outer: str) -> float:
    """L^q norm along z inside, then L^1 or sup over the horizontal slab."""
    mag = np.sqrt(np.sum(vals * vals, axis=0))
    dz = 2.0 * np.pi * g.lambdas[g.vertical_axis] / mag.shape[-1]
    if math.isinf(q):
        z_norm = np.max(mag, axis=-1)
    else:
        z_norm = (np.sum(mag**q, axis=-1) * dz) ** (1.0 / q)
    if outer == "sup":
        return float(np.max(z_norm))
    d_area = 1.0
    for ax in range(g.n_dims - 1):
        d_area *= 2.0 * np.pi * g.lambdas[ax] / mag.shape[ax]
    return float(np.sum(z_norm) * d_area)


def max_level(grid: TorusGrid) -> int:
    """Largest cutoff level whose smoothing still acts inside the resolved
    band of the grid."""
    kmax = max((n // 2) / lam for n, lam in zip(grid.sizes, grid.lambdas))
    return int(math.floor(math.log2(kmax)))


def mollified_commutators(v, N: int, mode: str | None = None, p: float = 4.0) -> CommutatorTerms:
    """Evaluate the eight two-parameter smoothing commutator terms at
    cutoff level N.

    The vertical smoothing S and horizontal smoothing T are the unit-mass
    low-pass profiles at level N.  The first four terms decompose
    TS(v x v) - TSv x TSv and the last four TS(w v) - TSw TSv; both
    identities are algebraically exact on the padded grid.
    """
    v = _as_field(v)
    g = v.grid
    mode = _mode_of(g, mode)
    if N < 0 or 2**N > max((n // 2) / lam for n, lam in zip(g.sizes, g.lambdas)):
        raise ValueError(
            f"cutoff level N={N} outside the representable range of the grid"
        )
    w = diagnose_w(v)
    g2 = refined_grid(g, 2)
    big = g2.sizes
    vb = pad_spectrum(v, 2)
    wb = pad_spectrum(w, 2)

    def smooth(vals: np.ndarray, which: str) -> np.ndarray:
        f = SpectralField(g2, coeffs_from_values(vals, big))
        if "S" in which:
            f = mollify_lowpass(f, N, axes=g2.vertical_axis, keep_mean=True)
        if "T" in which:
            f = mollify_lowpass(f, N, axes=g2.horizontal_axes, keep_mean=True)
        return values_from_coeffs(f.coeffs, big)

    V = values_from_coeffs(vb.coeffs, big)
    W = values_from_coeffs(wb.coeffs, big)
    SV, SW = smooth(V, "S"), smooth(W, "S")
    TSV, TSW = smooth(SV, "T"), smooth(SW, "T")

    def four_terms(F, SF, TSF, G, SG, TSG):
        prod = _pair_products
        base = prod(F, G)
        smoothed_base = smooth(base, "S")
        i1 = smooth(smoothed_base - prod(SF, G) - prod(F, SG) + base, "T")
        i2 = -smooth(prod(SF - F, SG - G), "T")
        s_pair = prod(SF, SG)
        i3 = smooth(s_pair, "T") - prod(TSF, SG) - prod(SF, TSG) + s_pair
        i4 = -prod(TSF - SF, TSG - SG)
        comm = smooth(smoothed_base, "T") - prod(TSF, TSG)
        return (i1, i2, i3, i4), comm

    f_slice = slice(None) if mode == "3d" else slice(0, 1)
    terms_vv, comm_vv = four_terms(V[f_slice], SV[f_slice], TSV[f_slice], V, SV, TSV)
    terms_wv, comm_wv = four_terms(W, SW, TSW, V, SV, TSV)

    def rel_residual(parts, comm):
        gap = parts[0] + parts[1] + parts[2] + parts[3] - comm
        return float(np.max(np.abs(gap)) / (np.max(np.abs(comm)) + EPS))

    p_dual = p / (p - 1.0) if p > 1.0 else math.inf
    norms = {}
    for m, vals in enumerate(terms_vv, start=1):
        norms[f"I{m}"] = _l1_norm(vals, g2)
    norms["I5"] = _mixed_norm(terms_wv[0], g2, p_dual, "int")
    norms["I6"] = _mixed_norm(terms_wv[1], g2, p_dual, "int")
    norms["I7"] = _mixed_norm(terms_wv[2], g2, 2.0, "int")
    norms["I8"] = _mixed_norm(terms_wv[3], g2, 2.0, "int")

    fields = tuple(
        PhysicalField(g2, vals) for vals in (*terms_vv, *terms_wv)
    )
    return CommutatorTerms(
        N=N,
        mode=mode,
        p=p,
        grid=g2,
        I=fields,
        commutator_vv=PhysicalField(g2, comm_vv),
        commutator_wv=PhysicalField(g2, comm_wv),
        norms=norms,
        residual_vv=rel_residual(terms_vv, comm_vv),
        residual_wv=rel_residual(terms_wv, comm_wv),
    )


# ---------------------------------------------------------------------------
# Decay/growth rate study over a range of cutoff levels.
# ---------------------------------------------------------------------------


GROWTH_KEYS = ("grad_H_sup", "dz_LinfH_Lp", "dz_LinfH_L2")


@dataclass(eq=False)
class DecayStudy:
    """Commutator norms, smoothed-field growth norms, and their fitted
    log2 slopes across cutoff levels."""

    N_values: tuple[int, ...]
    norms: dict
    growth: dict
    pairing_vv: np.ndarray
    pairing_wv: np.ndarray
    residuals: dict
    slopes: dict
    reference_slopes: dict
    p: float
    gamma: float
    mode: str


def _ols_slope(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    xc = x - x.mean()
    yc = y - y.mean()
    return float(np.dot(xc, yc) / np.dot(xc, xc))


def decay_study(
    v,
    N_list,
    p: float = 4.0,
    gamma: float = 4.0,
    mode: str | None = None,
) -> DecayStudy:
    """Tabulate commutator-term norms against the cutoff level and fit
    least-squares slopes of log2(norm) vs N.

    Also tracks the growth of the smoothed field's horizontal gradient
    (sup norm) and vertical shear (mixed norms), whose fitted slopes are
    bounded by the dual exponents of the commutator decay rates.
    """
    v = _as_field(v)
    g = v.grid
    mode = _mode_of(g, mode)
    N_values = tuple(int(n) for n in N_list)
    if len(N_values) < 4:
        raise ValueError("need at least 4 cutoff levels for a slope fit")
    if any(b <= a for a, b in zip(N_values, N_values[1:])):
        raise ValueError("cutoff levels must be strictly ascending")

    norm_keys = [f"I{m}" for m in range(1, 9)]
    norms = {k: [] for k in norm_keys}
    growth = {k: [] for k in GROWTH_KEYS}
    pairing_vv, pairing_wv = [], []
    residuals = {"vv": [], "wv": []}

    for N in N_values:
        terms = mollified_commutators(v, N, mode, p)
        g2 = terms.grid
        big = g2.sizes
        cell = g2.cell_volume
        for k in norm_keys:
            norms[k].append(terms.norms[k])
        residuals["vv"].append(terms.residual_vv)
        residuals["wv"].append(terms.residual_wv)

        u = mollify_lowpass(
            mollify_lowpass(pad_spectrum(v, 2), N, axes=g2.vertical_axis, keep_mean=True),
            N,
            axes=g2.horizontal_axes,
            keep_mean=True,
        )

        def d_vals(i: int, ax: int) -> np.ndarray:
            mult = g2.axis_profile(ax, 1j * g2.frequencies(ax))
            return values_from_coeffs(u.coeffs[i] * mult, big)

        h_axes = g2.horizontal_axes
        zax = g2.vertical_axis
        grads = np.stack([d_vals(i, ax) for ax in h_axes for i in range(2)])
        growth["grad_H_sup"].append(float(np.max(np.sqrt(np.sum(grads**2, axis=0)))))
        dzu = np.stack([d_vals(i, zax) for i in range(2)])
        growth["dz_LinfH_Lp"].append(_mixed_norm(dzu, g2, p, "sup"))
        growth["dz_LinfH_L2"].append(_mixed_norm(dzu, g2, 2.0, "sup"))

        sum_vv = sum(f.values for f in terms.I[:4])
        sum_wv = sum(f.values for f in terms.I[4:])
        if mode == "3d":
            pair_v = sum(
                _dot(sum_vv[slot * 2 + i], grads[slot * 2 + i])
                for slot in range(2)
                for i in range(2)
            )
        else:
            pair_v = sum(_dot(sum_vv[i], grads[i]) for i in range(2))
        pairing_vv.append(cell * pair_v)
        pairing_wv.append(cell * sum(_dot(sum_wv[i], dzu[i]) for i in range(2)))

    x = np.asarray(N_values, dtype=float)
    slopes = {}
    for k in norm_keys:
        slopes[k] = _ols_slope(x, np.log2(np.maximum(norms[k], EPS)))
    for k in GROWTH_KEYS:
        slopes[k] = _ols_slope(x, np.log2(np.maximum(growth[k], EPS)))

    reference = {
        "I1": -(1.0 + 2.0 / p), "I2": -(1.0 + 2.0 / p),
        "I3": -(1.0 + 2.0 / p), "I4": -(1.0 + 2.0 / p),
        "I5": -(1.0 + 1.0 / p), "I6": -(1.0 + 1.0 / p),
        "I7": -(1.0 - 2.0 / gamma), "I8": -(1.0 - 2.0 / gamma),
        "grad_H_sup": 1.0 + 2.0 / p,
        "dz_LinfH_Lp": 1.0 + 1.0 / p,
        "dz_LinfH_L2": 1.0 - 2.0 / gamma,
    }

    return DecayStudy(
        N_values=N_values,
        norms={k: np.asarray(a) for k, a in norms.items()},
        growth={k: np.asarray(a) for k, a in growth.items()},
        pairing_vv=np.asarray(pairing_vv),
        pairing_wv=np.asarray(pairing_wv),
        residuals={k: np.asarray(a) for k, a in residuals.items()},
        slopes=slopes,
        reference_slopes=reference,
        p=p,
        gamma=gamma,
        mode=mode,
    )


# ---------------------------------------------------------------------------
# Energy balance residual and the uniqueness envelope.
# ---------------------------------------------------------------------------


def _cumtrapz(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    if len(y) < 2:
        return np.zeros_like(y)
    inc = 0.5 * (y[1:] + y[:-1]) * np.diff(t)
    return np.concatenate([[0.0], np.cumsum(inc)])


def energy_residual(series: RunSeries) -> np.ndarray:
    """Pointwise defect of the energy balance along a recorded run:
    energy(t) + nu * integral of dissipation - energy(0).

    The dissipation trace carries per-step midpoint values, so the
    integral is their step-weighted sum (the midpoint rule); for a
    diffusion-only run the defect is pure roundoff."""
    if len(series.times) == 0:
        raise ValueError("empty run series")
    inc = np.diff(series.times) * series.dissipation[1:]
    integral = np.concatenate([[0.0], np.cumsum(inc)])
    return series.energy + series.nu * integral - series.energy[0]


@dataclass(eq=False)
class GronwallReport:
    """Squared separation of two trajectories against the fitted
    exponential envelope driven by the base run's scaling norms."""

    times: np.ndarray
    lhs: np.ndarray
    envelope: np.ndarray
    C: float
    A: np.ndarray
    integrand: np.ndarray
    lhs0: float
    v0_norm: float
    terminal_ratio: float
    envelope_ok: bool
    variant: str
    delta: float
    exponents: SerrinExponents


VARIANTS = ("identical", "dealias", "dt-half")


def uniqueness_experiment(
    config: SolverConfig,
    v0,
    delta: float = 0.0,
    variant: str = "identical",
    p: float = 4.0,
    gamma: float = 4.0,
    seed: int = 2024,
) -> GronwallReport:
    """Run two lockstep trajectories and fit the smallest exponential
    envelope dominating their squared separation.

    The second run differs by the chosen solver variant (dealias mode
    flip or halved dt) and, when delta is nonzero, by a seeded random
    perturbation of relative size delta added to the initial state.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    exponents = validate_exponents(serrin_beta(p), p, gamma)
    v0 = project_H(_as_field(v0))
    g = config.grid
    if v0.grid != g:
        raise ValueError("initial state grid does not match config grid")

    import dataclasses

    from .fields import random_state

    if variant == "dealias":
        flipped = "2/3-rule" if config.dealias == "3/2-rule" else "3/2-rule"
        config2 = dataclasses.replace(config, dealias=flipped)
        substeps = 1
    elif variant == "dt-half":
        config2 = dataclasses.replace(config, dt=config.dt / 2.0)
        substeps = 2
    else:
        config2 = config
        substeps = 1

    v0_norm = v0.l2_norm()
    v0b = v0
    if delta != 0.0:
        noise = random_state(g, seed=seed, amplitude=v0_norm if v0_norm > 0 else 1.0)
        v0b = v0.with_coeffs(v0.coeffs + delta * noise.coeffs)

    s1 = Solver(config, v0)
    s2 = Solver(config2, v0b)
    n_steps = int(round(config.t_end / config.dt))
    spec_lo = BesovSpec(s=-1.0 / p, p=p, q=math.inf, axis="z", inner=besov.INNER_LINF_H)
    spec_hi = BesovSpec(s=2.0 / gamma, p=2.0, q=2.0, axis="z", inner=besov.INNER_LINF_H)

    times, lhs, integrand = [], [], []

    def record():
        dc = s1.state.coeffs - s2.state.coeffs
        sep = float(g.volume * np.sum(np.abs(dc) ** 2))
        if not np.isfinite(sep):
            raise BlowupError(s1.t, None)
        times.append(s1.t)
        lhs.append(sep)
        integrand.append(
            besov.besov_norm(s1.state, spec_lo) ** exponents.beta
            + besov.besov_norm(s1.state, spec_hi) ** gamma
        )

    record()
    for idx in range(1, n_steps + 1):
        s1.step()
        for _ in range(substeps):
            s2.step()
        if idx % config.snapshot_stride == 0 or idx == n_steps:
            record()

    times_a = np.asarray(times)
    lhs_a = np.asarray(lhs)
    A = _cumtrapz(np.asarray(integrand), times_a)
    lhs0 = lhs_a[0]
    if lhs0 > 0.0:
        valid = (A > 0.0) & (lhs_a > 0.0)
        C = 0.0
        if np.any(valid):
            C = max(0.0, float(np.max(np.log(lhs_a[valid] / lhs0) / A[valid])))
        envelope = lhs0 * np.exp(C * A)
        ok = bool(np.all(lhs_a <= envelope * (1.0 + 1e-9) + EPS))
    else:
        C = 0.0
        envelope = np.zeros_like(lhs_a)
        ok = bool(np.all(lhs_a == 0.0))

    terminal = math.sqrt(max(lhs_a[-1], 0.0))
    ratio = terminal / v0_norm if v0_norm > 0 else terminal
    return GronwallReport(
        times=times_a,
        lhs=lhs_a,
        envelope=envelope,
        C=C,
        A=A,
        integrand=np.asarray(integrand),
        lhs0=float(lhs0),
        v0_norm=v0_norm,
        terminal_ratio=ratio,
        envelope_ok=ok,
        variant=variant,
        delta=delta,
        exponents=exponents,
    )
