"""Pseudo-spectral IMEX time integration of the hydrostatic model.

The scheme is Crank-Nicolson for the (unit by default) Laplacian, which is
diagonal in Fourier space and treated exactly, and Adams-Bashforth 2 for
the advective term, bootstrapped by one explicit Euler substep.  The
advective velocity is (v, w) with w diagnosed from v, and the product is
dealiased either by 3/2-rule zero padding (exact retained products, the
default) or by 2/3-rule truncation (the solver variant used in the
uniqueness experiment).

States are re-projected onto the hydrostatic space after every step, so
roundoff cannot accumulate in the constraints.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import besov
from .hydrostatic import HydrostaticState, diagnose_w, project_H
from .torus import (
    SpectralField,
    TorusGrid,
    coeffs_from_values,
    pad_coeffs,
    save_tbsf,
    truncate_coeffs,
    values_from_coeffs,
)

PAD_32 = "3/2-rule"
TRUNC_23 = "2/3-rule"
_DEALIAS_ALIASES = {
    "off": PAD_32,
    "pad": PAD_32,
    PAD_32: PAD_32,
    "on": TRUNC_23,
    "truncate": TRUNC_23,
    TRUNC_23: TRUNC_23,
}


class BlowupError(RuntimeError):
    """Raised when the state stops being finite; carries the partial series."""

    def __init__(self, time: float, series: "RunSeries"):
        super().__init__(f"solution blew up (non-finite energy) at t = {time:g}")
        self.time = time
        self.series = series


@dataclass
class SolverConfig:
    grid: TorusGrid
    dt: float
    t_end: float
    nu: float = 1.0
    dealias: str = PAD_32
    scheme: str = "cn-ab2"
    snapshot_stride: int = 10
    record_specs: tuple[besov.BesovSpec, ...] = ()
    advection: bool = True  # False runs the bare heat flow (validation)

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end >= self.dt:
            raise ValueError("t_end must be at least one step")
        if self.dealias not in _DEALIAS_ALIASES:
            raise ValueError(f"unknown dealias mode {self.dealias!r}")
        self.dealias = _DEALIAS_ALIASES[self.dealias]
        if self.scheme != "cn-ab2":
            raise ValueError("only the cn-ab2 scheme is implemented")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")


@dataclass
class RunSeries:
    """Per-step energy/dissipation traces plus snapshot-cadence extras.

    dissipation[i] for i >= 1 is evaluated at step i's trapezoidal
    midpoint state, so the recorded energy balance closes to roundoff
    for the diffusive part; slot 0 holds the instantaneous value at
    t = 0 and does not enter the balance."""

    times: np.ndarray
    energy: np.ndarray
    dissipation: np.ndarray
    nu: float
    snapshot_times: np.ndarray
    snapshot_indices: np.ndarray
    snapshots: list
    snapshot_paths: list
    besov_traces: dict
    blowup: dict | None = None


def _laplacian_symbol(grid: TorusGrid) -> np.ndarray:
    lap = np.zeros(grid.sizes)
    for ax in range(grid.n_dims):
        f = grid.frequencies(ax)
        lap = lap + grid.axis_profile(ax, f * f)
    return lap


def energy_of(v: SpectralField) -> float:
    """0.5 * ||v||_L2^2 via Plancherel (exact for coefficient data)."""
    return float(0.5 * v.grid.volume * np.sum(np.abs(v.coeffs) ** 2))


def dissipation_of(v: SpectralField, lap: np.ndarray | None = None) -> float:
    """||grad v||_L2^2 via Plancherel."""
    if lap is None:
        lap = _laplacian_symbol(v.grid)
    return float(v.grid.volume * np.sum(lap * np.abs(v.coeffs) ** 2))


def _dealias_mask(grid: TorusGrid) -> np.ndarray:
    mask = np.ones(grid.sizes)
    for ax in range(grid.n_dims):
        keep = np.abs(grid.wavenumbers(ax)) <= grid.sizes[ax] // 3
        mask = mask * grid.axis_profile(ax, keep.astype(float))
    return mask


def nonlinear_rhs(v: SpectralField | HydrostaticState, dealias: str = PAD_32) -> SpectralField:
    """-(u . grad) v with u = (v, w), dealiased, projected back into the
    hydrostatic space.  Output is even in z for even states."""
    if isinstance(v, HydrostaticState):
        v = v.v
    dealias = _DEALIAS_ALIASES[dealias]
    g = v.grid
    zax = g.vertical_axis
    h_axes = g.horizontal_axes

    if dealias == TRUNC_23:
        work = SpectralField(g, v.coeffs * _dealias_mask(g))
        sizes = g.sizes
    else:
        work = v
        sizes = tuple(3 * s // 2 for s in g.sizes)

    w = diagnose_w(work)
    # advecting scalars paired with the axis they differentiate along
    advectors = [(work.coeffs[i], ax) for i, ax in enumerate(h_axes)]
    advectors.append((w.coeffs[0], zax))

    def phys(c: np.ndarray) -> np.ndarray:
        return values_from_coeffs(pad_coeffs(c, sizes), sizes)

    u_phys = [phys(c) for c, _ in advectors]
    adv_vals = []
    for i in range(2):
        total = np.zeros(sizes)
        for (c, ax), u_a in zip(advectors, u_phys):
            dmult = 1j * g.frequencies(ax)
            dc = work.coeffs[i] * g.axis_profile(ax, dmult)
            total += u_a * phys(dc)
        adv_vals.append(total)

    c_adv = coeffs_from_values(np.stack(adv_vals), sizes)
    c_adv = truncate_coeffs(c_adv, g.sizes)
    if dealias == TRUNC_23:
        c_adv = c_adv * _dealias_mask(g)
    return project_H(SpectralField(g, -c_adv))


class Solver:
    """CN-AB2 stepper holding the current state and the AB history."""

    def __init__(self, config: SolverConfig, v0: SpectralField):
        if v0.grid != config.grid:
            raise ValueError("initial state grid does not match config grid")
        self.config = config
        self.state = project_H(v0)
        self.t = 0.0
        self.step_index = 0
        self._lap = _laplacian_symbol(config.grid)
        self._prev_adv = None
        self.last_dissipation = dissipation_of(self.state, self._lap)

    def step(self) -> SpectralField:
        cfg = self.config
        dt = cfg.dt
        if cfg.advection:
            adv = nonlinear_rhs(self.state, cfg.dealias).coeffs
            if self._prev_adv is None:
                rhs = adv  # Euler bootstrap keeps global order 2
            else:
                rhs = 1.5 * adv - 0.5 * self._prev_adv
            self._prev_adv = adv
        else:
            rhs = 0.0
        z = cfg.nu * dt * self._lap
        old = self.state.coeffs
        new = (old * (1.0 - 0.5 * z) + dt * rhs) / (1.0 + 0.5 * z)
        # dissipation at the CN midpoint: the trapezoidal state for which
        # the discrete diffusive energy balance holds to roundoff
        mid = SpectralField(cfg.grid, 0.5 * (old + new))
        self.last_dissipation = dissipation_of(mid, self._lap)
        self.state = project_H(SpectralField(cfg.grid, new))
        self.t += dt
        self.step_index += 1
        return self.state


def _cfl_advisory(config: SolverConfig, v0: SpectralField) -> None:
    vals = values_from_coeffs(v0.coeffs, v0.grid.sizes)
    umax = float(np.max(np.sqrt(np.sum(vals * vals, axis=0))))
    dx = min(
        2.0 * np.pi * lam / n for lam, n in zip(v0.grid.lambdas, v0.grid.sizes)
    )
    if umax > 0 and config.dt > dx / umax:
        warnings.warn(
            f"advisory: dt = {config.dt:g} exceeds dx/|u|max = {dx / umax:g}",
            RuntimeWarning,
            stacklevel=3,
        )


def simulate(
    config: SolverConfig,
    v0: SpectralField,
    out_dir: str | None = None,
    tag: str = "run",
) -> RunSeries:
    """Run the configured trajectory, recording energy and dissipation every
    step and Besov norms plus TBSF snapshots at the snapshot cadence."""
    n_steps = int(round(config.t_end / config.dt))
    if abs(n_steps * config.dt - config.t_end) > 1e-9 * max(config.t_end, 1.0):
        warnings.warn(
            f"t_end {config.t_end:g} is not a multiple of dt; running "
            f"{n_steps} steps to t = {n_steps * config.dt:g}",
            RuntimeWarning,
        )
    _cfl_advisory(config, v0)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)

    solver = Solver(config, v0)
    lap = solver._lap
    times = [0.0]
    energies = [energy_of(solver.state)]
    dissipations = [dissipation_of(solver.state, lap)]
    snap_times, snap_indices, snapshots, snap_paths = [], [], [], []
    traces: dict[str, list] = {s.column_name(): [] for s in config.record_specs}

    def take_snapshot(idx: int):
        snap_times.append(solver.t)
        snap_indices.append(idx)
        snapshots.append(solver.state)
        for spec in config.record_specs:
            traces[spec.column_name()].append(besov.besov_norm(solver.state, spec))
        if out_dir is not None:
            path = os.path.join(out_dir, f"{tag}_{idx:06d}.tbsf")
            save_tbsf(path, solver.state)
            snap_paths.append(path)

    def make_series(blowup=None) -> RunSeries:
        return RunSeries(
            times=np.asarray(times),
            energy=np.asarray(energies),
            dissipation=np.asarray(dissipations),
            nu=config.nu,
            snapshot_times=np.asarray(snap_times),
            snapshot_indices=np.asarray(snap_indices, dtype=int),
            snapshots=snapshots,
            snapshot_paths=snap_paths,
            besov_traces={k: np.asarray(tr) for k, tr in traces.items()},
            blowup=blowup,
        )

    take_snapshot(0)
    for idx in range(1, n_steps + 1):
        solver.step()
        e = energy_of(solver.state)
        if not np.isfinite(e):
            series = make_series(
                blowup={"time": solver.t, "step": idx, "last_energy": energies[-1]}
            )
            raise BlowupError(solver.t, series)
        times.append(solver.t)
        energies.append(e)
        dissipations.append(solver.last_dissipation)
        if idx % config.snapshot_stride == 0 or idx == n_steps:
            take_snapshot(idx)
    return make_series()


# ---------------------------------------------------------------------------
# Flat key=value run configuration files.
# ---------------------------------------------------------------------------


@dataclass
class ParsedRun:
    config: SolverConfig
    init_name: str
    init_params: dict = field(default_factory=dict)


def _parse_kv(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        out[key] = val
    return out


def parse_config_text(text: str) -> ParsedRun:
    """Parse a flat key=value run configuration.

    Keys: grid.n (comma-separated sizes, vertical axis last), grid.lambda
    (one value or per-axis list), dt, t_end, nu, dealias, snapshot_stride,
    record (semicolon-separated norm specs), init plus init.* parameters.
    """
    kv = _parse_kv(text)
    from .torus import HORIZONTAL, VERTICAL

    if "grid.n" not in kv:
        raise ValueError("config is missing grid.n")
    sizes = tuple(int(x) for x in kv.pop("grid.n").split(","))
    lam_raw = kv.pop("grid.lambda", "1")
    lams = tuple(float(x) for x in lam_raw.split(","))
    if len(lams) == 1:
        lams = lams * len(sizes)
    roles = (HORIZONTAL,) * (len(sizes) - 1) + (VERTICAL,)
    grid = TorusGrid(sizes, lams, roles)

    record = ()
    if "record" in kv:
        record = tuple(
            besov.parse_spec(s) for s in kv.pop("record").split(";") if s.strip()
        )

    config = SolverConfig(
        grid=grid,
        dt=float(kv.pop("dt", "1e-3")),
        t_end=float(kv.pop("t_end", "1.0")),
        nu=float(kv.pop("nu", "1.0")),
        dealias=kv.pop("dealias", PAD_32),
        snapshot_stride=int(kv.pop("snapshot_stride", "10")),
        record_specs=record,
    )

    init_name = kv.pop("init", "smooth-2d")
    init_params = {}
    for key in list(kv):
        if key.startswith("init."):
            name = key.split(".", 1)[1]
            val = kv.pop(key)
            if name in ("seed", "k_max"):
                init_params[name] = int(val)
            else:
                init_params[name] = float(val)
    if kv:
        raise ValueError(f"unknown config keys: {sorted(kv)}")
    return ParsedRun(config, init_name, init_params)


def load_config(path: str) -> ParsedRun:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())
