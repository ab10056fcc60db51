"""Fast deterministic self-checks across the library.

Each check exercises one exact identity or contract at a small grid size
and reports a measured defect against a fixed bound.  The whole battery
is meant to run in well under half a minute; it backs the ``pe proptest``
subcommand and doubles as a smoke test after installation.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from . import analysis, besov, fields, lp, rng, solver
from .hydrostatic import check_in_H, diagnose_w, horizontal_divergence, project_H
from .torus import (
    SpectralField,
    derivative,
    grid_2d,
    grid_3d,
    inverse_transform,
    load_tbsf,
    pad_spectrum,
    quadrature_norm,
    save_tbsf,
    truncate_spectrum,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    bound: float

    def line(self) -> str:
        status = "ok  " if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.measured:.3e} (bound {self.bound:.1e})"


def _result(name: str, measured: float, bound: float) -> CheckResult:
    return CheckResult(name, bool(measured <= bound), float(measured), float(bound))


def _random_h(grid, seed, mean_free=False):
    return fields.random_state(grid, seed=seed, amplitude=1.0, mean_free_z=mean_free)


def check_partition() -> CheckResult:
    dev = 0.0
    for lam in (1.0, 2.0, 0.5):
        g = grid_2d(64, 64, (lam, lam))
        dev = max(dev, lp.verify_partition(g, 0), lp.verify_partition(g, "z"))
    return _result("dyadic partition of unity", dev, 1e-12)


def check_roundtrip() -> CheckResult:
    g = grid_3d(16, 16, 16)
    u = rng.random_field(g, components=2, seed=5)
    v = pad_spectrum(u, 2)
    back = truncate_spectrum(v, g)
    err = np.max(np.abs(back.coeffs - u.coeffs))
    f = inverse_transform(u)
    from .torus import forward_transform

    err = max(err, np.max(np.abs(forward_transform(f).coeffs - u.coeffs)))
    return _result("transform and pad/truncate roundtrip", err, 1e-12)


def check_plancherel() -> CheckResult:
    g = grid_2d(64, 32)
    u = rng.random_field(g, components=2, seed=9)
    a = u.l2_norm()
    b = quadrature_norm(inverse_transform(u), 2)
    return _result("Plancherel vs quadrature", abs(a - b) / a, 1e-12)


def check_projection() -> CheckResult:
    g = grid_3d(16, 16, 16)
    u = rng.random_field(g, components=2, seed=11)
    pu = project_H(u)
    err = np.max(np.abs(project_H(pu).coeffs - pu.coeffs))
    v = rng.random_field(g, components=2, seed=12)
    lhs = np.sum(project_H(u).coeffs * np.conj(v.coeffs)).real
    rhs = np.sum(u.coeffs * np.conj(project_H(v).coeffs)).real
    scale = u.l2_norm() * v.l2_norm() / g.volume + 1e-300
    err = max(err, abs(lhs - rhs) / scale)
    report = check_in_H(pu)
    err = max(err, report.parity_residual, report.divergence_residual)
    return _result("hydrostatic projection idempotent/self-adjoint", err, 1e-11)


def check_divergence_free() -> CheckResult:
    g = grid_3d(16, 16, 16)
    v = _random_h(g, seed=21)
    w = diagnose_w(v)
    resid = derivative(w, "z").coeffs[0] + horizontal_divergence(v).coeffs[0]
    scale = np.max(np.abs(v.coeffs)) + 1e-300
    return _result("diagnosed w closes the divergence", np.max(np.abs(resid)) / scale, 1e-12)


def check_rescale() -> CheckResult:
    g = grid_2d(64, 64)
    u = rng.random_field(g, components=2, seed=33)
    u = u.with_coeffs(u.coeffs - u.coeffs.mean())
    from .torus import project_mean_zero

    u = project_mean_zero(u, "z")
    spec = besov.BesovSpec(s=-0.25, p=4.0, q=math.inf, axis="z",
                           inner=besov.INNER_LINF_H)
    ratio = besov.besov_norm(besov.rescale_dyadic(u, 1), spec) / besov.besov_norm(u, spec)
    return _result("dyadic rescaling norm factor", abs(ratio - math.sqrt(2.0)), 1e-10)


def check_commutator_identity() -> CheckResult:
    g = grid_3d(16, 16, 16)
    v = _random_h(g, seed=44)
    terms = analysis.mollified_commutators(v, N=3)
    return _result(
        "two-parameter commutator identity",
        max(terms.residual_vv, terms.residual_wv),
        1e-10,
    )


def check_flux_identity() -> CheckResult:
    g = grid_3d(16, 16, 16)
    v_d = _random_h(g, seed=55, mean_free=True)
    v_1 = _random_h(g, seed=56, mean_free=True)
    fb = analysis.flux_decompose(v_d, v_1)
    return _result("six-term flux decomposition", fb.mismatch, 1e-9)


def check_skew_symmetry() -> CheckResult:
    g = grid_2d(32, 32)
    v = fields.smooth_2d(g)
    rhs = solver.nonlinear_rhs(v)
    pairing = float(g.volume * np.sum(rhs.coeffs * np.conj(v.coeffs)).real)
    scale = v.l2_norm() ** 2 + 1e-300
    return _result("advective flux skew-symmetry", abs(pairing) / scale, 1e-11)


def check_heat_decay() -> CheckResult:
    g = grid_2d(32, 32)
    v0 = fields.cosx_cosz(g)
    cfg = solver.SolverConfig(grid=g, dt=1e-3, t_end=0.1, advection=False,
                              snapshot_stride=100)
    series = solver.simulate(cfg, v0)
    expected = math.exp(-4.0 * 0.1) * series.energy[0]
    return _result(
        "diffusion-only energy decay",
        abs(series.energy[-1] - expected) / expected,
        1e-5,
    )


def check_rng_consistency() -> CheckResult:
    seq = rng.SplitMix64(777)
    first = np.array([seq.uniform() for _ in range(64)])
    vec = rng.uniform_array(777, 64)
    return _result("seeded generator vectorization", float(np.max(np.abs(first - vec))), 0.0)


def check_tbsf_roundtrip() -> CheckResult:
    g = grid_2d(16, 16, (2.0, 0.5))
    u = rng.random_field(g, components=2, seed=66)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "u.tbsf")
        save_tbsf(path, u)
        back = load_tbsf(path)
    same = (
        back.grid == u.grid
        and np.array_equal(back.coeffs, u.coeffs)
    )
    return _result("snapshot format roundtrip", 0.0 if same else 1.0, 0.0)


ALL_CHECKS = (
    check_partition,
    check_roundtrip,
    check_plancherel,
    check_projection,
    check_divergence_free,
    check_rescale,
    check_commutator_identity,
    check_flux_identity,
    check_skew_symmetry,
    check_heat_decay,
    check_rng_consistency,
    check_tbsf_roundtrip,
)


def run_all(out=None) -> list[CheckResult]:
    results = []
    for check in ALL_CHECKS:
        res = check()
        results.append(res)
        if out is not None:
            print(res.line(), file=out)
    return results
