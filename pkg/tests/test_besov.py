"""Mixed dyadic norms: pinned values, scaling, embeddings, exponent rules."""

import math

import numpy as np
import pytest

from pespec import besov
from pespec.besov import (
    INNER_L2_H,
    INNER_LINF_H,
    INNER_NONE,
    BesovSpec,
    besov_norm,
    frac_derivative,
    parse_spec,
    rescale_dyadic,
    serrin_beta,
    sobolev_embed_check,
    validate_exponents,
)
from pespec.lp import block_range, dyadic_block
from pespec.rng import random_field
from pespec.torus import (
    derivative,
    field_from_values,
    forward_transform,
    grid_1d,
    grid_2d,
    grid_3d,
    inverse_transform,
    project_mean_zero,
    quadrature_norm,
)

SQRT_PI = math.sqrt(math.pi)


def cos_z_field(grid, mult=1):
    coords = grid.meshgrid()
    z = coords[grid.vertical_axis] / grid.lambdas[grid.vertical_axis]
    vals = np.cos(mult * z) * np.ones([s for s in grid.sizes])
    return forward_transform(field_from_values(grid, vals))


def mean_free_random(grid, seed, k_max=None):
    u = random_field(grid, 2, seed, k_max=k_max)
    return project_mean_zero(u, grid.vertical_axis)


# ---------------------------------------------------------------------------
# Pinned norm values on single-mode fields.
# ---------------------------------------------------------------------------


def test_cos_z_mixed_norm_is_sqrt_pi():
    g = grid_3d(8, 8, 16)
    u = cos_z_field(g)
    spec = BesovSpec(s=-0.5, p=2.0, q=math.inf, axis="z", inner=INNER_LINF_H)
    assert besov_norm(u, spec) == pytest.approx(SQRT_PI, rel=1e-12)


@pytest.mark.parametrize("s", [-0.7, 0.0, 0.3])
def test_cos_4z_weight_tracks_block_index(s):
    g = grid_1d(64)
    u = cos_z_field(g, mult=4)  # lives in the j = 2 block alone
    spec = BesovSpec(s=s, p=2.0, q=math.inf, axis=0, inner=INNER_NONE)
    assert besov_norm(u, spec) == pytest.approx(2.0 ** (2 * s) * SQRT_PI, rel=1e-12)


def test_zero_field_has_zero_norm():
    g = grid_1d(16)
    u = cos_z_field(g).with_coeffs(np.zeros((1, 16), dtype=np.complex128))
    assert besov_norm(u, BesovSpec(s=0.5, p=2.0, q=2.0, axis=0)) == 0.0


def test_inner_order_agrees_on_separable_fields():
    g = grid_2d(16, 16)
    u = cos_z_field(g)
    for inner in (INNER_LINF_H, INNER_L2_H):
        a = besov_norm(u, BesovSpec(0.25, 2.0, math.inf, "z", inner))
        b = besov_norm(u, BesovSpec(0.25, 2.0, math.inf, "z", inner, swap_order=True))
        assert a == pytest.approx(b, rel=1e-12)


# ---------------------------------------------------------------------------
# Fractional derivative.
# ---------------------------------------------------------------------------


def test_frac_derivative_on_single_modes():
    g = grid_1d(32)
    u1 = cos_z_field(g, mult=1)
    np.testing.assert_allclose(
        frac_derivative(u1, 1.0, 0).coeffs, u1.coeffs, atol=1e-15
    )
    c = np.zeros((1, 32), dtype=np.complex128)
    c[0, 2] = c[0, -2] = 0.5  # exactly cos(2z)
    u2 = u1.with_coeffs(c)
    np.testing.assert_array_equal(
        frac_derivative(u2, 2.0, 0).coeffs, 4.0 * u2.coeffs
    )


def test_frac_derivative_roundtrip_on_mean_free_fields():
    g = grid_2d(16, 16, lam=(2.0, 1.0))
    u = mean_free_random(g, seed=3)
    back = frac_derivative(frac_derivative(u, -1.0, "z"), 1.0, "z")
    np.testing.assert_allclose(back.coeffs, u.coeffs, atol=1e-12)


def test_frac_derivative_matches_true_derivative_norm():
    g = grid_1d(32)
    u = project_mean_zero(random_field(g, 1, seed=5, k_max=15), 0)
    lhs = frac_derivative(u, 1.0, 0).l2_norm()
    rhs = derivative(u, 0).l2_norm()
    assert lhs == pytest.approx(rhs, rel=1e-13)


# ---------------------------------------------------------------------------
# Exponent validation.
# ---------------------------------------------------------------------------


def test_validate_exponents_accepts_valid_triples():
    e = validate_exponents(4.0, 4.0, 3.0)
    assert (e.beta, e.p, e.gamma) == (4.0, 4.0, 3.0)
    validate_exponents(3.0, 6.0, 4.0)


@pytest.mark.parametrize(
    "triple",
    [
        (2.0, 2.0, 3.0),   # p at the endpoint
        (4.0, 5.0, 3.0),   # scaling relation broken
        (math.inf, 2.0, 3.0),
        (4.0, 4.0, 2.0),   # gamma at the endpoint
    ],
)
def test_validate_exponents_rejects(triple):
    with pytest.raises(ValueError):
        validate_exponents(*triple)


def test_serrin_beta_inverts_the_relation():
    for p in (3.0, 4.0, 6.0, 10.0):
        validate_exponents(serrin_beta(p), p, 3.0)
    assert serrin_beta(4.0) == pytest.approx(4.0)
    assert serrin_beta(6.0) == pytest.approx(3.0)


# ---------------------------------------------------------------------------
# Dyadic rescaling.
# ---------------------------------------------------------------------------


def test_rescale_zero_steps_is_identity():
    g = grid_2d(16, 16)
    u = mean_free_random(g, seed=9)
    v = rescale_dyadic(u, 0)
    assert v.grid == g
    np.testing.assert_array_equal(v.coeffs, u.coeffs)


def test_rescale_cos_z_once():
    g = grid_1d(32)
    u = cos_z_field(g)
    v = rescale_dyadic(u, 1)
    assert v.grid.lambdas == (0.5,)
    z_new = v.grid.coordinates(0)
    np.testing.assert_allclose(
        inverse_transform(v).values[0], 2.0 * np.cos(2.0 * z_new), atol=1e-13
    )


def test_rescale_norm_factor_in_the_scaling_space():
    g = grid_2d(32, 32)
    spec = BesovSpec(s=-0.25, p=4.0, q=math.inf, axis="z", inner=INNER_LINF_H)
    for seed in range(10):
        u = mean_free_random(g, seed=seed)
        ratio = besov_norm(rescale_dyadic(u, 1), spec) / besov_norm(u, spec)
        assert abs(ratio - math.sqrt(2.0)) <= 1e-10


# ---------------------------------------------------------------------------
# Embedding ratio.
# ---------------------------------------------------------------------------


def test_embed_ratio_for_cos_z():
    g = grid_1d(32)
    u = cos_z_field(g)
    r = sobolev_embed_check(u, 0.5, 2.0, 0.0, math.inf, q=math.inf, axis=0)
    assert r == pytest.approx(1.0 / SQRT_PI, rel=1e-12)


def test_embed_rejects_mismatched_indices_and_zero_fields():
    g = grid_1d(16)
    u = cos_z_field(g)
    with pytest.raises(ValueError):
        sobolev_embed_check(u, 0.5, 2.0, 0.1, math.inf, q=2.0, axis=0)
    zero = u.with_coeffs(np.zeros_like(u.coeffs))
    with pytest.raises(ValueError):
        sobolev_embed_check(zero, 0.5, 2.0, 0.0, math.inf, q=2.0, axis=0)


# ---------------------------------------------------------------------------
# Lattice monotonicity and the two-sided l2 equivalence.
# ---------------------------------------------------------------------------


def test_norm_decreases_in_q():
    g = grid_2d(16, 32)
    for seed in range(5):
        u = mean_free_random(g, seed=seed)
        norms = [
            besov_norm(u, BesovSpec(0.3, 2.0, q, "z", INNER_NONE))
            for q in (1.0, 2.0, math.inf)
        ]
        assert norms[0] >= norms[1] - 1e-12
        assert norms[1] >= norms[2] - 1e-12


def test_l2_equivalence_two_sided():
    g = grid_2d(16, 64)
    spec0 = BesovSpec(0.0, 2.0, 2.0, "z", INNER_NONE)
    spec1 = BesovSpec(1.0, 2.0, 2.0, "z", INNER_NONE)
    for seed in range(25):
        u = mean_free_random(g, seed=seed)
        total = u.l2_norm() ** 2
        b0 = besov_norm(u, spec0) ** 2
        assert 0.5 * total - 1e-12 <= b0 <= total + 1e-12
        dz2 = derivative(u, "z").l2_norm() ** 2
        b1 = besov_norm(u, spec1) ** 2
        assert dz2 / 8.0 - 1e-12 <= b1 <= 4.0 * dz2 + 1e-12


# ---------------------------------------------------------------------------
# Bernstein inequalities on blocks.
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("s", [-1.0, -0.5, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("p", [1.0, 2.0, 4.0, math.inf])
def test_bernstein_on_blocks(s, p):
    g = grid_1d(128)
    C = 2.0 ** (abs(s) + 1.0)
    for seed in range(3):
        u = project_mean_zero(random_field(g, 1, seed=seed, k_max=63), 0)
        for j in block_range(g, 0):
            b = dyadic_block(u, j, 0)
            if not np.any(b.coeffs):
                continue
            base = quadrature_norm(inverse_transform(b), p)
            shifted = quadrature_norm(inverse_transform(frac_derivative(b, s, 0)), p)
            assert shifted <= C * 2.0 ** (s * j) * base + 1e-13


# ---------------------------------------------------------------------------
# Spec parsing and naming.
# ---------------------------------------------------------------------------


def test_parse_spec_full_and_minimal():
    s = parse_spec("s=-0.25,p=4,q=inf,axis=z,inner=LinfH")
    assert s == BesovSpec(-0.25, 4.0, math.inf, "z", INNER_LINF_H)
    assert s.column_name() == "B-0.25_4_inf_z_LinfH"
    t = parse_spec("s=0.5, p=2, q=2")
    assert t.axis == "z" and t.inner == INNER_NONE
    u = parse_spec("s=1,p=2,q=2,axis=0,order=inner-last")
    assert u.axis == 0 and u.swap_order


@pytest.mark.parametrize(
    "text",
    ["p=4,q=2", "s=1,p=4,q=2,foo=1", "s=1;p=4", "s=1,p=0.5,q=2"],
)
def test_parse_spec_rejects(text):
    with pytest.raises((ValueError, KeyError)):
        parse_spec(text)


def test_spec_validation():
    with pytest.raises(ValueError):
        BesovSpec(0.0, 0.9, 2.0)
    with pytest.raises(ValueError):
        BesovSpec(0.0, 2.0, 2.0, inner="L3H")
