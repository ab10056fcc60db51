"""Independent reference computations backing the test suite.

Nothing here shares a code path with the package: transforms are explicit
O(n^2) basis-matrix sums, integrals use midpoint quadrature on a 4x
refined lattice (different nodes than the package's collocation), the
random stream has a pure-python big-int reference, and the cross-model
check ships its own small 2d Navier-Stokes stepper built on raw numpy
ffts.
"""

from __future__ import annotations

import numpy as np


# ---------------------------------------------------------------------------
# Explicit discrete Fourier transforms.
# ---------------------------------------------------------------------------


def _fft_wavenumbers(n: int) -> np.ndarray:
    # fft layout: [0, 1, ..., n/2 - 1, -n/2, ..., -1]; the shared Nyquist
    # slot carries the negative sign, matching numpy's fftfreq
    k = np.arange(n)
    k[k >= (n + 1) // 2] -= n
    return k


def _grid_points(n: int, lam: float) -> np.ndarray:
    return -np.pi * lam + 2.0 * np.pi * lam * np.arange(n) / n


def dft_coeffs(values: np.ndarray, lambdas) -> np.ndarray:
    """Fourier coefficients of sampled values by explicit basis sums.

    values has shape (components, *sizes); coefficients come back in fft
    index order per axis, normalized so values = sum_k c_k exp(i k.x/lam).
    """
    sizes = values.shape[1:]
    out = values.astype(np.complex128)
    for ax, (n, lam) in enumerate(zip(sizes, lambdas)):
        k = _fft_wavenumbers(n)
        x = _grid_points(n, lam)
        # E[k_row, m_col] applied along spatial axis ax
        E = np.exp(-1j * np.outer(k, x) / lam) / n
        out = np.moveaxis(np.tensordot(E, out, axes=([1], [ax + 1])), 0, ax + 1)
    return out


def dft_values(coeffs: np.ndarray, lambdas) -> np.ndarray:
    """Real samples of sum_k c_k exp(i k.x/lam) on the collocation grid."""
    sizes = coeffs.shape[1:]
    out = coeffs.astype(np.complex128)
    for ax, (n, lam) in enumerate(zip(sizes, lambdas)):
        k = _fft_wavenumbers(n)
        x = _grid_points(n, lam)
        F = np.exp(1j * np.outer(x, k) / lam)
        out = np.moveaxis(np.tensordot(F, out, axes=([1], [ax + 1])), 0, ax + 1)
    return out.real


def eval_midpoints(coeffs: np.ndarray, lambdas, factor: int = 4) -> np.ndarray:
    """Evaluate the trig polynomial at midpoint nodes of a refined lattice.

    Nodes are x = -pi*lam + 2*pi*lam*(m + 1/2)/(factor*n): staggered off
    the collocation points, so agreement is evidence about the function,
    not the samples.
    """
    sizes = coeffs.shape[1:]
    out = coeffs.astype(np.complex128)
    for ax, (n, lam) in enumerate(zip(sizes, lambdas)):
        k = _fft_wavenumbers(n)
        m_big = factor * n
        x = -np.pi * lam + 2.0 * np.pi * lam * (np.arange(m_big) + 0.5) / m_big
        F = np.exp(1j * np.outer(x, k) / lam)
        out = np.moveaxis(np.tensordot(F, out, axes=([1], [ax + 1])), 0, ax + 1)
    return out.real


# ---------------------------------------------------------------------------
# Vertical velocity and advective flux integrals by midpoint quadrature.
# ---------------------------------------------------------------------------


def oracle_w_coeffs(vd_coeffs: np.ndarray, lambdas, zax: int) -> np.ndarray:
    """Vertical velocity coefficients from the divergence, assembled with
    explicit index arithmetic (no shared helpers)."""
    n_dims = vd_coeffs.ndim - 1
    h_axes = [a for a in range(n_dims) if a != zax]
    sizes = vd_coeffs.shape[1:]
    div = np.zeros(sizes, dtype=np.complex128)
    for comp, ax in enumerate(h_axes):
        k = _fft_wavenumbers(sizes[ax]).astype(float) / lambdas[ax]
        shape = [1] * n_dims
        shape[ax] = sizes[ax]
        div += 1j * k.reshape(shape) * vd_coeffs[comp]
    kz = _fft_wavenumbers(sizes[zax]).astype(float)
    shape = [1] * n_dims
    shape[zax] = sizes[zax]
    kz_b = kz.reshape(shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(kz_b == 0, 0.0, 1j * lambdas[zax] * div / np.where(kz_b == 0, 1.0, kz_b))
    # fix the mean so that w vanishes at z = pi * lambda_z
    signs = np.where(kz.astype(int) % 2 == 0, 1.0, -1.0).reshape(shape)
    top = np.sum(w * signs, axis=zax, keepdims=True)
    idx = [slice(None)] * n_dims
    idx[zax] = slice(0, 1)
    w[tuple(idx)] = -top
    return w[np.newaxis]


def oracle_direct_flux(vd_coeffs, v1_coeffs, lambdas, zax, factor=4):
    """(direct_H, direct_z) by midpoint quadrature on a refined lattice."""
    n_dims = vd_coeffs.ndim - 1
    h_axes = [a for a in range(n_dims) if a != zax]
    sizes = vd_coeffs.shape[1:]
    vol = float(np.prod([2.0 * np.pi * lam for lam in lambdas]))
    cell = vol / float(np.prod([factor * n for n in sizes]))

    def phys(c):
        return eval_midpoints(c[np.newaxis], lambdas, factor)[0]

    def deriv_c(c, ax):
        k = _fft_wavenumbers(sizes[ax]).astype(float) / lambdas[ax]
        shape = [1] * n_dims
        shape[ax] = sizes[ax]
        return c * (1j * k.reshape(shape))

    w = oracle_w_coeffs(vd_coeffs, lambdas, zax)[0]
    p1 = [phys(v1_coeffs[i]) for i in range(2)]
    direct_h = 0.0
    for slot, ax in enumerate(h_axes if n_dims == 3 else h_axes[:1]):
        pa = phys(vd_coeffs[slot])
        for i in range(2):
            direct_h += np.sum(pa * p1[i] * phys(deriv_c(vd_coeffs[i], ax)))
    pw = phys(w)
    direct_z = sum(
        np.sum(pw * p1[i] * phys(deriv_c(vd_coeffs[i], zax))) for i in range(2)
    )
    return cell * float(direct_h), cell * float(direct_z)


# ---------------------------------------------------------------------------
# Pure-python reference of the seeded random stream.
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def splitmix_reference(seed: int, count: int) -> list:
    """Sequential uniforms via python big-int arithmetic."""
    state = seed & _MASK64
    out = []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z = z ^ (z >> 31)
        out.append((z >> 11) * 2.0**-53)
    return out


# ---------------------------------------------------------------------------
# Standalone 2d Navier-Stokes reference solver.
# ---------------------------------------------------------------------------


class NSE2D:
    """Velocity-form spectral 2d Navier-Stokes on the square torus of
    scale 1, with the same time scheme and band conventions as the model
    under test but a fully separate implementation (raw numpy ffts,
    explicit phase bookkeeping, its own Leray projection and padding).

    State: complex coefficients, shape (2, n, n), fft layout, defined
    against absolute coordinates starting at -pi.
    """

    def __init__(self, n: int, dt: float, nu: float):
        self.n = n
        self.dt = dt
        self.nu = nu
        k = _fft_wavenumbers(n).astype(float)
        self.k1 = k[:, None]
        self.k2 = k[None, :]
        self.ksq = self.k1**2 + self.k2**2
        self._prev = None
        # phase exp(i k x0) with x0 = -pi maps coefficients to fft input
        self._phase = np.exp(-1j * np.pi * (self.k1 + self.k2))
        nb = 3 * n // 2
        kb = _fft_wavenumbers(nb).astype(float)
        self._phase_big = np.exp(-1j * np.pi * (kb[:, None] + kb[None, :]))

    def leray(self, c: np.ndarray) -> np.ndarray:
        k_dot = self.k1 * c[0] + self.k2 * c[1]
        denom = np.where(self.ksq == 0.0, 1.0, self.ksq)
        factor = np.where(self.ksq == 0.0, 0.0, k_dot / denom)
        return np.stack([c[0] - self.k1 * factor, c[1] - self.k2 * factor])

    def _pad(self, c: np.ndarray) -> np.ndarray:
        n, nb = self.n, 3 * self.n // 2
        half = n // 2
        big = np.zeros((nb, nb), dtype=np.complex128)
        src = np.r_[0:half, half + 1 : n]          # all slots except +Nyquist
        dst = np.r_[0:half, nb - half + 1 : nb]    # same wavenumbers in big layout
        big[np.ix_(dst, dst)] = c[np.ix_(src, src)]
        # split each Nyquist line evenly between +half and -half
        big[half, dst] = 0.5 * c[half, src]
        big[nb - half, dst] = 0.5 * c[half, src]
        big[dst, half] = 0.5 * c[src, half]
        big[dst, nb - half] = 0.5 * c[src, half]
        big[half, half] = 0.25 * c[half, half]
        big[half, nb - half] = 0.25 * c[half, half]
        big[nb - half, half] = 0.25 * c[half, half]
        big[nb - half, nb - half] = 0.25 * c[half, half]
        return big

    def _truncate(self, big: np.ndarray) -> np.ndarray:
        n, nb = self.n, 3 * self.n // 2
        half = n // 2
        src = np.r_[0:half, nb - half + 1 : nb]
        dst = np.r_[0:half, half + 1 : n]
        c = np.zeros((n, n), dtype=np.complex128)
        c[np.ix_(dst, dst)] = big[np.ix_(src, src)]
        c[half, dst] = big[half, src] + big[nb - half, src]
        c[dst, half] = big[src, half] + big[src, nb - half]
        c[half, half] = (
            big[half, half]
            + big[half, nb - half]
            + big[nb - half, half]
            + big[nb - half, nb - half]
        )
        return c

    def _values_big(self, c: np.ndarray) -> np.ndarray:
        big = self._pad(c)
        nb = big.shape[0]
        return np.fft.ifft2(big * self._phase_big).real * nb * nb

    def advection(self, c: np.ndarray) -> np.ndarray:
        """Leray-projected -(u.grad)u via padded products."""
        nb = 3 * self.n // 2
        u = [self._values_big(c[i]) for i in range(2)]
        out = []
        for i in range(2):
            adv = u[0] * self._values_big(1j * self.k1 * c[i])
            adv += u[1] * self._values_big(1j * self.k2 * c[i])
            big = np.fft.fft2(adv) / (nb * nb) * np.conj(self._phase_big)
            out.append(self._truncate(big))
        return self.leray(-np.stack(out))

    def step(self, c: np.ndarray) -> np.ndarray:
        adv = self.advection(c)
        rhs = adv if self._prev is None else 1.5 * adv - 0.5 * self._prev
        self._prev = adv
        z = self.nu * self.dt * self.ksq
        new = (c * (1.0 - 0.5 * z) + self.dt * rhs) / (1.0 + 0.5 * z)
        return self.leray(new)

    def run(self, c0: np.ndarray, n_steps: int) -> np.ndarray:
        c = self.leray(c0.astype(np.complex128))
        for _ in range(n_steps):
            c = self.step(c)
        return c
