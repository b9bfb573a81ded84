"""Sampled Z-transform on circles S_rho and its numerical certificates.

For a windowed sequence the transform is the Laurent sum
``f(z) = sum_k u_k z^(-k)`` evaluated at ``N`` uniform samples
``z_j = rho e^(2 pi i j / N)``.  Circle integrals become Riemann sums over
the samples; these are exact (to roundoff) for trigonometric polynomials
of degree < N, hence for every windowed sequence with ``2 * width <= N``.

The transform is unitary from ell_{2,rho} onto the sampled circle space,
it intertwines the shift with multiplication by the argument, and the
profile of ``|u|_{2,mu}`` over ``mu > rho`` is nonincreasing exactly for
sequences supported in Z_{>=0}; each of these facts ships as a check here.

Note: for square-summable sequences outside ell_{1,rho} the Laurent sum
need not converge pointwise on the circle.  That case never arises here,
since every artifact sequence has finite support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, InputError, WindowTooWide
from .sequences import Weight, WindowedSequence, shift, weighted_norm


def next_pow2(n: int) -> int:
    return 1 << max(0, int(n) - 1).bit_length()


@dataclass(frozen=True, eq=False)
class CircleFunction:
    """Function on S_rho held as N uniform samples, N a power of two.

    ``samples[j]`` is the value at ``rho * exp(2 pi i j / N)``.
    """

    rho: float
    samples: np.ndarray

    def __post_init__(self):
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise InputError(f"rho must be positive and finite, got {self.rho!r}")
        arr = np.asarray(self.samples, dtype=np.complex128)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise InputError("samples must form a (N, dim) array")
        n = arr.shape[0]
        if n & (n - 1):
            raise InputError(f"sample count must be a power of two, got {n}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "samples", arr)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_samples) / self.n_samples

    def points(self) -> np.ndarray:
        return self.rho * np.exp(1j * self.angles())


def default_sample_count(width: int) -> int:
    """Smallest power of two >= 4 * window width."""
    return max(2, next_pow2(4 * max(1, width)))


def ztransform(u: WindowedSequence, rho: float, n_samples: int | None = None) -> CircleFunction:
    """Sampled Laurent sum ``sum_k u_k z^(-k)`` on S_rho.

    Computed as a length-N FFT of the rho^(-k)-scaled, index-rotated
    coefficient array.  Requires ``N >= 2 * width`` to avoid aliasing.
    """
    if not (math.isfinite(rho) and rho > 0):
        raise InputError(f"rho must be positive and finite, got {rho!r}")
    width = u.width
    n = default_sample_count(width) if n_samples is None else int(n_samples)
    if n < 2 * width:
        raise AliasingError(f"need N >= 2 * width = {2 * width}, got N = {n}")
    k = np.arange(u.lo, u.hi + 1, dtype=np.float64)
    scaled = u.values * np.power(float(rho), -k)[:, None]
    buf = np.zeros((n, u.dim), dtype=np.complex128)
    buf[np.arange(u.lo, u.hi + 1) % n] = scaled
    return CircleFunction(rho, np.fft.fft(buf, axis=0))


def inverse_ztransform(f: CircleFunction, window: tuple[int, int]) -> WindowedSequence:
    """Coefficients of ``f`` on the window, by inverse FFT and rho^k rescale.

    Exact inverse of :func:`ztransform` on band-limited data; the window
    must fit in the sample count.
    """
    lo, hi = int(window[0]), int(window[1])
    if hi < lo:
        raise InputError("inverse transform window is empty")
    n = f.n_samples
    if hi - lo + 1 > n:
        raise WindowTooWide(f"window width {hi - lo + 1} exceeds N = {n}")
    buf = np.fft.ifft(f.samples, axis=0)
    k = np.arange(lo, hi + 1)
    vals = buf[k % n] * np.power(f.rho, k.astype(np.float64))[:, None]
    return WindowedSequence(lo, vals)


def circle_l2_norm(f: CircleFunction) -> float:
    """Discrete L2(S_rho) norm: sqrt of the sample mean of |f(z)|^2."""
    return float(np.sqrt(np.mean(np.sum(np.abs(f.samples) ** 2, axis=1))))


def parseval_check(
    u: WindowedSequence, rho: float, n_samples: int | None = None
) -> tuple[float, float]:
    """Both sides of the unitarity identity.

    Returns ``(lhs, rhs)`` where lhs is the squared discrete circle norm of
    the transform and rhs the squared ell_{2,rho} norm of ``u``; callers
    assert ``|lhs - rhs| <= tol * rhs``.
    """
    f = ztransform(u, rho, n_samples)
    lhs = circle_l2_norm(f) ** 2
    rhs = weighted_norm(u, Weight(rho, 2.0)) ** 2
    return lhs, rhs


def multiplication_equiv_check(
    u: WindowedSequence, rho: float, n_samples: int | None = None
) -> float:
    """Defect of the shift/multiplication intertwining.

    Returns the discrete L2 norm of ``Z(tau u) - z * Z(u)`` over the
    samples; one extra index of slack is budgeted for the shifted window.
    """
    if n_samples is None:
        n_samples = default_sample_count(u.width + 2)
    lhs = ztransform(shift(u, 1), rho, n_samples)
    base = ztransform(u, rho, n_samples)
    diff = lhs.samples - base.points()[:, None] * base.samples
    return float(np.sqrt(np.mean(np.sum(np.abs(diff) ** 2, axis=1))))


def positive_support_hardy_check(
    u: WindowedSequence, rho: float, mu_grid
) -> tuple[float, bool]:
    """Grid evidence for support in Z_{>=0}.

    Computes ``|u|^2_{2,mu}`` for each ``mu > rho`` (equal to the circle
    integral of the transform by unitarity) and reports the maximum along
    with whether the profile is nonincreasing in ``mu``, the numerical
    signature of nonnegative support.  A finite grid yields evidence only,
    never a proof verdict.
    """
    mus = [float(m) for m in mu_grid]
    if not mus:
        raise InputError("mu grid is empty")
    if any(m2 <= m1 for m1, m2 in zip(mus, mus[1:])):
        raise InputError("mu grid must be sorted strictly ascending")
    if mus[0] <= rho:
        raise InputError(f"mu grid must satisfy mu > rho = {rho}")
    norms = [weighted_norm(u, Weight(m, 2.0)) ** 2 for m in mus]
    sup_norm = max(norms)
    slack = 1e-10 * max(1.0, sup_norm)
    nonincreasing = all(b <= a + slack for a, b in zip(norms, norms[1:]))
    return sup_norm, nonincreasing
