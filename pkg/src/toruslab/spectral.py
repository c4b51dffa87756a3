"""FFT helpers for 1-periodic sampled curves and fields.

Samples live on the uniform grid theta_k = k/N.  First derivatives zero the
Nyquist mode (the standard real-data convention); even derivatives keep it.
The dense differentiation matrix is generated by applying the same FFT rule
to identity columns, so matrix and FFT paths agree to rounding.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "grid_derivative",
    "diff_matrix",
    "fourier_coeffs",
    "eval_interpolant",
]


def grid_derivative(samples, order=1):
    """Spectral derivative on the sample grid; samples shape (N,) or (N, n)."""
    arr = np.asarray(samples, dtype=float)
    N = arr.shape[0]
    c = np.fft.rfft(arr, axis=0)
    k = np.arange(c.shape[0])
    mult = (2j * np.pi * k) ** order
    if order % 2 == 1 and N % 2 == 0:
        mult = mult.copy()
        mult[-1] = 0.0
    shape = (-1,) + (1,) * (arr.ndim - 1)
    return np.fft.irfft(c * mult.reshape(shape), n=N, axis=0)


def diff_matrix(N, order=1):
    """Dense N x N spectral differentiation matrix on the period-1 grid."""
    return grid_derivative(np.eye(N), order=order)


def fourier_coeffs(samples):
    """rfft coefficients normalized so that reconstruction uses exp(2pi i k t)."""
    arr = np.asarray(samples, dtype=float)
    return np.fft.rfft(arr, axis=0) / arr.shape[0]


def eval_interpolant(coeffs, N, theta, deriv=0):
    """Evaluate the trigonometric interpolant at arbitrary parameters.

    ``coeffs`` from :func:`fourier_coeffs` (shape (K,) or (K, n)), ``N`` the
    original sample count, ``theta`` any float array.  Returns shape
    theta.shape (+ (n,)).
    """
    theta = np.asarray(theta, dtype=float)
    K = coeffs.shape[0]
    k = np.arange(K)
    w = np.full(K, 2.0)
    w[0] = 1.0
    if N % 2 == 0:
        w[-1] = 1.0  # Nyquist appears once
    mult = (2j * np.pi * k) ** deriv if deriv else np.ones(K)
    if deriv % 2 == 1 and N % 2 == 0:
        mult = np.asarray(mult, dtype=complex).copy()
        mult[-1] = 0.0
    phase = np.exp(2j * np.pi * np.multiply.outer(theta, k))
    weighted = coeffs * (w * mult)[(slice(None),) + (None,) * (coeffs.ndim - 1)]
    return np.real(np.tensordot(phase, weighted, axes=([-1], [0])))
