"""Real trigonometric polynomials on the unit torus R^n / Z^n.

A polynomial is stored as a map from integer frequency vectors to
cosine/sine coefficient pairs,

    p(x) = sum_k  a_k cos(2 pi k.x) + b_k sin(2 pi k.x),

with frequencies restricted to a canonical half-space (first nonzero
component positive; the zero frequency carries only the constant a_0) so
representations are unique.  Instances are immutable; differentiation is
exact and closed in this class.
"""
from __future__ import annotations

import numpy as np

__all__ = ["TrigPoly", "trig_fit"]


def _canonical(freq):
    """Return (canonical frequency tuple, sign) for an integer vector."""
    k = tuple(int(f) for f in freq)
    for f in k:
        if f > 0:
            return k, 1
        if f < 0:
            return tuple(-g for g in k), -1
    return k, 1


class TrigPoly:
    """Immutable real trigonometric polynomial in ``dim`` torus variables."""

    __slots__ = ("dim", "_terms", "_K", "_A", "_B")

    def __init__(self, dim, terms=None):
        self.dim = int(dim)
        clean = {}
        for freq, (a, b) in (terms or {}).items():
            k, sign = _canonical(freq)
            if len(k) != self.dim:
                raise ValueError("frequency dimension mismatch")
            a = float(a)
            b = sign * float(b)
            if all(f == 0 for f in k):
                b = 0.0
            if k in clean:
                a0, b0 = clean[k]
                a, b = a0 + a, b0 + b
            if a != 0.0 or b != 0.0:
                clean[k] = (a, b)
        self._terms = clean
        # dense arrays for vectorized evaluation, built lazily
        self._K = None
        self._A = None
        self._B = None

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, value, dim):
        zero = (0,) * dim
        return cls(dim, {zero: (float(value), 0.0)})

    @classmethod
    def zero(cls, dim):
        return cls(dim, {})

    @classmethod
    def harmonic(cls, freq, cos_coeff=0.0, sin_coeff=0.0):
        """Single-frequency polynomial a cos(2 pi k.x) + b sin(2 pi k.x)."""
        return cls(len(freq), {tuple(freq): (cos_coeff, sin_coeff)})

    # -- bookkeeping ---------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    def is_constant(self):
        return all(all(f == 0 for f in k) for k in self._terms)

    def constant_part(self):
        return self._terms.get((0,) * self.dim, (0.0, 0.0))[0]

    def max_frequency(self):
        """Largest |k_i| over all stored frequencies."""
        if not self._terms:
            return 0
        return max(max(abs(f) for f in k) for k in self._terms)

    def _dense(self):
        if self._K is None:
            if self._terms:
                ks = sorted(self._terms)
                self._K = np.array(ks, dtype=float)
                self._A = np.array([self._terms[k][0] for k in ks])
                self._B = np.array([self._terms[k][1] for k in ks])
            else:
                self._K = np.zeros((0, self.dim))
                self._A = np.zeros(0)
                self._B = np.zeros(0)
        return self._K, self._A, self._B

    # -- evaluation ----------------------------------------------------

    def __call__(self, points):
        """Evaluate at points of shape (P, dim) or a single point (dim,)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        K, A, B = self._dense()
        if K.shape[0] == 0:
            out = np.zeros(pts.shape[0])
        else:
            phase = 2.0 * np.pi * pts @ K.T
            out = np.cos(phase) @ A + np.sin(phase) @ B
        if np.ndim(points) == 1:
            return float(out[0])
        return out

    # -- algebra -------------------------------------------------------

    def derivative(self, axis):
        """Exact partial derivative with respect to coordinate ``axis``."""
        new = {}
        for k, (a, b) in self._terms.items():
            w = 2.0 * np.pi * k[axis]
            if w != 0.0:
                # d/dx [a cos + b sin] = w (b cos - a sin)
                new[k] = (w * b, -w * a)
        return TrigPoly(self.dim, new)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = TrigPoly.constant(other, self.dim)
        merged = dict(self._terms)
        for k, (a, b) in other._terms.items():
            a0, b0 = merged.get(k, (0.0, 0.0))
            merged[k] = (a0 + a, b0 + b)
        return TrigPoly(self.dim, merged)

    def __sub__(self, other):
        return self + (other * -1.0 if isinstance(other, TrigPoly) else -other)

    def __mul__(self, scalar):
        s = float(scalar)
        return TrigPoly(self.dim, {k: (a * s, b * s) for k, (a, b) in self._terms.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def prune(self, eps=0.0):
        """Drop coefficients with |a|, |b| <= eps."""
        return TrigPoly(
            self.dim,
            {k: ab for k, ab in self._terms.items() if max(abs(ab[0]), abs(ab[1])) > eps},
        )

    # -- norms -----------------------------------------------------------

    def c2_seminorm(self):
        """Coefficient-weighted C^2 proxy seminorm.

        max over frequencies of max(|a_k|, |b_k|) * (1 + 2 pi |k|_inf)^2.
        The weight dominates the sup norm of the polynomial and of its
        first and second partial derivatives up to a dimension factor,
        which is the convention used for "C^2-small" throughout.
        """
        out = 0.0
        for k, (a, b) in self._terms.items():
            kmax = max(abs(f) for f in k) if k else 0
            w = (1.0 + 2.0 * np.pi * kmax) ** 2
            out = max(out, max(abs(a), abs(b)) * w)
        return out

    # -- serialization ---------------------------------------------------

    def to_rows(self):
        """Rows (frequency list, cos coeff, sin coeff), sorted for determinism."""
        return [[list(k), a, b] for k, (a, b) in sorted(self._terms.items())]

    @classmethod
    def from_rows(cls, dim, rows):
        return cls(dim, {tuple(r[0]): (r[1], r[2]) for r in rows})

    def __repr__(self):
        return f"TrigPoly(dim={self.dim}, nterms={len(self._terms)})"


def uniform_grid(dim, m):
    """Uniform m^dim grid on [0,1)^dim, returned as (m^dim, dim) array."""
    axes = [np.arange(m) / m] * dim
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=-1)


def trig_fit(values, freq_cap, prune_rel=1e-13):
    """Fit a TrigPoly to values sampled on a uniform m^dim grid.

    ``values`` must have shape (m,)*dim with m > 2*freq_cap.  The fit is the
    exact discrete Fourier projection onto frequencies |k_i| <= freq_cap; for
    band-limited input it reproduces the polynomial exactly.  Coefficients
    below ``prune_rel`` times the largest one are dropped as FFT roundoff.
    """
    values = np.asarray(values, dtype=float)
    dim = values.ndim
    m = values.shape[0]
    if any(s != m for s in values.shape):
        raise ValueError("grid must be square")
    if m <= 2 * freq_cap:
        raise ValueError("grid too coarse for requested frequency cap")
    c = np.fft.fftn(values) / values.size
    terms = {}
    ranges = [range(-freq_cap, freq_cap + 1)] * dim
    idx = np.meshgrid(*ranges, indexing="ij")
    for k in zip(*(g.ravel() for g in idx)):
        kc, sign = _canonical(k)
        if sign < 0 or kc in terms:
            continue
        ck = c[tuple(np.mod(kc, m))]
        if all(f == 0 for f in kc):
            terms[kc] = (float(ck.real), 0.0)
        else:
            terms[kc] = (2.0 * float(ck.real), -2.0 * float(ck.imag))
    biggest = max((max(abs(a), abs(b)) for a, b in terms.values()), default=0.0)
    return TrigPoly(dim, terms).prune(prune_rel * biggest)
