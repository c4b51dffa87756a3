"""Metric tensors on flat tori: evaluation, connection, curvature, index.

Metric coefficients are trigonometric polynomials, so all derivatives used
by the Levi-Civita connection and the curvature tensor are exact.  A metric
may additionally carry tube-localized terms (cutoff times trig-polynomial
tensor); those evaluate to exactly zero outside their tube, which is what
makes locally supported perturbations exactly local.

Curvature sign convention: R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y], in
components R^l_{ijk} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
+ Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik}.
"""
from __future__ import annotations

import hashlib
import json

import numpy as np

from .errors import DegenerateMetric, RankDeficient, ZeroVelocity
from .trig import TrigPoly, trig_fit, uniform_grid

__all__ = [
    "TorusMetric",
    "AuxRiemannianMetric",
    "Distribution",
    "eval_metric",
    "metric_index",
    "build_index_metric",
    "christoffel",
    "curvature",
    "causal_character",
    "euclidean_metric",
    "save_metric",
    "load_metric",
]

DET_FLOOR = 1e-8
PD_FLOOR = 1e-8
CAUSAL_TOL = 1e-9
VALIDATION_GRID = 64


def _as_points(point):
    pts = np.atleast_2d(np.asarray(point, dtype=float))
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite point")
    return pts, np.ndim(point) == 1


class TensorField:
    """Symmetric matrix of trigonometric polynomials with exact derivatives."""

    def __init__(self, coeffs):
        self.dim = len(coeffs)
        self.coeffs = [[coeffs[i][j] for j in range(self.dim)] for i in range(self.dim)]
        for i in range(self.dim):
            for j in range(self.dim):
                if self.coeffs[i][j].terms != self.coeffs[j][i].terms:
                    raise ValueError("coefficient matrix must be symmetric")
        self._d1 = None
        self._d2 = None

    def _derivatives(self):
        if self._d1 is None:
            n = self.dim
            self._d1 = [
                [[self.coeffs[i][j].derivative(a) for j in range(n)] for i in range(n)]
                for a in range(n)
            ]
            self._d2 = [
                [
                    [[self._d1[a][i][j].derivative(b) for j in range(n)] for i in range(n)]
                    for b in range(n)
                ]
                for a in range(n)
            ]
        return self._d1, self._d2

    def values(self, pts, order=0):
        """Evaluate g (P,n,n), and optionally dg (P,a,i,j), d2g (P,a,b,i,j)."""
        n = self.dim
        P = pts.shape[0]
        g = np.empty((P, n, n))
        for i in range(n):
            for j in range(i, n):
                v = self.coeffs[i][j](pts)
                g[:, i, j] = v
                g[:, j, i] = v
        if order == 0:
            return g, None, None
        d1, d2 = self._derivatives()
        dg = np.empty((P, n, n, n))
        for a in range(n):
            for i in range(n):
                for j in range(i, n):
                    v = d1[a][i][j](pts)
                    dg[:, a, i, j] = v
                    dg[:, a, j, i] = v
        if order == 1:
            return g, dg, None
        d2g = np.empty((P, n, n, n, n))
        for a in range(n):
            for b in range(a, n):
                for i in range(n):
                    for j in range(i, n):
                        v = d2[a][b][i][j](pts)
                        d2g[:, a, b, i, j] = v
                        d2g[:, a, b, j, i] = v
                        d2g[:, b, a, i, j] = v
                        d2g[:, b, a, j, i] = v
        return g, dg, d2g

    def c2_seminorm(self):
        return sum(
            self.coeffs[i][j].c2_seminorm() for i in range(self.dim) for j in range(self.dim)
        )

    def to_rows(self):
        rows = []
        for i in range(self.dim):
            for j in range(i, self.dim):
                for freq, a, b in self.coeffs[i][j].to_rows():
                    rows.append([i, j, freq, a, b])
        return rows

    @classmethod
    def from_rows(cls, dim, rows):
        polys = [[TrigPoly.zero(dim) for _ in range(dim)] for _ in range(dim)]
        for i, j, freq, a, b in rows:
            term = TrigPoly(dim, {tuple(freq): (a, b)})
            polys[i][j] = polys[i][j] + term
            if i != j:
                polys[j][i] = polys[j][i] + term
        return cls(polys)

    @classmethod
    def from_matrix(cls, matrix):
        """Constant-coefficient field from a symmetric numeric matrix."""
        m = np.asarray(matrix, dtype=float)
        dim = m.shape[0]
        return cls([[TrigPoly.constant(m[i, j], dim) for j in range(dim)] for i in range(dim)])

    @classmethod
    def zero(cls, dim):
        return cls([[TrigPoly.zero(dim) for _ in range(dim)] for _ in range(dim)])

    def combine(self, other, s_self, s_other):
        n = self.dim
        return TensorField(
            [
                [self.coeffs[i][j] * s_self + other.coeffs[i][j] * s_other for j in range(n)]
                for i in range(n)
            ]
        )


class TorusMetric:
    """Semi-Riemannian metric tensor on the flat torus T^n, n in {2, 3}.

    Parameters
    ----------
    coeffs : TensorField or nested list of TrigPoly
        Symmetric matrix of trigonometric-polynomial coefficients.
    declared_index : int
        Number of negative eigenvalues of g relative to the auxiliary
        Riemannian metric; validated pointwise on a grid.
    localized : list, optional
        Tube-localized terms (see :mod:`toruslab.tube`); each contributes
        cutoff(x) * B(x) and vanishes exactly outside its tube.
    """

    def __init__(
        self,
        coeffs,
        declared_index,
        metric_id=None,
        localized=None,
        det_floor=DET_FLOOR,
        grid_points=VALIDATION_GRID,
        aux=None,
    ):
        self.base = coeffs if isinstance(coeffs, TensorField) else TensorField(coeffs)
        self.dim = self.base.dim
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        self.declared_index = int(declared_index)
        if not 0 <= self.declared_index <= self.dim:
            raise ValueError("declared_index out of range")
        self.localized = list(localized or [])
        self.det_floor = float(det_floor)
        self._validate(grid_points, aux)
        self.id = metric_id if metric_id is not None else self._content_id()

    # -- validation ----------------------------------------------------

    def _validate(self, grid_points, aux):
        pts = uniform_grid(self.dim, grid_points)
        g = self.fields(pts, order=0).g
        det = np.linalg.det(g)
        if np.min(np.abs(det)) < self.det_floor:
            raise DegenerateMetric(
                f"|det g| dips to {np.min(np.abs(det)):.3e} on the validation grid"
            )
        eigs = _relative_eigenvalues(g, aux, pts)
        neg = np.sum(eigs < 0.0, axis=1)
        if not np.all(neg == self.declared_index):
            raise DegenerateMetric(
                "negative-eigenvalue count is not constant equal to declared_index "
                f"(found counts {sorted(set(int(x) for x in neg))})"
            )

    def _content_id(self):
        payload = json.dumps(self.to_dict(include_id=False), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:12]

    # -- evaluation ----------------------------------------------------

    def fields(self, points, order=0, with_curvature=False):
        """Evaluate metric data at a batch of points.

        Returns an object with attributes ``g`` and, depending on ``order``,
        ``dg``, ``d2g``, ``ginv``, ``gamma``, ``dgamma``, ``riemann``.
        Index layout: dg[p,a,i,j] = d_a g_ij, gamma[p,k,i,j] = Gamma^k_ij,
        riemann[p,l,i,j,k] = R^l_{ijk}.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        need = 2 if (with_curvature or order >= 2) else order
        g, dg, d2g = self.base.values(pts, order=need)
        for term in self.localized:
            tg, tdg, td2g = term.values(pts, order=need)
            g = g + tg
            if need >= 1:
                dg = dg + tdg
            if need >= 2:
                d2g = d2g + td2g
        out = _Fields(g=g, dg=dg, d2g=d2g)
        if need >= 1:
            out.ginv = np.linalg.inv(g)
            # Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij);
            # sym[p,i,j,l] holds the bracket with l the contracted axis
            sym = dg + dg.transpose(0, 2, 1, 3) - dg.transpose(0, 2, 3, 1)
            out.gamma = 0.5 * np.einsum("pkl,pijl->pkij", out.ginv, sym)
        if need >= 2:
            dginv = -np.einsum("pka,pmab,pbl->pmkl", out.ginv, dg, out.ginv)
            # dsym[p,m,i,j,l] = d_m sym[i,j,l]
            dsym = d2g + d2g.transpose(0, 1, 3, 2, 4) - d2g.transpose(0, 1, 3, 4, 2)
            out.dgamma = 0.5 * (
                np.einsum("pmkl,pijl->pmkij", dginv, sym)
                + np.einsum("pkl,pmijl->pmkij", out.ginv, dsym)
            )
        if with_curvature:
            gm = out.gamma
            dgm = out.dgamma
            out.riemann = (
                dgm.transpose(0, 2, 1, 3, 4)  # d_i Gamma^l_jk -> [p,l,i,j,k] from [p,m=i,l,j,k]
                - dgm.transpose(0, 2, 3, 1, 4)
                + np.einsum("plim,pmjk->plijk", gm, gm)
                - np.einsum("pljm,pmik->plijk", gm, gm)
            )
        return out

    def matrix_at(self, point):
        pts, single = _as_points(point)
        g = self.fields(pts, order=0).g
        return g[0] if single else g

    def inverse_at(self, point):
        g = self.matrix_at(point)
        return np.linalg.inv(g)

    def c2_seminorm(self):
        out = self.base.c2_seminorm()
        for term in self.localized:
            out += term.c2_seminorm()
        return out

    # -- algebra ---------------------------------------------------------

    @staticmethod
    def linear_combination(m0, m1, t, metric_id=None, grid_points=VALIDATION_GRID):
        """(1-t) * m0 + t * m1, validated; raises DegenerateMetric if the
        combination loses nondegeneracy or changes index."""
        if m0.dim != m1.dim:
            raise ValueError("dimension mismatch")
        base = m0.base.combine(m1.base, 1.0 - t, t)
        localized = [term.scaled(1.0 - t) for term in m0.localized if t < 1.0]
        localized += [term.scaled(t) for term in m1.localized if t > 0.0]
        index = m0.declared_index if t < 1.0 else m1.declared_index
        return TorusMetric(
            base,
            index,
            metric_id=metric_id,
            localized=localized,
            grid_points=grid_points,
        )

    def with_localized(self, terms, metric_id=None):
        return TorusMetric(
            self.base,
            self.declared_index,
            metric_id=metric_id,
            localized=self.localized + list(terms),
        )

    def with_added_field(self, field, declared_index=None, metric_id=None):
        return TorusMetric(
            self.base.combine(field, 1.0, 1.0),
            self.declared_index if declared_index is None else declared_index,
            metric_id=metric_id,
            localized=list(self.localized),
        )

    # -- serialization ---------------------------------------------------

    def to_dict(self, include_id=True):
        doc = {
            "dim": self.dim,
            "declared_index": self.declared_index,
            "terms": self.base.to_rows(),
        }
        if self.localized:
            doc["localized"] = [term.to_dict() for term in self.localized]
        if include_id:
            doc["id"] = self.id
        return doc

    @classmethod
    def from_dict(cls, doc):
        from .tube import LocalizedTerm  # local import to avoid a cycle

        base = TensorField.from_rows(doc["dim"], doc["terms"])
        localized = [LocalizedTerm.from_dict(d) for d in doc.get("localized", [])]
        return cls(
            base,
            doc["declared_index"],
            metric_id=doc.get("id"),
            localized=localized,
        )

    def __repr__(self):
        return (
            f"TorusMetric(dim={self.dim}, index={self.declared_index}, "
            f"id={self.id!r}, localized={len(self.localized)})"
        )


class _Fields:
    def __init__(self, **kw):
        self.__dict__.update(kw)


class AuxRiemannianMetric:
    """Positive definite reference metric; defaults to the Euclidean one."""

    def __init__(self, coeffs, pd_floor=PD_FLOOR, grid_points=VALIDATION_GRID):
        self.base = coeffs if isinstance(coeffs, TensorField) else TensorField(coeffs)
        self.dim = self.base.dim
        self.pd_floor = float(pd_floor)
        pts = uniform_grid(self.dim, grid_points)
        g, _, _ = self.base.values(pts, order=0)
        mineig = np.min(np.linalg.eigvalsh(g))
        if mineig < self.pd_floor:
            raise DegenerateMetric(f"auxiliary metric min eigenvalue {mineig:.3e}")
        self._constant = all(
            self.base.coeffs[i][j].is_constant() for i in range(self.dim) for j in range(self.dim)
        )

    @classmethod
    def euclidean(cls, dim):
        return cls(TensorField.from_matrix(np.eye(dim)))

    def is_euclidean(self):
        if not self._constant:
            return False
        g = self.matrix_at(np.zeros(self.dim))
        return np.allclose(g, np.eye(self.dim))

    def matrix_at(self, point):
        pts, single = _as_points(point)
        g, _, _ = self.base.values(pts, order=0)
        return g[0] if single else g

    def min_eigenvalue(self, grid_points=32):
        pts = uniform_grid(self.dim, grid_points)
        g, _, _ = self.base.values(pts, order=0)
        return float(np.min(np.linalg.eigvalsh(g)))

    def to_dict(self):
        return {"dim": self.dim, "terms": self.base.to_rows()}

    @classmethod
    def from_dict(cls, doc):
        return cls(TensorField.from_rows(doc["dim"], doc["terms"]))


class Distribution:
    """Rank-r distribution on T^n given by trig-polynomial frame fields."""

    def __init__(self, frames, grid_points=VALIDATION_GRID, min_sv=1e-8):
        # frames: list of vector fields, each a list of dim TrigPolys
        self.rank = len(frames)
        self.dim = len(frames[0])
        self.frames = frames
        pts = uniform_grid(self.dim, grid_points)
        e = self.frame_values(pts)
        sv = np.linalg.svd(e, compute_uv=False)
        if np.min(sv[:, -1]) < min_sv:
            raise RankDeficient(
                f"frame min singular value {np.min(sv[:, -1]):.3e} on validation grid"
            )

    @classmethod
    def from_constant_vectors(cls, vectors):
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        dim = vectors.shape[1]
        frames = [
            [TrigPoly.constant(v[c], dim) for c in range(dim)] for v in vectors
        ]
        return cls(frames)

    def frame_values(self, pts):
        """Stacked frame matrix E with E[p, :, a] the a-th frame vector."""
        P = pts.shape[0]
        e = np.empty((P, self.dim, self.rank))
        for a, frame in enumerate(self.frames):
            for c in range(self.dim):
                e[:, c, a] = frame[c](pts)
        return e


def _relative_eigenvalues(g, aux, pts):
    """Eigenvalues of g relative to the auxiliary metric (identity default)."""
    if aux is None or (isinstance(aux, AuxRiemannianMetric) and aux.is_euclidean()):
        return np.linalg.eigvalsh(g)
    gr = aux.matrix_at(pts)
    L = np.linalg.cholesky(gr)
    Linv = np.linalg.inv(L)
    sym = Linv @ g @ Linv.transpose(0, 2, 1)
    return np.linalg.eigvalsh(sym)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def eval_metric(metric, point):
    """Metric matrix g(x); exact polynomial evaluation."""
    return metric.matrix_at(point)


def metric_index(metric, g_R, point):
    """Number of negative eigenvalues of g relative to g_R at ``point``.

    Raises DegenerateMetric when an eigenvalue is too close to zero to be
    counted reliably.
    """
    pts, single = _as_points(point)
    g = metric.fields(pts, order=0).g
    eigs = _relative_eigenvalues(g, g_R, pts)
    floor = metric.det_floor ** (1.0 / metric.dim)
    if np.min(np.abs(eigs)) < floor:
        raise DegenerateMetric("eigenvalue magnitude below the degeneracy floor")
    counts = np.sum(eigs < 0.0, axis=1)
    if single:
        return int(counts[0])
    return counts.astype(int)


def build_index_metric(g_R, delta, freq_cap=None, fit_grid=None, fit_tol=1e-9):
    """Metric of index delta.rank: -g_R on the distribution, +g_R on its
    g_R-orthogonal complement, zero across.

    Pointwise the construction is g = g_R - 2 g_R E (E^T g_R E)^{-1} E^T g_R
    with E the frame matrix.  For constant frames this is exact; otherwise
    the rational pointwise formula is projected back onto trigonometric
    polynomials by discrete Fourier fit, and the projection residual must
    stay below ``fit_tol``.
    """
    dim = delta.dim
    freq_cap = freq_cap if freq_cap is not None else max(
        4, 2 * max(max(p.max_frequency() for p in fr) for fr in delta.frames) + 2
    )
    m = fit_grid if fit_grid is not None else 1
    while m <= 2 * freq_cap:
        m *= 2
    m = max(m, 32)
    pts = uniform_grid(dim, m)
    gr = g_R.matrix_at(pts)
    e = delta.frame_values(pts)
    gre = gr @ e
    gram = np.einsum("pca,pcb->pab", e, gre)
    try:
        gram_inv = np.linalg.inv(gram)
    except np.linalg.LinAlgError as exc:
        raise RankDeficient("frame Gram matrix is singular") from exc
    g = gr - 2.0 * np.einsum("pia,pab,pjb->pij", gre, gram_inv, gre)
    polys = [[None] * dim for _ in range(dim)]
    worst = 0.0
    for i in range(dim):
        for j in range(i, dim):
            vals = g[:, i, j].reshape((m,) * dim)
            p = trig_fit(vals, freq_cap)
            worst = max(worst, float(np.max(np.abs(p(pts) - g[:, i, j]))))
            polys[i][j] = p
            polys[j][i] = p
    if worst > fit_tol:
        raise RankDeficient(
            f"trigonometric projection residual {worst:.3e} exceeds {fit_tol:.1e}; "
            "raise freq_cap for this frame"
        )
    return TorusMetric(polys, declared_index=delta.rank, aux=g_R)


def christoffel(metric, point):
    """Christoffel symbols Gamma^k_ij of the Levi-Civita connection."""
    pts, single = _as_points(point)
    f = metric.fields(pts, order=1)
    _check_pointwise_nondegenerate(f.g, metric)
    return f.gamma[0] if single else f.gamma


def curvature(metric, point):
    """Curvature tensor R^l_{ijk}, antisymmetric in (i, j)."""
    pts, single = _as_points(point)
    f = metric.fields(pts, order=2, with_curvature=True)
    _check_pointwise_nondegenerate(f.g, metric)
    return f.riemann[0] if single else f.riemann


def _check_pointwise_nondegenerate(g, metric):
    det = np.linalg.det(g)
    if np.min(np.abs(det)) < metric.det_floor:
        raise DegenerateMetric("metric degenerate at evaluation point")


def causal_character(metric, point, velocity, g_R=None, causal_tol=CAUSAL_TOL):
    """Classify a tangent vector and return (label, c) with c = g(v, v).

    The lightlike band is |c| <= causal_tol * g_R(v, v).
    """
    v = np.asarray(velocity, dtype=float)
    if not np.any(v != 0.0):
        raise ZeroVelocity("causal character of the zero vector is undefined")
    g = metric.matrix_at(point)
    c = float(v @ g @ v)
    gr = np.eye(metric.dim) if g_R is None else g_R.matrix_at(point)
    scale = float(v @ gr @ v)
    if abs(c) <= causal_tol * scale:
        label = "lightlike"
    elif c > 0:
        label = "spacelike"
    else:
        label = "timelike"
    return label, c


def euclidean_metric(dim=2):
    """Flat Riemannian metric, the identity matrix at every point."""
    return TorusMetric(TensorField.from_matrix(np.eye(dim)), declared_index=0)


def save_metric(metric, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metric.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_metric(path):
    with open(path, encoding="utf-8") as fh:
        return TorusMetric.from_dict(json.load(fh))
