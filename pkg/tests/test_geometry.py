import numpy as np
import pytest

from toruslab.errors import DegenerateMetric, RankDeficient, ZeroVelocity
from toruslab.geometry import (
    AuxRiemannianMetric,
    Distribution,
    TensorField,
    TorusMetric,
    build_index_metric,
    causal_character,
    christoffel,
    curvature,
    eval_metric,
    euclidean_metric,
    load_metric,
    metric_index,
    save_metric,
)
from toruslab.trig import TrigPoly


def hill_metric(eps=0.1):
    polys = [
        [TrigPoly(2, {(0, 0): (1.0, 0.0), (0, 1): (eps, 0.0)}), TrigPoly.zero(2)],
        [TrigPoly.zero(2), TrigPoly.constant(1.0, 2)],
    ]
    return TorusMetric(polys, declared_index=0)


def lorentz_metric():
    return TorusMetric(TensorField.from_matrix(np.diag([1.0, -1.0])), declared_index=1)


def test_eval_constant_metrics():
    np.testing.assert_allclose(eval_metric(euclidean_metric(), (0.3, 0.7)), np.eye(2))
    np.testing.assert_allclose(
        eval_metric(lorentz_metric(), (0.9, 0.1)), np.diag([1.0, -1.0])
    )


def test_eval_hill_at_quarter():
    g = eval_metric(hill_metric(0.1), (0.0, 0.25))
    np.testing.assert_allclose(g, np.eye(2), atol=1e-15)


def test_metric_index_examples():
    gr = AuxRiemannianMetric.euclidean(2)
    assert metric_index(euclidean_metric(), gr, (0.2, 0.4)) == 0
    assert metric_index(lorentz_metric(), gr, (0.2, 0.4)) == 1


def test_metric_index_near_degenerate_raises():
    m = TorusMetric(
        TensorField.from_matrix(np.diag([1.0, 1e-6])),
        declared_index=0,
        det_floor=1e-8,
    )
    with pytest.raises(DegenerateMetric):
        metric_index(m, AuxRiemannianMetric.euclidean(2), (0.0, 0.0))


def test_declared_index_validated():
    with pytest.raises(DegenerateMetric):
        TorusMetric(TensorField.from_matrix(np.eye(2)), declared_index=1)


def test_christoffel_constant_metric_vanishes():
    np.testing.assert_allclose(christoffel(lorentz_metric(), (0.3, 0.8)), 0.0)


def test_christoffel_hill_hand_values():
    eps = 0.1
    m = hill_metric(eps)
    # on the axis y=0 the y-derivative of g11 vanishes
    gam = christoffel(m, (0.42, 0.0))
    np.testing.assert_allclose(gam[0, 0, 1], 0.0, atol=1e-15)
    # at y=1/4: Gamma^2_11 = pi * eps * sin(pi/2)
    gam = christoffel(m, (0.1, 0.25))
    np.testing.assert_allclose(gam[1, 0, 0], np.pi * eps, rtol=1e-13)
    # symmetry in the lower indices
    np.testing.assert_allclose(gam, gam.transpose(0, 2, 1), atol=1e-15)


def test_christoffel_matches_finite_differences():
    m = hill_metric(0.07)
    rng = np.random.default_rng(11)
    pts = rng.random((5, 2))
    h = 1e-6
    for x in pts:
        g = eval_metric(m, x)
        ginv = np.linalg.inv(g)
        dg = np.empty((2, 2, 2))
        for a in range(2):
            e = np.zeros(2)
            e[a] = h
            dg[a] = (eval_metric(m, x + e) - eval_metric(m, x - e)) / (2 * h)
        gam_fd = 0.5 * np.einsum(
            "kl,ijl->kij", ginv, dg.transpose(1, 2, 0) + dg.transpose(2, 1, 0) - dg
        )
        # dg[a,i,j] -> bracket[i,j,l]: d_i g_jl + d_j g_il - d_l g_ij
        bracket = np.empty((2, 2, 2))
        for i in range(2):
            for j in range(2):
                for l in range(2):
                    bracket[i, j, l] = dg[i, j, l] + dg[j, i, l] - dg[l, i, j]
        gam_fd = 0.5 * np.einsum("kl,ijl->kij", ginv, bracket)
        np.testing.assert_allclose(christoffel(m, x), gam_fd, atol=1e-8)


def test_curvature_flat_metrics_vanish():
    np.testing.assert_allclose(curvature(euclidean_metric(), (0.2, 0.6)), 0.0)
    np.testing.assert_allclose(curvature(lorentz_metric(), (0.2, 0.6)), 0.0)


def test_curvature_matches_finite_difference_of_christoffel():
    m = hill_metric(0.1)
    rng = np.random.default_rng(5)
    h = 1e-6
    for x in rng.random((4, 2)):
        gam = christoffel(m, x)
        dgam = np.empty((2, 2, 2, 2))
        for a in range(2):
            e = np.zeros(2)
            e[a] = h
            dgam[a] = (christoffel(m, x + e) - christoffel(m, x - e)) / (2 * h)
        r_fd = np.empty((2, 2, 2, 2))
        for l in range(2):
            for i in range(2):
                for j in range(2):
                    for k in range(2):
                        r_fd[l, i, j, k] = (
                            dgam[i, l, j, k]
                            - dgam[j, l, i, k]
                            + sum(gam[l, i, mm] * gam[mm, j, k] for mm in range(2))
                            - sum(gam[l, j, mm] * gam[mm, i, k] for mm in range(2))
                        )
        np.testing.assert_allclose(curvature(m, x), r_fd, atol=1e-6)


def test_curvature_antisymmetry_and_bianchi():
    m = hill_metric(0.1)
    rng = np.random.default_rng(7)
    for x in rng.random((6, 2)):
        r = curvature(m, x)
        np.testing.assert_allclose(r, -r.transpose(0, 2, 1, 3), atol=1e-12)
        bianchi = r + r.transpose(0, 2, 3, 1) + r.transpose(0, 3, 1, 2)
        np.testing.assert_allclose(bianchi, 0.0, atol=1e-10)


def test_metric_compatibility():
    # covariant derivative of g vanishes: d_k g_ij = Gamma^m_ki g_mj + Gamma^m_kj g_im
    m = hill_metric(0.1)
    rng = np.random.default_rng(9)
    pts = rng.random((8, 2))
    f = m.fields(pts, order=1)
    lhs = f.dg
    rhs = np.einsum("pmki,pmj->pkij", f.gamma, f.g) + np.einsum(
        "pmkj,pim->pkij", f.gamma, f.g
    )
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_build_index_metric_axis_distribution():
    gr = AuxRiemannianMetric.euclidean(2)
    delta = Distribution.from_constant_vectors([[0.0, 1.0]])
    m = build_index_metric(gr, delta)
    np.testing.assert_allclose(eval_metric(m, (0.3, 0.3)), np.diag([1.0, -1.0]), atol=1e-12)
    assert m.declared_index == 1


def test_build_index_metric_diagonal_distribution():
    gr = AuxRiemannianMetric.euclidean(2)
    v = np.array([1.0, 1.0]) / np.sqrt(2.0)
    delta = Distribution.from_constant_vectors([v])
    m = build_index_metric(gr, delta)
    g = eval_metric(m, (0.1, 0.8))
    w, vecs = np.linalg.eigh(g)
    np.testing.assert_allclose(sorted(w), [-1.0, 1.0], atol=1e-12)
    neg = vecs[:, np.argmin(w)]
    assert abs(abs(neg @ v) - 1.0) < 1e-10
    assert metric_index(m, gr, (0.5, 0.5)) == 1


def test_build_index_metric_full_rank_gives_minus_gr():
    gr = AuxRiemannianMetric.euclidean(2)
    delta = Distribution.from_constant_vectors(np.eye(2))
    m = build_index_metric(gr, delta)
    np.testing.assert_allclose(eval_metric(m, (0.6, 0.2)), -np.eye(2), atol=1e-12)
    assert m.declared_index == 2


def test_build_index_metric_nonconstant_frame():
    gr = AuxRiemannianMetric.euclidean(2)
    frame = [
        TrigPoly.constant(1.0, 2),
        TrigPoly(2, {(1, 0): (0.3, 0.0)}),
    ]
    delta = Distribution([frame])
    m = build_index_metric(gr, delta, freq_cap=24, fit_tol=1e-9)
    gr_obj = AuxRiemannianMetric.euclidean(2)
    assert metric_index(m, gr_obj, (0.23, 0.71)) == 1
    # g(v, w) = 0 for v in the distribution, w orthogonal to it
    for x in np.random.default_rng(3).random((5, 2)):
        e = np.array([frame[0](x), frame[1](x)])
        w = np.array([-e[1], e[0]])
        g = eval_metric(m, x)
        assert abs(e @ g @ w) < 1e-8
        np.testing.assert_allclose(e @ g @ e, -(e @ e), atol=1e-8)


def test_rank_deficient_frames_rejected():
    with pytest.raises(RankDeficient):
        Distribution.from_constant_vectors([[1.0, 0.0], [1.0, 0.0]])


def test_causal_character_lorentz():
    m = lorentz_metric()
    assert causal_character(m, (0.0, 0.0), (1.0, 0.0)) == ("spacelike", 1.0)
    label, c = causal_character(m, (0.0, 0.0), (1.0, 1.0))
    assert label == "lightlike" and abs(c) < 1e-12
    assert causal_character(m, (0.0, 0.0), (0.0, 1.0)) == ("timelike", -1.0)
    with pytest.raises(ZeroVelocity):
        causal_character(m, (0.0, 0.0), (0.0, 0.0))


def test_metric_serialization_roundtrip(tmp_path):
    m = hill_metric(0.1)
    path = tmp_path / "metric.json"
    save_metric(m, path)
    m2 = load_metric(path)
    assert m2.id == m.id
    pts = np.random.default_rng(1).random((10, 2))
    np.testing.assert_array_equal(m.fields(pts).g, m2.fields(pts).g)


def test_index_constant_on_grid_for_dim3():
    m = TorusMetric(
        TensorField.from_matrix(np.diag([1.0, 1.0, -1.0])), declared_index=1
    )
    gr = AuxRiemannianMetric.euclidean(3)
    counts = metric_index(m, gr, np.random.default_rng(0).random((20, 3)))
    assert np.all(counts == 1)
