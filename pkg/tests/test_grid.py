import math

import numpy as np
import pytest
import scipy.sparse as sps
from hypothesis import given, settings

from conftest import seeds, smooth
from hdch.errors import InvalidParams, NonZeroMean
from hdch.grid import Grid


def dense_fd_neumann(nx, ny, hx, hy):
    def d2(n, h):
        m = np.diag(np.full(n, 2.0)) - np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)
        m[0, 0] = m[-1, -1] = 1.0
        return m / h**2
    return np.kron(d2(nx, hx), np.eye(ny)) + np.kron(np.eye(nx), d2(ny, hy))


@pytest.mark.parametrize("nx,ny", [(3, 8), (8, 2), (7, 8), (8, 9)])
def test_rejects_bad_sizes(nx, ny):
    with pytest.raises(InvalidParams):
        Grid(nx, ny)


def test_rejects_bad_lengths():
    with pytest.raises(InvalidParams):
        Grid(8, 8, 0.0, 1.0)


def test_cell_centres_and_spacing(rect):
    X, Y = rect.coords()
    assert rect.hx == pytest.approx(2.0 / 16)
    assert X[0, 0] == pytest.approx(rect.hx / 2)
    assert Y[0, -1] == pytest.approx(3.0 - rect.hy / 2)


def test_eigenvalue_table(rect):
    lam = rect.eigenvalues
    assert lam[0, 0] == 0.0
    assert np.all(lam.ravel()[1:] > 0)
    assert lam[2, 3] == pytest.approx((2 * math.pi / 2.0) ** 2 + (3 * math.pi / 3.0) ** 2)
    with pytest.raises(ValueError):
        lam[0, 0] = 1.0


def test_mean_matches_naive_sum(rect):
    f = np.random.default_rng(0).standard_normal(rect.shape)
    naive = 0.0
    for v in f.ravel():
        naive += v
    naive /= f.size
    assert rect.mean(f) == pytest.approx(naive, rel=1e-14, abs=1e-15)


def test_mean_of_constant_and_cosine(rect):
    X, _ = rect.coords()
    assert rect.mean(np.full(rect.shape, 2.5)) == pytest.approx(2.5)
    assert abs(rect.mean(np.cos(math.pi * X / rect.lx))) < 1e-15


def test_laplacian_eigenmode(rect):
    X, Y = rect.coords()
    f = np.cos(math.pi * X / rect.lx)
    assert np.allclose(rect.laplacian_neumann(f), (math.pi / rect.lx) ** 2 * f, atol=1e-12)
    assert np.allclose(rect.laplacian_neumann(np.full(rect.shape, 3.0)), 0.0, atol=1e-12)


def test_laplacian_matches_dense_fd_at_second_order():
    # the five-point symbol differs from k^2 by at most k^4 h^2 / 12 per axis
    errs = []
    for n in (8, 16, 32):
        g = Grid(n, n, 1.0, 1.0)
        X, Y = g.coords()
        f = np.cos(math.pi * X) * np.cos(2 * math.pi * Y) + np.cos(3 * math.pi * Y)
        fd = (dense_fd_neumann(n, n, g.hx, g.hy) @ f.ravel()).reshape(g.shape)
        errs.append(np.max(np.abs(fd - g.laplacian_neumann(f))))
        bound = g.hx**2 / 12 * (math.pi**4 + (2 * math.pi) ** 4 + (3 * math.pi) ** 4)
        assert errs[-1] <= bound
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)


def test_fd_matrix_helper_matches_dense():
    from hdch.elliptic import fd_neumann_matrix

    g = Grid(8, 6, 1.0, 2.0)
    assert np.allclose(fd_neumann_matrix(g).toarray(), dense_fd_neumann(8, 6, g.hx, g.hy))
    assert isinstance(fd_neumann_matrix(g), sps.csc_matrix)


def test_inverse_laplacian(rect):
    X, _ = rect.coords()
    f = np.cos(math.pi * X / rect.lx)
    assert np.allclose(rect.inv_laplacian_neumann(f), f / (math.pi / rect.lx) ** 2, atol=1e-12)
    assert np.all(rect.inv_laplacian_neumann(rect.zeros()) == 0.0)
    with pytest.raises(NonZeroMean):
        rect.inv_laplacian_neumann(f + 0.1)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_inverse_round_trip_and_mean(seed):
    g = Grid(16, 24, 2.0, 3.0)
    f = smooth(g, seed)
    u = g.inv_laplacian_neumann(f)
    assert abs(g.mean(u)) < 1e-14
    assert g.l2(g.laplacian_neumann(u) - f) <= 1e-10 * g.l2(f)


def test_transform_round_trip(rect):
    f = np.random.default_rng(1).standard_normal(rect.shape)
    assert rect.l2(rect.idct(rect.dct(f)) - f) <= 1e-12 * rect.l2(f)


def test_gradient_of_constant_is_zero(rect):
    gx, gy = rect.gradient(np.full(rect.shape, 4.0))
    assert np.allclose(gx, 0) and np.allclose(gy, 0)


def test_gradient_matches_analytic_partials(rect):
    X, Y = rect.coords()
    a, b = math.pi / rect.lx, math.pi / rect.ly
    f = np.cos(a * X) * np.cos(b * Y)
    gx, gy = rect.gradient(f)
    assert np.allclose(gx, -a * np.sin(a * X) * np.cos(b * Y), atol=1e-12)
    assert np.allclose(gy, -b * np.cos(a * X) * np.sin(b * Y), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seeds, seeds)
def test_operator_identities(s1, s2):
    g = Grid(16, 24, 2.0, 3.0)
    f, h = smooth(g, s1), smooth(g, s2)
    gx, gy = g.gradient(f)
    hx, hy = g.gradient(h)
    # div = -grad^T, div grad = -A, curl grad = 0
    assert abs(g.inner(g.divergence(hx, hy), f) + g.inner(gx, hx) + g.inner(gy, hy)) < 1e-10
    assert g.l2(g.divergence(gx, gy) + g.laplacian_neumann(f)) < 1e-10 * (1 + g.l2(g.laplacian_neumann(f)))
    assert g.l2(g.curl2d(gx, gy)) < 1e-10 * (1 + g.h1_semi(f))


@settings(max_examples=25, deadline=None)
@given(seeds, seeds)
def test_duality_interpolation_poincare(s1, s2):
    g = Grid(16, 24, 2.0, 3.0)
    f, h = smooth(g, s1), smooth(g, s2)
    lhs = g.inner(f, g.inv_laplacian_neumann(h))
    rhs = g.inner(g.inv_laplacian_neumann(f), h)
    assert abs(lhs - rhs) <= 1e-10 * g.l2(f) * g.l2(h)
    assert g.l2(f) ** 2 <= (1 + 1e-8) * g.v0_dual(f) * g.h1_semi(f)
    assert g.l2(f - g.mean(f)) <= (1 + 1e-12) * g.poincare_constant * g.h1_semi(f)


def test_poincare_constant_is_sharp(rect):
    # the lowest mode runs along the longer side
    _, Y = rect.coords()
    f = np.cos(math.pi * Y / rect.ly)
    assert rect.l2(f) == pytest.approx(rect.poincare_constant * rect.h1_semi(f), rel=1e-12)


def test_norms(rect):
    X, _ = rect.coords()
    f = np.cos(math.pi * X / rect.lx)
    n = rect.norms(f, p=4)
    assert n["v0_dual"] == pytest.approx(n["l2"] / (math.pi / rect.lx), rel=1e-12)
    assert n["linf"] <= 1.0
    zero = rect.norms(rect.zeros())
    assert all(v == 0.0 for v in zero.values())
    with pytest.raises(NonZeroMean):
        rect.v0_dual(f + 1.0)


def test_lp_norms_are_ordered_on_unit_area():
    g = Grid(16, 16, 1.0, 1.0)
    f = smooth(g, 3)
    vals = [g.lp(f, p) for p in (2, 4, 8, np.inf)]
    assert vals == sorted(vals)


def test_resample_round_trip_and_exactness():
    coarse, fine = Grid(16, 24, 2.0, 3.0), Grid(32, 48, 2.0, 3.0)
    f = smooth(coarse, 5)
    assert coarse.l2(fine.resample(coarse.resample(f, fine), coarse) - f) < 1e-13
    X, Y = fine.coords()
    mode = np.cos(3 * math.pi * X / 2.0) * np.cos(2 * math.pi * Y / 3.0)
    Xc, Yc = coarse.coords()
    expect = np.cos(3 * math.pi * Xc / 2.0) * np.cos(2 * math.pi * Yc / 3.0)
    assert np.allclose(fine.resample(mode, coarse), expect, atol=1e-13)
    with pytest.raises(InvalidParams):
        coarse.resample(f, Grid(16, 24, 1.0, 3.0))


def test_shape_mismatch_is_rejected(rect):
    with pytest.raises(InvalidParams):
        rect.check(np.zeros((4, 4)))
