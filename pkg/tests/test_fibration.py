import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from orbitfib.algebra import (
    FormConfig,
    bracket,
    cartan,
    elementary,
    random_element,
    real_rank,
    trace_form,
)
from orbitfib.errors import InputError, NotTangentError, SingularPointError
from orbitfib.fibration import (
    OrbitPoint,
    analyze_fibration,
    betti_predictions,
    charpoly_drift,
    commutator_norm,
    critical_points,
    differential,
    fibre_tangent_basis,
    height,
    hessian_certificate,
    hessian_form,
    random_orbit_point,
    sample_orbit_point,
    tangent_basis,
)
from orbitfib.weyl import suggest_general_position, weyl_orbit

from conftest import antidiag

seeds = st.integers(0, 2**32 - 1)
H2 = cartan(1, -1)


def random_pair(n, rng):
    d = rng.standard_normal(n)
    H0 = cartan(*(d - d.mean()))
    return H0, suggest_general_position(H0, seed=int(rng.integers(2**31)))


def regular_point(H0, H, rng):
    while True:
        p = random_orbit_point(H0, rng)
        if commutator_norm(p.x, H) > 1e-3:
            return p


def test_sample_orbit_point_identity():
    p = sample_orbit_point(H2, np.zeros((2, 2)))
    assert np.allclose(p.x, H2.matrix)
    assert p.charpoly_drift == 0


def test_sample_orbit_point_rotation():
    A = math.pi / 4 * (elementary(2, 0, 1) - elementary(2, 1, 0))
    p = sample_orbit_point(H2, A)
    # rotation by pi/4 conjugates diag(1,-1) into the antidiagonal (0, 1; 1, 0) up to sign
    assert np.allclose(np.abs(p.x), [[0, 1], [1, 0]])
    assert np.allclose(sorted(np.linalg.eigvals(p.x).real), [-1, 1])


def test_sample_orbit_point_sl3(rng):
    H0 = cartan(1, 0, -1)
    p = sample_orbit_point(H0, random_element(3, rng, 0.5))
    assert p.charpoly_drift < 1e-8


def test_sample_orbit_point_rejects_huge():
    with pytest.raises(InputError):
        sample_orbit_point(H2, 100 * elementary(2, 0, 1))


@given(seeds, st.integers(2, 4))
def test_orbit_points_keep_eigenvalues(seed, n):
    rng = np.random.default_rng(seed)
    d = rng.standard_normal(n)
    p = random_orbit_point(cartan(*(d - d.mean())), rng)
    assert p.charpoly_drift < 1e-8


def test_height_examples():
    assert height(H2, H2) == 2
    assert height(antidiag(3, 4), H2) == 0
    a = 0.7 - 0.2j
    assert height(np.array([[a, 5], [1, -a]]), H2) == pytest.approx(2 * a)
    assert height(H2, H2, FormConfig(3)) == 6


def test_differential_examples(rng):
    x = antidiag(1, 1)
    V = bracket(x, H2.matrix)
    assert differential(x, V, H2) == 0
    # df_x([x, A]) = <[H, x], A> for arbitrary A
    for _ in range(100):
        A = random_element(2, rng)
        lhs = differential(x, bracket(x, A), H2)
        rhs = trace_form(bracket(H2.matrix, x), A)
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_differential_rejects_normal_vectors():
    with pytest.raises(NotTangentError):
        differential(H2.matrix, H2.matrix, H2)


@given(seeds, st.integers(2, 3))
def test_holomorphicity_and_submersion(seed, n):
    rng = np.random.default_rng(seed)
    H0, H = random_pair(n, rng)
    x = regular_point(H0, H, rng).x
    tb = tangent_basis(x)
    V = sum(c * v for c, v in zip(rng.standard_normal(tb.complex_dim), tb.vectors))
    assert differential(x, 1j * V, H) == pytest.approx(1j * differential(x, V, H), abs=1e-10)
    assert max(abs(differential(x, v, H)) for v in tb.vectors) > 1e-6


@given(seeds, st.integers(2, 3))
def test_df_vanishes_at_weyl_points(seed, n):
    rng = np.random.default_rng(seed)
    H0, H = random_pair(n, rng)
    for p in weyl_orbit(H0).points:
        tb = tangent_basis(p)
        assert max((abs(differential(p, v, H)) for v in tb.vectors), default=0) < 1e-10


def test_tangent_basis_at_h0():
    tb = tangent_basis(H2.matrix)
    assert tb.complex_dim == 2
    assert tb.contains(elementary(2, 0, 1)) and tb.contains(elementary(2, 1, 0))
    assert not tb.contains(H2.matrix)
    assert len(tb.realified()) == 4


@pytest.mark.parametrize("n", [2, 3, 4])
def test_tangent_dim_regular(n, rng):
    d = np.arange(n, dtype=float)
    H0 = cartan(*(d - d.mean()))
    x = random_orbit_point(H0, rng).x
    assert tangent_basis(x).complex_dim == n * (n - 1)


def test_tangent_dim_with_stabilizer(rng):
    x = random_orbit_point(cartan(1, 1, -2), rng).x
    assert tangent_basis(x).complex_dim == 4


def test_critical_points():
    assert set(critical_points(H2, H2)) == {H2, cartan(-1, 1)}
    pts = critical_points(cartan(1, 0, -1), cartan(3, 1, -4))
    assert len(pts) == 6
    H = cartan(3, 1, -4)
    assert all(np.allclose(bracket(p.matrix, H.matrix), 0) for p in pts)
    with pytest.raises(InputError):
        critical_points(cartan(1, 0, -1), cartan(1, 1, -2))


def test_fibre_tangent_sl2():
    x = antidiag(2, 0.5)
    fb = fibre_tangent_basis(x, H2)
    assert fb.complex_dim == 1
    assert real_rank(fb.realified()) == 2
    assert all(abs(differential(x, v, H2)) < 1e-10 for v in fb.vectors)
    assert fb.contains(bracket(x, H2.matrix))


def test_fibre_tangent_rejects_singular_point():
    with pytest.raises(SingularPointError):
        fibre_tangent_basis(H2.matrix, H2)


@given(seeds, st.integers(2, 3))
def test_fibre_tangent_properties(seed, n):
    rng = np.random.default_rng(seed)
    H0, H = random_pair(n, rng)
    x = regular_point(H0, H, rng).x
    fb = fibre_tangent_basis(x, H)
    assert fb.complex_dim == tangent_basis(x).complex_dim - 1
    assert all(abs(differential(x, v, H)) < 1e-10 for v in fb.vectors)
    assert fb.contains(bracket(x, H.matrix), 1e-8)


def test_hessian_sl2_canonical():
    cert = hessian_certificate(H2, H2)
    assert cert.min_singular_value == pytest.approx(4, abs=1e-9)
    assert cert.max_singular_value == pytest.approx(4, abs=1e-9)
    assert cert.nondegenerate
    assert np.allclose(cert.gram, cert.gram.T, atol=1e-10)
    assert hessian_form(H2.matrix, H2, elementary(2, 0, 1), elementary(2, 1, 0)) == pytest.approx(4)
    assert hessian_certificate(cartan(-1, 1), H2).nondegenerate


def test_hessian_rejects_regular_point():
    with pytest.raises(SingularPointError):
        hessian_certificate(antidiag(1, 1), H2)


@pytest.mark.parametrize("seed", range(20))
def test_hessian_spectrum_oracle(seed):
    # singular values are c |alpha(H) alpha(x0)|, each with multiplicity 4 per unordered pair
    rng = np.random.default_rng(seed)
    n = 2 + seed % 2
    H0, H = random_pair(n, rng)
    c = 1.5
    for p in weyl_orbit(H0).points:
        cert = hessian_certificate(p, H, FormConfig(c))
        expected = sorted(
            c * abs((H.diag[i] - H.diag[j]) * (p.diag[i] - p.diag[j]))
            for i in range(n) for j in range(i + 1, n) for _ in range(4))
        got = sorted(np.linalg.svd(cert.gram, compute_uv=False))
        assert np.allclose(got, expected, atol=1e-9)
        assert cert.nondegenerate and cert.min_singular_value > 1e-8
        assert np.allclose(cert.gram, cert.gram.T, atol=1e-10)


def test_betti_predictions():
    assert betti_predictions(2) == (1, 0)
    assert betti_predictions(6) == (5, 4)
    assert betti_predictions(1) == (0, 0)


@pytest.mark.parametrize("H0, H, k", [
    (cartan(1, -1), cartan(1, -1), 2),
    (cartan(1, 0, -1), cartan(3, 1, -4), 6),
    (cartan(1, 1, -2), cartan(1, 0, -1), 3),
])
def test_analyze_fibration(H0, H, k):
    a = analyze_fibration(H0, H)
    assert a.k == k
    assert (a.betti_regular, a.betti_singular) == (k - 1, k - 2)
    assert a.passed and len(a.hessians) == k


def test_orbit_point_wrapper():
    p = OrbitPoint.of(antidiag(1, 1), H2)
    assert p.n == 2 and p.charpoly_drift == 0
    assert np.allclose(np.asarray(p), antidiag(1, 1))
    assert charpoly_drift(antidiag(2, 2), H2) == pytest.approx(3)
