import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from orbitfib.algebra import cartan
from orbitfib.errors import InputError
from orbitfib.fibration import height
from orbitfib.sl2 import (
    FSCategoryReport,
    SurfacePoint,
    fibre_points,
    fs_report,
    morse_perturbation_generators,
    singular_fibre_membership,
    thimble,
    thimble_lagrangian_check,
    thimble_point,
    vanishing_cycle_intersections,
)

H2 = cartan(1, -1)
finite = st.floats(-3, 3, allow_nan=False)
nonzero = st.complex_numbers(min_magnitude=1e-2, max_magnitude=1e2)


def test_fibre_points_examples():
    assert fibre_points(0, [1])[0] == SurfacePoint(0, 1, 1)
    assert fibre_points(0, [2])[0] == SurfacePoint(0, 2, 0.5)
    assert fibre_points(1, [1])[0] == SurfacePoint(0.5, 1, 0.75)


def test_fibre_points_errors():
    with pytest.raises(InputError):
        fibre_points(0, [0])
    with pytest.raises(InputError):
        fibre_points(2, [1])
    with pytest.raises(InputError):
        fibre_points(-2, [1])


@given(st.complex_numbers(max_magnitude=1.9), nonzero)
def test_fibre_points_on_surface(lam, b):
    (p,) = fibre_points(lam, [b])
    assert p.residual < 1e-10
    assert height(p.matrix, H2) == pytest.approx(lam, abs=1e-12)
    assert np.allclose(sorted(np.linalg.eigvals(p.matrix), key=lambda z: z.real), [-1, 1], atol=1e-6)


@given(nonzero, nonzero)
def test_regular_fibre_parametrization_injective(b1, b2):
    p1, p2 = fibre_points(0, [b1, b2])
    assert (p1 == p2) == (b1 == b2)


def test_singular_membership_examples():
    assert singular_fibre_membership(SurfacePoint(1, 5, 0), 2) == (True, "n+")
    assert singular_fibre_membership(SurfacePoint(1, 0, 5), 2) == (True, "n-")
    assert singular_fibre_membership(SurfacePoint(1, 1, 1), 2) == (False, None)
    assert singular_fibre_membership(SurfacePoint(1, 0, 0), 2) == (True, "critical")
    assert singular_fibre_membership(SurfacePoint(-1, 0, 0), -2) == (True, "critical")
    assert singular_fibre_membership(SurfacePoint(-1, 0, 5), -2) == (True, "n+")
    assert singular_fibre_membership(SurfacePoint(1, 5, 0), -2) == (False, None)
    with pytest.raises(InputError):
        singular_fibre_membership(SurfacePoint(1, 0, 0), 1)


@given(st.sampled_from([2, -2]), st.complex_numbers(max_magnitude=10), st.booleans())
def test_singular_fibre_is_union_of_lines(which, t, upper):
    a = which / 2
    p = SurfacePoint(a, t, 0) if upper else SurfacePoint(a, 0, t)
    member, tag = singular_fibre_membership(p, which)
    assert member and p.residual < 1e-10
    if abs(t) < 1e-10:
        assert tag == "critical"
    else:
        assert tag in ("n+", "n-")


def test_thimble_point_examples():
    assert thimble_point(2, 0.3) == SurfacePoint(1, 0, 0)
    assert thimble_point(-2, 1.1) == SurfacePoint(-1, 0, 0)
    p = thimble_point(0, 0)
    assert (p.x, p.y, p.z) == (0, 1, 1)
    q = thimble_point(0, math.pi)
    assert q.y == pytest.approx(-1) and q.z == pytest.approx(-1)
    with pytest.raises(InputError):
        thimble_point(2.5, 0)


@given(st.floats(-2, 2), finite)
def test_thimble_points_on_surface(lam, t):
    p = thimble_point(lam, t)
    assert p.residual < 1e-10
    assert p.f == pytest.approx(lam)
    q = thimble_point(lam, t + 2 * math.pi)
    assert abs(p.y - q.y) < 1e-12 and abs(p.z - q.z) < 1e-12


def test_thimble_structure():
    th = thimble(2)
    assert th.path[0] == 0 and th.path[-1] == 2
    radii = [abs(c[0].y) for c in th.circles]
    assert radii[0] == 1 and radii[-1] == 0
    assert all(a >= b for a, b in zip(radii, radii[1:]))
    for lam, circle in zip(th.path, th.circles):
        assert all(p.residual < 1e-10 and abs(p.f - lam) < 1e-12 for p in circle)
    # at lambda = 0 the circle is the vanishing cycle (0, e^{it}, e^{-it})
    assert all(abs(p.y * p.z - 1) < 1e-12 for p in th.circles[0])


@pytest.mark.parametrize("which", [2, -2])
def test_thimble_lagrangian(which):
    v = thimble_lagrangian_check(which, grid=(20, 20))
    assert v.max_abs_omega < 1e-8
    assert v.sample_count == 400


def test_morse_generators_default():
    gens = morse_perturbation_generators(2)
    assert len(gens) == 2
    assert sorted(g.morse_index for g in gens) == [0, 1]
    assert sorted(g.degree for g in gens) == [0, 1]
    assert {round(g.theta, 9) for g in gens} == {0.0, round(math.pi, 9)}


@pytest.mark.parametrize("m", [2, 4, 6, 10])
def test_intersection_counts(m):
    assert vanishing_cycle_intersections(m) == m
    assert vanishing_cycle_intersections(m, eps=1e-3) == m


@pytest.mark.parametrize("m", [0, 1, 3])
def test_intersection_count_rejects_odd(m):
    with pytest.raises(InputError):
        vanishing_cycle_intersections(m)


def test_fs_report():
    fs = fs_report()
    assert fs.objects == (("L_0", 0), ("L_1", 1))
    assert fs.degrees == (0, 1)
    assert fs.hom_ranks == {(0, 1): 2, (0, 0): 1, (1, 1): 1, (1, 0): 0}
    assert fs.hom_ranks[(0, 1)] == vanishing_cycle_intersections(2) == fs.intersection_count
    assert len(fs.products_nontrivial) == 2


def test_fs_report_invariants():
    with pytest.raises(ValueError):
        FSCategoryReport((("a", 0), ("b", 1)), {(0, 0): 1, (1, 1): 1, (1, 0): 3}, (), "", 0)
    with pytest.raises(ValueError):
        FSCategoryReport((("a", 0),), {(0, 0): 2}, (), "", 0)
