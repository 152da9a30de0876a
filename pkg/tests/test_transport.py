import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from orbitfib.algebra import FormConfig, cartan, random_element
from orbitfib.errors import FlowAborted, InputError, SegmentTooCloseError, SingularPointError
from orbitfib.fibration import (
    OrbitPoint,
    commutator_norm,
    differential,
    height,
    random_orbit_point,
    tangent_basis,
)
from orbitfib.transport import (
    FlowConfig,
    check_segment,
    default_epsilon,
    estimate_bracket_constant,
    fibre_samples,
    flow,
    read_jsonl,
    segment_distance,
    transport_fibre,
    write_jsonl,
    z_field,
    z_field_raw,
    z_jacobian_norm,
)
from orbitfib.weyl import suggest_general_position

from conftest import antidiag

seeds = st.integers(0, 2**32 - 1)
H2 = cartan(1, -1)


def random_pair(n, rng):
    d = rng.standard_normal(n)
    H0 = cartan(*(d - d.mean()))
    return H0, suggest_general_position(H0, seed=int(rng.integers(2**31)))


def test_raw_field_worked_example():
    x = antidiag(1, 1)
    Z = z_field_raw(x, H2)
    assert np.allclose(Z, np.diag([-0.5, 0.5]), atol=1e-15)
    assert differential(x, Z, H2) == pytest.approx(-1, abs=1e-12)


def test_normalized_field_worked_example():
    x = antidiag(1, 1)
    Z = z_field(x, H2)
    assert np.allclose(Z, np.diag([0.5, -0.5]), atol=1e-15)
    assert differential(x, Z, H2) == pytest.approx(1, abs=1e-12)
    assert differential(x, 1j * Z, H2) == pytest.approx(1j, abs=1e-12)


def test_field_undefined_at_singularities():
    with pytest.raises(SingularPointError):
        z_field(H2.matrix, H2)


@given(seeds, st.integers(2, 3))
def test_transversality(seed, n):
    rng = np.random.default_rng(seed)
    H0, H = random_pair(n, rng)
    x = random_orbit_point(H0, rng).x
    if commutator_norm(x, H) < 1e-3:
        return
    Z = z_field(x, H)
    assert abs(differential(x, Z, H) - 1) < 1e-10
    assert tangent_basis(x).contains(Z, 1e-9)
    Z3 = z_field(x, H, FormConfig(3.0))
    assert differential(x, Z3, H, FormConfig(3.0)) == pytest.approx(1, abs=1e-10)
    assert np.allclose(3.0 * Z3, Z, atol=1e-10)
    raw = z_field_raw(x, H)
    assert differential(x, raw, H) == pytest.approx(-1, abs=1e-9)


def test_flow_zero_time():
    x0 = OrbitPoint.of(antidiag(1, 1), H2)
    traj = flow(x0, 0.0, 0.0, H=H2)
    assert len(traj) == 1 and traj[0].f_drift == 0


def test_flow_sl2_to_level_one():
    x0 = OrbitPoint.of(antidiag(1, 1), H2)
    traj = flow(x0, 0.0, 1.0, H=H2)
    end = traj[-1]
    assert abs(end.f_value - 1) < 1e-6
    assert max(s.charpoly_drift for s in traj) < 1e-6
    # lands on a = 1/2, bc = 3/4
    X = end.point.x
    assert X[0, 0] == pytest.approx(0.5, abs=1e-6)
    assert X[0, 1] * X[1, 0] == pytest.approx(0.75, abs=1e-6)
    assert all(s.singular_distance > default_epsilon(H2) for s in traj)


def test_flow_rejects_bad_input():
    x0 = OrbitPoint.of(antidiag(1, 1), H2)
    with pytest.raises(InputError):
        flow(x0, 0.0, -1.0, H=H2)
    with pytest.raises(InputError):
        flow(x0, 0.0, 1.0)
    with pytest.raises(InputError):
        FlowConfig(step=0)


def test_flow_aborts_near_singularity():
    x0 = OrbitPoint.of(antidiag(1, 1), H2)
    with pytest.raises(FlowAborted) as info:
        flow(x0, 0.0, 2.0, FlowConfig(step=1e-2), H=H2)
    assert info.value.reason == "epsilon"
    assert len(info.value.trajectory) > 1


def test_flow_aborts_on_drift_budget():
    x0 = OrbitPoint.of(antidiag(1, 1), H2)
    with pytest.raises(FlowAborted) as info:
        flow(x0, 0.0, 1.0, FlowConfig(step=0.5, max_charpoly_drift=1e-14, max_f_drift=1e-14), H=H2)
    assert info.value.reason in ("f_drift", "charpoly_drift")


def test_default_epsilon():
    # singularities of sl(2) are 2 sqrt(2) apart
    assert default_epsilon(H2) == pytest.approx(math.sqrt(2) / 2)
    assert default_epsilon(cartan(0, 0)) == 1e-2


def test_segment_distance():
    assert segment_distance(2, 0, 1) == 1
    assert segment_distance(1j, -1, 1) == 1
    assert segment_distance(0.5, 0, 1) == 0
    assert segment_distance(3, 1, 1) == 2


def test_check_segment():
    check_segment(0, 1, H2, H2, FormConfig(), 0.5)
    with pytest.raises(SegmentTooCloseError) as info:
        check_segment(0, 1.8, H2, H2, FormConfig(), 0.5)
    assert info.value.critical_value == 2


@pytest.fixture(scope="module")
def sl2_transport():
    samples = fibre_samples(H2, H2, 0, 10, seed=3)
    ends = transport_fibre(samples, 0, 1, H=H2)
    back = transport_fibre(ends, 1, 0, H=H2)
    return samples, ends, back


def test_fibre_samples_sl2():
    samples = fibre_samples(H2, H2, 0.4 + 0.1j, 5, seed=1)
    for p in samples:
        assert height(p.x, H2) == pytest.approx(0.4 + 0.1j, abs=1e-12)
        assert p.charpoly_drift < 1e-12


def test_fibre_samples_sl3():
    H0 = cartan(1, 0, -1)
    H = cartan(3, 1, -4)
    samples = fibre_samples(H0, H, 0.5, 2, seed=0)
    for p in samples:
        assert abs(height(p.x, H) - 0.5) < 1e-6
        assert p.charpoly_drift < 1e-6


def test_transport_lands_on_target_fibre(sl2_transport):
    _, ends, _ = sl2_transport
    for p in ends:
        assert p.x[0, 0] == pytest.approx(0.5, abs=1e-6)
        assert p.x[0, 1] * p.x[1, 0] == pytest.approx(0.75, abs=1e-6)
        assert p.charpoly_drift < 1e-6


def test_transport_round_trip(sl2_transport):
    samples, _, back = sl2_transport
    for a, b in zip(samples, back):
        assert np.max(np.abs(a.x - b.x)) < 1e-5


def test_transport_identity():
    samples = fibre_samples(H2, H2, 0, 3, seed=1)
    ends = transport_fibre(samples, 0, 0, H=H2)
    for a, b in zip(samples, ends):
        assert np.array_equal(a.x, b.x)


def test_transport_complex_direction():
    samples = fibre_samples(H2, H2, 0, 2, seed=5)
    ends = transport_fibre(samples, 0, 0.6j, FlowConfig(step=5e-3), H=H2)
    for p in ends:
        assert abs(height(p.x, H2) - 0.6j) < 1e-6


def test_bracket_constant():
    est = estimate_bracket_constant(3, trials=100, seed=0)
    assert est.M == pytest.approx(math.sqrt(2))
    assert est.M <= 2
    rng = np.random.default_rng(0)
    for _ in range(20):
        X = random_element(3, rng)
        Y = rng.standard_normal() * X + 0.0
        ratio = np.linalg.norm(X @ Y - Y @ X) / (np.linalg.norm(X) * np.linalg.norm(Y))
        assert ratio < 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_lipschitz_bound_dominates_jacobian(seed):
    rng = np.random.default_rng(seed)
    n = 2 + seed % 2
    H0, H = random_pair(n, rng)
    p = random_orbit_point(H0, rng)
    if commutator_norm(p.x, H) < 1e-2:
        return
    est = estimate_bracket_constant(n, trials=10, seed=seed, points=[p.x], H=H)
    assert z_jacobian_norm(p.x, H) <= est.bound_at[0]


def test_jsonl_round_trip():
    x0 = OrbitPoint.of(antidiag(1, 1), H2)
    traj = flow(x0, 0.0, 0.01, H=H2)
    buf = io.StringIO()
    write_jsonl(traj, buf, sample=4)
    records = read_jsonl(io.StringIO(buf.getvalue()))
    assert len(records) == len(traj)
    assert records[0]["sample"] == 4
    assert records[-1]["t"] == pytest.approx(0.01)
    assert records[-1]["f_value"]["re"] == pytest.approx(0.01, abs=1e-12)
    assert len(records[0]["point"]) == 4
