import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose
from scipy.linalg import expm

from unpolarized.angular import EulerAngles, HalfInt
from unpolarized.fixtures import all_fixtures, load_fixture
from unpolarized.metrology import (
    AxisAngle,
    fibonacci_axes,
    generator,
    orthogonality_angle,
    rotation_overlap,
    rotation_unitary,
    scan_axes,
    sensitivity,
    sensitivity_scan,
)
from unpolarized.spinstate import (
    basis_state,
    coherent_state,
    noon_state,
    random_state,
    rotate,
    stokes_expectation,
)


def test_axis_normalized():
    r = AxisAngle((0, 0, 2), 1.0)
    assert r.axis == (0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        AxisAngle((0, 0, 0), 1.0)


def test_unitary_matches_expm(rng):
    n = rng.normal(size=3)
    r = AxisAngle(n, 0.9)
    assert_allclose(rotation_unitary("5/2", r), expm(-0.9j * generator("5/2", n)), atol=1e-12)


def test_overlap_examples(rng):
    psi = random_state(3, rng)
    assert rotation_overlap(psi, AxisAngle((1, 2, 3), 0.0)) == pytest.approx(1.0)
    for S in (1, 2, 3, 5):
        assert rotation_overlap(noon_state(S), AxisAngle((0, 0, 1), math.pi / (2 * S))) < 1e-12


@given(st.integers(1, 10), st.floats(0, math.pi), st.floats(0, 2 * math.pi), st.floats(-6, 6))
def test_coherent_state_invariant_about_its_axis(twice_s, theta, phi, angle):
    psi = coherent_state(HalfInt(twice_s), theta, phi)
    axis = stokes_expectation(psi)
    assert rotation_overlap(psi, AxisAngle(axis, angle)) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("S", [1, 2, 3, 5])
def test_noon_orthogonality_angle(S):
    assert orthogonality_angle(noon_state(S), (0, 0, 1)) == pytest.approx(math.pi / (2 * S), abs=1e-9)


def test_orthogonality_angle_none_and_finite():
    assert orthogonality_angle(basis_state(3, 3), (0, 0, 1)) is None
    assert orthogonality_angle(load_fixture(3).state(), (1, 0, 0)) is not None
    with pytest.raises(ValueError):
        orthogonality_angle(noon_state(2), (0, 0, 1), eps=0)


def test_overlap_symmetries(rng):
    psi = random_state("7/2", rng)
    for _ in range(10):
        n, t = rng.normal(size=3), rng.uniform(-3, 3)
        a = rotation_overlap(psi, AxisAngle(n, t))
        assert a == pytest.approx(rotation_overlap(psi, AxisAngle(-n, -t)), abs=1e-14)
        R = EulerAngles.random(rng)
        moved = rotation_overlap(rotate(psi, R), AxisAngle(R.matrix() @ (n / np.linalg.norm(n)), t))
        assert moved == pytest.approx(a, abs=1e-10)


@pytest.mark.parametrize("S", [1, 2, 3, 5])
def test_noon_sensitivity(S):
    psi = noon_state(S)
    assert sensitivity(psi, (0, 0, 1)) == pytest.approx(S**2)
    assert sensitivity(psi, (1, 0, 0)) < S**2


def test_isotropy_of_second_order_king(rng):
    psi = load_fixture(2).state()
    values = [sensitivity(psi, rng.normal(size=3)) for _ in range(50)]
    assert np.ptp(values) < 1e-10


@pytest.mark.parametrize("twice_s", [1, 4, 7, 12])
def test_trace_identity(twice_s, rng):
    psi = random_state(HalfInt(twice_s), rng)
    s = twice_s / 2
    expected = (s * (s + 1) - np.sum(stokes_expectation(psi) ** 2)) / 3
    coord = np.mean([sensitivity(psi, e) for e in np.eye(3)])
    assert coord == pytest.approx(expected, abs=1e-12)
    assert sensitivity_scan(psi, 2000, seed=4).mean == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("rec", [r for r in all_fixtures() if r.claimed_M >= 2], ids=lambda r: str(r.S))
def test_kings_are_isotropic(rec):
    scan = sensitivity_scan(rec.state(), 500, seed=1)
    assert scan.max - scan.min < 1e-9


def test_noon_is_anisotropic():
    scan = sensitivity_scan(noon_state(3), 2000)
    assert scan.max / scan.min > 1.5


def test_small_angle_law(rng):
    psi = random_state(3, rng)
    n = rng.normal(size=3)
    var = sensitivity(psi, n)
    ratios = []
    for t in (1e-2, 1e-3):
        ratios.append(abs((1 - rotation_overlap(psi, AxisAngle(n, t))) - t * t * var) / t**4)
    # 1 - |<U>|^2 = Var t^2 + C t^4 + ...: the scaled remainder settles to C
    assert ratios[1] == pytest.approx(ratios[0], rel=1e-2)
    assert ratios[0] < 10 * 3**4


def test_axes_lattices():
    f = fibonacci_axes(100)
    assert_allclose(np.linalg.norm(f, axis=1), 1)
    a = scan_axes(2000)
    assert len(a) >= 2000 and len(a) % 12 == 0
    assert_allclose(a.T @ a / len(a), np.eye(3) / 3, atol=1e-14)
    with pytest.raises(ValueError):
        fibonacci_axes(0)


def test_scan_seed_only_rotates():
    psi = noon_state(2)
    a, b = sensitivity_scan(psi, 100, seed=1), sensitivity_scan(psi, 100, seed=2)
    assert a.mean == pytest.approx(b.mean, abs=1e-12)
    assert not np.allclose(a.axes, b.axes)
