import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from unpolarized.angular import EulerAngles, HalfInt
from unpolarized.fixtures import platonic_constellation
from unpolarized.majorana import (
    Constellation,
    constellation,
    constellation_match,
    constellation_rotation,
    constellation_to_state,
    polynomial_roots,
    q_function,
    q_grid,
    state_to_polynomial,
)
from unpolarized.spinstate import basis_state, coherent_state, noon_state, random_state, rotate


def _angle(u, v):
    return math.atan2(np.linalg.norm(np.cross(u, v)), np.dot(u, v))


def _unit(theta, phi):
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])


def test_polynomial_coefficients():
    psi = random_state(2, np.random.default_rng(0))
    p = state_to_polynomial(psi)
    binom = np.sqrt([1, 4, 6, 4, 1])
    assert_allclose(p.coeffs, binom * psi.amps)


@pytest.mark.parametrize(
    "roots",
    [[1, 1, 1, -2], [0.5j, 0.5j, 3], [2, 2, 2, 2, 2], [1e-3, -1e-3, 5]],
)
def test_polynomial_roots_with_multiplicity(roots):
    coeffs = np.poly(roots)[::-1]
    found, n_inf = polynomial_roots(coeffs)
    assert n_inf == 0
    assert_allclose(np.sort_complex(np.array(found)), np.sort_complex(np.array(roots, dtype=complex)), atol=1e-8)


def test_polynomial_roots_degree_deficit():
    found, n_inf = polynomial_roots([2.0, -1.0, 0.0, 0.0])
    assert n_inf == 2
    assert_allclose(found, [2.0])


@pytest.mark.parametrize("twice_s", [1, 2, 3, 6, 10])
@pytest.mark.parametrize("theta", [0.0, 1e-3, 0.333, 1.2, math.pi / 2, math.pi - 1e-3, math.pi])
def test_coherent_state_collapses(twice_s, theta):
    phi = 0.7
    c = constellation(coherent_state(HalfInt(twice_s), theta, phi))
    target = _unit(theta, phi)
    worst = max(_angle(p, target) for p in c.cartesian())
    assert worst < 1e-7


def test_stretched_states_sit_at_poles():
    assert_allclose(constellation(basis_state(3, -3)).theta, 0.0)
    assert_allclose(constellation(basis_state(3, 3)).theta, math.pi)


@pytest.mark.parametrize("twice_s", [2, 3, 5])
def test_noon_constellation_is_equatorial_polygon(twice_s):
    c = constellation(noon_state(HalfInt(twice_s)))
    assert_allclose(c.theta, math.pi / 2, atol=1e-12)
    gaps = np.diff(np.sort(c.phi))
    assert_allclose(gaps, 2 * math.pi / twice_s, atol=1e-12)


@pytest.mark.parametrize("twice_s", range(1, 11))
def test_roundtrip(twice_s, rng):
    for _ in range(10):
        psi = random_state(HalfInt(twice_s), rng)
        back = constellation_to_state(constellation(psi))
        assert back.fidelity(psi) > 1 - 1e-12


@pytest.mark.parametrize("twice_s", [2, 4, 7])
def test_rotation_equivariance(twice_s, rng):
    psi = random_state(HalfInt(twice_s), rng)
    R = EulerAngles.random(rng)
    moved = constellation(psi).rotated(constellation_rotation(R))
    direct = constellation(rotate(psi, R))
    assert constellation_match(moved, direct, tol=1e-8) is not None
    assert_allclose(
        np.sort(direct.cartesian()[:, 2]), np.sort(moved.cartesian()[:, 2]), atol=1e-9
    )


@pytest.mark.parametrize("twice_s", [2, 3, 6])
def test_q_function_zeros_antipodal(twice_s, rng):
    psi = random_state(HalfInt(twice_s), rng)
    for theta, phi in constellation(psi).points:
        assert q_function(psi, math.pi - theta, phi + math.pi) < 1e-20
        assert q_function(psi, theta, phi) > 1e-6 or twice_s == 1


def test_q_grid_matches_pointwise(rng):
    psi = random_state("5/2", rng)
    Q = q_grid(psi, 5, 4)
    for j in range(5):
        for k in range(4):
            t, p = math.pi * (j + 0.5) / 5, 2 * math.pi * k / 4
            assert Q[j, k] == pytest.approx(q_function(psi, t, p), abs=1e-14)


def test_q_grid_integrates_to_one(rng):
    # the coherent states resolve the identity with measure (2S+1)/(4 pi)
    psi = random_state(3, rng)
    nt, nphi = 400, 16
    Q = q_grid(psi, nt, nphi)
    theta = math.pi * (np.arange(nt) + 0.5) / nt
    integral = (Q.mean(axis=1) * np.sin(theta)).sum() * math.pi / nt * 2 * math.pi
    assert integral * 7 / (4 * math.pi) == pytest.approx(1.0, abs=1e-4)


def test_match_detects_rotated_copy_and_rejects_others(rng):
    cube = platonic_constellation("cube")
    R = EulerAngles.random(rng)
    assert constellation_match(cube, cube.rotated(R)) is not None
    assert constellation_match(cube, platonic_constellation("octahedron")) is None
    squashed = Constellation.from_cartesian(cube.cartesian() * [1, 1, 1.3])
    assert constellation_match(cube, squashed) is None


def test_match_returns_the_rotation(rng):
    ico = platonic_constellation("icosahedron")
    R = EulerAngles.random(rng)
    found = constellation_match(ico, ico.rotated(R))
    assert constellation_match(ico.rotated(found), ico.rotated(R), tol=1e-9) is not None


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_constellation_has_2s_points(twice_s, seed):
    psi = random_state(HalfInt(twice_s), np.random.default_rng(seed))
    c = constellation(psi)
    assert len(c) == twice_s
    assert c.S == HalfInt(twice_s)
