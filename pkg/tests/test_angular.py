import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose
from scipy.linalg import expm

from unpolarized.angular import (
    EulerAngles,
    HalfInt,
    clebsch_gordan,
    half,
    wigner_D,
    wigner_D_matrix,
    wigner_d_matrix,
    wigner_d_small,
)
from unpolarized.spinstate import ladder_matrices, stokes_matrices

twice_spins = st.integers(min_value=1, max_value=16)


@pytest.mark.parametrize(
    "text, twice", [("7/2", 7), ("3", 6), ("0", 0), ("-1/2", -1), (Fraction(5, 2), 5), (2, 4), (1.5, 3)]
)
def test_halfint_parse(text, twice):
    assert HalfInt.parse(text).twice == twice


@pytest.mark.parametrize("bad", ["1/3", "x", 0.25, "2/4/1", True])
def test_halfint_rejects(bad):
    with pytest.raises((ValueError, TypeError)):
        HalfInt.parse(bad)


def test_halfint_arithmetic_and_order():
    a, b = half("3/2"), half("1/2")
    assert a + b == half(2)
    assert a - b == 1
    assert -a == half("-3/2")
    assert sorted([a, b, half(1)]) == [b, half(1), a]
    assert str(a) == "3/2" and str(half(4)) == "4"
    assert half(3).is_integer and not a.is_integer


# textbook closed forms for coupling with spin 1/2
@given(st.integers(1, 20), st.data())
def test_cg_spin_half_closed_form(twice_j1, data):
    j1 = HalfInt(twice_j1)
    tm = data.draw(st.sampled_from(range(-twice_j1 - 1, twice_j1 + 2, 2)))
    m = HalfInt(tm)
    J = j1 + half("1/2")
    up = math.sqrt((float(j1) + float(m) + 0.5) / (twice_j1 + 1))
    down = math.sqrt((float(j1) - float(m) + 0.5) / (twice_j1 + 1))
    if abs(m - half("1/2")) <= j1:
        assert clebsch_gordan(j1, m - half("1/2"), "1/2", "1/2", J, m) == pytest.approx(up, abs=1e-14)
    if abs(m + half("1/2")) <= j1:
        assert clebsch_gordan(j1, m + half("1/2"), "1/2", "-1/2", J, m) == pytest.approx(down, abs=1e-14)


@pytest.mark.parametrize(
    "args, value",
    [
        (("1/2", "1/2", "1/2", "-1/2", 0, 0), 1 / math.sqrt(2)),
        (("1/2", "-1/2", "1/2", "1/2", 0, 0), -1 / math.sqrt(2)),
        ((1, 1, 1, 0, 1, 1), 1 / math.sqrt(2)),
        ((1, 0, 1, 0, 0, 0), -1 / math.sqrt(3)),
        ((1, 0, 1, 0, 1, 0), 0.0),
        ((1, 0, 1, 0, 2, 0), math.sqrt(2 / 3)),
        ((2, 2, 3, 3, 5, 5), 1.0),
    ],
)
def test_cg_known_values(args, value):
    assert clebsch_gordan(*args) == pytest.approx(value, abs=1e-15)


@pytest.mark.parametrize("j1, j2", [(1, 1), ("3/2", 1), ("5/2", "3/2"), (3, 2)])
def test_cg_orthogonality(j1, j2):
    j1, j2 = half(j1), half(j2)
    pairs = [(HalfInt(a), HalfInt(b)) for a in range(-j1.twice, j1.twice + 1, 2)
             for b in range(-j2.twice, j2.twice + 1, 2)]
    Js = [HalfInt(t) for t in range(abs(j1.twice - j2.twice), j1.twice + j2.twice + 1, 2)]
    cols = [(J, HalfInt(t)) for J in Js for t in range(-J.twice, J.twice + 1, 2)]
    U = np.array([[clebsch_gordan(j1, a, j2, b, J, M) for (J, M) in cols] for (a, b) in pairs])
    assert_allclose(U.T @ U, np.eye(len(cols)), atol=1e-13)


def test_cg_selection_rules_and_errors():
    assert clebsch_gordan(1, 1, 1, 1, 1, 1) == 0.0  # m1 + m2 != M
    assert clebsch_gordan(1, 0, 1, 0, 3, 0) == 0.0  # triangle
    with pytest.raises(ValueError):
        clebsch_gordan(1, "1/2", 1, 0, 1, "1/2")
    with pytest.raises(ValueError):
        clebsch_gordan(1, 2, 1, 0, 2, 2)


def _d_oracle(twice_j, beta):
    # exp(-i beta J_y) from the ladder matrices
    _, sy, _ = stokes_matrices(HalfInt(twice_j))
    return expm(-1j * beta * sy)


@given(twice_spins, st.floats(0.0, math.pi))
def test_small_d_matches_matrix_exponential(twice_j, beta):
    assert_allclose(wigner_d_matrix(HalfInt(twice_j), beta), _d_oracle(twice_j, beta), atol=1e-11)


def test_small_d_spin_one_table():
    b = 0.7
    c = math.cos(b)
    expected = {
        (1, 1): (1 + c) / 2,
        (1, 0): -math.sin(b) / math.sqrt(2),
        (1, -1): (1 - c) / 2,
        (0, 0): c,
        (0, 1): math.sin(b) / math.sqrt(2),
    }
    for (mp, m), v in expected.items():
        assert wigner_d_small(1, mp, m, b) == pytest.approx(v, abs=1e-15)


@pytest.mark.parametrize("twice_j", [1, 2, 5, 8])
def test_small_d_endpoints_exact(twice_j):
    d0 = wigner_d_matrix(HalfInt(twice_j), 0.0)
    assert np.array_equal(d0, np.eye(twice_j + 1))
    dpi = wigner_d_matrix(HalfInt(twice_j), math.pi)
    assert np.array_equal(np.abs(dpi), np.fliplr(np.eye(twice_j + 1)))


def test_wigner_D_element_matches_matrix(rng):
    R = EulerAngles.random(rng)
    D = wigner_D_matrix("5/2", R)
    for i, mp in enumerate(np.arange(-2.5, 3)):
        for k, m in enumerate(np.arange(-2.5, 3)):
            assert wigner_D("5/2", HalfInt(int(2 * mp)), HalfInt(int(2 * m)), R) == pytest.approx(D[i, k], abs=1e-14)


@pytest.mark.parametrize("twice_j", [1, 2, 3, 4, 7])
def test_wigner_D_unitary_and_group_property(twice_j, rng):
    j = HalfInt(twice_j)
    for _ in range(5):
        R1, R2 = EulerAngles.random(rng), EulerAngles.random(rng)
        D1, D2 = wigner_D_matrix(j, R1), wigner_D_matrix(j, R2)
        assert_allclose(D1.conj().T @ D1, np.eye(twice_j + 1), atol=1e-12)
        D12 = wigner_D_matrix(j, R1.compose(R2))
        # SU(2) covers SO(3) twice: half-integer spins agree up to an overall sign
        prod = D1 @ D2
        sign = 1.0 if twice_j % 2 == 0 else np.sign(np.real(np.trace(prod.conj().T @ D12)))
        assert_allclose(prod, sign * D12, atol=1e-11)


def test_wigner_D_is_exponential_of_generators(rng):
    R = EulerAngles.random(rng)
    sx, sy, sz = stokes_matrices(2)
    U = expm(-1j * R.alpha * sz) @ expm(-1j * R.beta * sy) @ expm(-1j * R.gamma * sz)
    assert_allclose(wigner_D_matrix(2, R), U, atol=1e-12)


def test_euler_matrix_roundtrip(rng):
    for _ in range(20):
        R = EulerAngles.random(rng)
        assert_allclose(EulerAngles.from_matrix(R.matrix()).matrix(), R.matrix(), atol=1e-12)
    for beta in (0.0, math.pi):
        R = EulerAngles(0.3, beta, 1.1)
        assert_allclose(EulerAngles.from_matrix(R.matrix()).matrix(), R.matrix(), atol=1e-12)


def test_euler_inverse(rng):
    R = EulerAngles.random(rng)
    assert_allclose(R.matrix() @ R.inverse().matrix(), np.eye(3), atol=1e-12)


def test_ladder_commutators():
    sx, sy, sz = stokes_matrices("7/2")
    assert_allclose(sx @ sy - sy @ sx, 1j * sz, atol=1e-12)
    sp, sm = ladder_matrices("7/2")
    assert_allclose(sp.conj().T, sm)
