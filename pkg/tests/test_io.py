import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from unpolarized import io as uio
from unpolarized.fixtures import load_fixture, platonic_points
from unpolarized.majorana import constellation, q_grid
from unpolarized.multipole import cumulative_table, multipoles
from unpolarized.spinstate import random_state


def _spectra_equal(a, b):
    assert a.S == b.S
    for (K, q, v), (K2, q2, v2) in zip(a.items(), b.items()):
        assert (K, q) == (K2, q2)
        assert v == pytest.approx(v2, abs=0)


def test_state_roundtrip(rng):
    psi = random_state("7/2", rng)
    obj = json.loads(uio.dump_json(uio.state_to_json(psi)))
    back = uio.state_from_json(obj)
    assert back.S == psi.S
    assert_allclose(back.amps, psi.amps, rtol=0, atol=1e-16)
    assert obj["m"][0] == "-7/2"


def test_spectrum_roundtrips(rng):
    spec = multipoles(random_state(2, rng))
    _spectra_equal(uio.spectrum_from_json(json.loads(uio.dump_json(uio.spectrum_to_json(spec)))), spec)
    _spectra_equal(uio.spectrum_from_csv(uio.spectrum_to_csv(spec)), spec)
    table = uio.cumulative_from_csv(uio.cumulative_to_csv(spec))
    assert_allclose(table[:, 1], cumulative_table(spec), rtol=0, atol=0)
    assert_allclose(table[:, 0], [1, 2, 3, 4])


def test_constellation_formats():
    c = constellation(load_fixture(3).state())
    back = uio.constellation_from_json(uio.constellation_to_json(c))
    assert_allclose(back.cartesian(), c.cartesian(), atol=1e-15)
    bare = uio.constellation_from_json(platonic_points("tetrahedron").tolist())
    assert len(bare) == 4
    angles = uio.constellation_from_json([{"theta": 0.1, "phi": 0.2}])
    assert_allclose(angles.points, [[0.1, 0.2]])


def test_qgrid_roundtrip(rng):
    psi = random_state(2, rng)
    Q = q_grid(psi, 4, 3)
    theta = np.pi * (np.arange(4) + 0.5) / 4
    phi = 2 * np.pi * np.arange(3) / 3
    t, p, Q2 = uio.qgrid_from_csv(uio.qgrid_to_csv(theta, phi, Q))
    assert_allclose(Q2, Q, rtol=0, atol=0)
    assert_allclose(t, theta)


@pytest.mark.parametrize(
    "obj",
    [
        {"type": "spin_state", "amplitudes": [[1, 0]]},
        {"type": "spin_state", "S": "1/3", "amplitudes": [[1, 0]]},
        {"type": "spin_state", "S": "1", "amplitudes": [[1, 0]]},
        {"type": "other"},
        [1, 2],
    ],
)
def test_bad_states_rejected(obj):
    with pytest.raises(uio.FormatError):
        uio.state_from_json(obj)


@pytest.mark.parametrize("pts", [[], [[0, 0, 0]], [[1, 2]], {"type": "constellation", "points": "x"}])
def test_bad_points_rejected(pts):
    with pytest.raises(uio.FormatError):
        uio.constellation_from_json(pts)


def test_malformed_json():
    with pytest.raises(uio.FormatError):
        uio.load_json("{oops")
