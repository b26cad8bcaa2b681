"""JSON and CSV readers and writers shared by the command line.

Every writer here has a matching reader, so files produced by the tools can
be fed back into them.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

import numpy as np

from .angular import half
from .majorana import Constellation
from .multipole import MultipoleSpectrum, cumulative_table, max_value
from .spinstate import SpinState

__all__ = [
    "FormatError",
    "state_to_json",
    "state_from_json",
    "spectrum_to_json",
    "spectrum_from_json",
    "spectrum_to_csv",
    "spectrum_from_csv",
    "cumulative_to_csv",
    "cumulative_from_csv",
    "constellation_to_json",
    "constellation_from_json",
    "qgrid_to_csv",
    "qgrid_from_csv",
    "load_json",
    "dump_json",
]


class FormatError(ValueError):
    """Input that does not follow one of the documented layouts."""


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def load_json(source) -> dict:
    """Parse JSON from a path or a string of JSON text."""
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith(("{", "["))):
        text = Path(source).read_text()
    else:
        text = source
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from exc


def _expect(obj, kind: str):
    if not isinstance(obj, dict) or obj.get("type") != kind:
        raise FormatError(f"expected a JSON object with type {kind!r}")


def _spin(obj):
    try:
        return half(obj["S"])
    except KeyError:
        raise FormatError("missing field 'S'") from None
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad spin value: {exc}") from exc


# -- states ------------------------------------------------------------------

def state_to_json(state: SpinState) -> dict:
    ms = [str(half(m)) for m in state.ms]
    return {
        "type": "spin_state",
        "S": str(state.S),
        "m": ms,
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amps],
    }


def state_from_json(obj) -> SpinState:
    _expect(obj, "spin_state")
    S = _spin(obj)
    try:
        amps = np.array([complex(re, im) for re, im in obj["amplitudes"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("amplitudes must be a list of [re, im] pairs") from exc
    try:
        return SpinState(S, amps)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


# -- multipoles --------------------------------------------------------------

def spectrum_to_json(spec: MultipoleSpectrum) -> dict:
    table = cumulative_table(spec)
    return {
        "type": "multipole_spectrum",
        "S": str(spec.S),
        "multipoles": [
            {"K": K, "q": q, "re": v.real, "im": v.imag} for K, q, v in spec.items()
        ],
        "cumulative": [
            {"M": M, "A_M": float(a), "max_value": max_value(spec.S, M)}
            for M, a in enumerate(table, start=1)
        ],
    }


def _shells_from_rows(S, rows) -> MultipoleSpectrum:
    shells = [np.zeros(2 * K + 1, dtype=complex) for K in range(S.twice + 1)]
    seen = set()
    for K, q, value in rows:
        if not 0 <= K <= S.twice or abs(q) > K:
            raise FormatError(f"multipole index (K={K}, q={q}) out of range for S={S}")
        shells[K][q + K] = value
        seen.add((K, q))
    if len(seen) != (S.twice + 1) ** 2:
        raise FormatError("multipole table is incomplete")
    for shell in shells:
        shell.setflags(write=False)
    return MultipoleSpectrum(S, tuple(shells))


def spectrum_from_json(obj) -> MultipoleSpectrum:
    _expect(obj, "multipole_spectrum")
    S = _spin(obj)
    try:
        rows = [(int(r["K"]), int(r["q"]), complex(r["re"], r["im"])) for r in obj["multipoles"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("bad multipole rows") from exc
    return _shells_from_rows(S, rows)


def spectrum_to_csv(spec: MultipoleSpectrum) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["S", "K", "q", "re", "im"])
    for K, q, v in spec.items():
        w.writerow([str(spec.S), K, q, repr(v.real), repr(v.imag)])
    return buf.getvalue()


def spectrum_from_csv(text: str) -> MultipoleSpectrum:
    rows = list(csv.DictReader(_io.StringIO(text)))
    if not rows:
        raise FormatError("empty multipole CSV")
    try:
        S = half(rows[0]["S"])
        parsed = [(int(r["K"]), int(r["q"]), complex(float(r["re"]), float(r["im"]))) for r in rows]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("bad multipole CSV") from exc
    return _shells_from_rows(S, parsed)


def cumulative_to_csv(spec: MultipoleSpectrum) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["M", "A_M", "max_value"])
    for M, a in enumerate(cumulative_table(spec), start=1):
        w.writerow([M, repr(float(a)), repr(max_value(spec.S, M))])
    return buf.getvalue()


def cumulative_from_csv(text: str) -> np.ndarray:
    """Rows of (M, A_M, max_value) as an (n, 3) float array."""
    try:
        rows = [(int(r["M"]), float(r["A_M"]), float(r["max_value"]))
                for r in csv.DictReader(_io.StringIO(text))]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("bad cumulative CSV") from exc
    return np.array(rows, dtype=float).reshape(-1, 3)


# -- constellations -----------------------------------------------------------

def constellation_to_json(c: Constellation) -> dict:
    xyz = c.cartesian()
    return {
        "type": "constellation",
        "S": str(c.S),
        "points": [
            {"theta": float(t), "phi": float(p), "x": float(x), "y": float(y), "z": float(z)}
            for t, p, (x, y, z) in zip(c.theta, c.phi, xyz)
        ],
    }


def constellation_from_json(obj) -> Constellation:
    """Accepts the constellation object written above, or a bare list of
    [x, y, z] triples or {"theta", "phi"} objects."""
    if isinstance(obj, dict):
        _expect(obj, "constellation")
        pts = obj.get("points")
    else:
        pts = obj
    if not isinstance(pts, list) or not pts:
        raise FormatError("a constellation needs a nonempty list of points")
    try:
        if all(isinstance(p, dict) and "theta" in p and "phi" in p for p in pts):
            arr = np.array([[float(p["theta"]), float(p["phi"])] for p in pts])
            return Constellation(arr)
        if all(isinstance(p, dict) for p in pts):
            xyz = np.array([[float(p["x"]), float(p["y"]), float(p["z"])] for p in pts])
        else:
            xyz = np.array(pts, dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("points must be [x, y, z] or {theta, phi}") from exc
    if xyz.ndim != 2 or xyz.shape[1] != 3:
        raise FormatError("points must be [x, y, z] triples")
    if not np.all(np.isfinite(xyz)) or np.any(np.linalg.norm(xyz, axis=1) == 0):
        raise FormatError("points must be finite and nonzero")
    return Constellation.from_cartesian(xyz)


# -- Q function grid ----------------------------------------------------------

def qgrid_to_csv(theta: np.ndarray, phi: np.ndarray, Q: np.ndarray) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta", "phi", "Q"])
    for i, t in enumerate(theta):
        for k, p in enumerate(phi):
            w.writerow([repr(float(t)), repr(float(p)), repr(float(Q[i, k]))])
    return buf.getvalue()


def qgrid_from_csv(text: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    try:
        rows = [(float(r["theta"]), float(r["phi"]), float(r["Q"]))
                for r in csv.DictReader(_io.StringIO(text))]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("bad Q-grid CSV") from exc
    arr = np.array(rows).reshape(-1, 3)
    theta = np.unique(arr[:, 0])
    phi = np.unique(arr[:, 1])
    if len(theta) * len(phi) != len(arr):
        raise FormatError("Q-grid CSV is not a full grid")
    return theta, phi, arr[:, 2].reshape(len(theta), len(phi))
