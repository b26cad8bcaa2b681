"""Tabulated maximally unpolarized pure states and reference point sets.

Amplitudes are kept exact: each is ``re + i im`` with both parts of the form
sign * sqrt(rational), so the normalization can be checked in exact
arithmetic before anything is rounded to floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .angular import HalfInt, half
from .spinstate import SpinState

__all__ = [
    "Surd",
    "ExactAmplitude",
    "FixtureRecord",
    "FixtureReport",
    "TABULATED_SPINS",
    "load_fixture",
    "all_fixtures",
    "verify_fixture",
    "platonic_points",
    "platonic_constellation",
    "PLATONIC_SOLIDS",
]

RELATIONS = ("same", "similar", "different")


@dataclass(frozen=True)
class Surd:
    """sign * sqrt(square), with ``square`` a non-negative rational."""

    square: Fraction = Fraction(0)
    sign: int = 1

    def __post_init__(self):
        sq = Fraction(self.square)
        if sq < 0:
            raise ValueError("the radicand must be non-negative")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "square", sq)

    def __float__(self) -> float:
        return self.sign * math.sqrt(self.square)

    def __neg__(self) -> "Surd":
        return Surd(self.square, -self.sign)

    def __str__(self):
        s = "-" if self.sign < 0 else ""
        return f"{s}sqrt({self.square})"


@dataclass(frozen=True)
class ExactAmplitude:
    re: Surd = field(default_factory=Surd)
    im: Surd = field(default_factory=Surd)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def norm_squared(self) -> Fraction:
        return self.re.square + self.im.square

    def __str__(self):
        if self.im.square == 0:
            return str(self.re)
        if self.re.square == 0:
            return f"i {self.im}"
        return f"{self.re} + i {self.im}"


def _r(num, den=1, sign=1) -> ExactAmplitude:
    return ExactAmplitude(re=Surd(Fraction(num, den), sign))


def _i(num, den=1, sign=1) -> ExactAmplitude:
    return ExactAmplitude(im=Surd(Fraction(num, den), sign))


@dataclass(frozen=True)
class FixtureRecord:
    """One tabulated state with its descriptive metadata.

    ``amplitudes`` maps twice the projection, 2m, to an exact amplitude;
    missing projections are zero.  ``queens`` is a free-text annotation and
    is never computed or checked.
    """

    S: HalfInt
    claimed_M: int
    amplitudes: dict
    constellation_name: str
    design_t: int | None
    design_relation: str
    queens: str = ""
    note: str = ""

    def __post_init__(self):
        if self.design_relation not in RELATIONS:
            raise ValueError(f"unknown design relation {self.design_relation!r}")
        if not 1 <= self.claimed_M <= self.S.twice:
            raise ValueError("claimed_M must lie in 1..2S")
        for tm in self.amplitudes:
            if abs(tm) > self.S.twice or (tm - self.S.twice) % 2:
                raise ValueError(f"m = {tm}/2 is not a projection of S = {self.S}")

    def norm_squared(self) -> Fraction:
        return sum((a.norm_squared() for a in self.amplitudes.values()), Fraction(0))

    def amplitude_vector(self) -> np.ndarray:
        """Amplitudes as floats, index i = m + S, without renormalizing."""
        amps = np.zeros(self.S.twice + 1, dtype=complex)
        for tm, a in self.amplitudes.items():
            amps[(tm + self.S.twice) // 2] = complex(a)
        return amps

    def state(self) -> SpinState:
        return SpinState(self.S, self.amplitude_vector())


def _record(S, M, amps, name, t, relation, queens="", note=""):
    S = half(S)
    table = {}
    for m, a in amps.items():
        table[half(m).twice] = a
    return FixtureRecord(S, M, table, name, t, relation, queens, note)


def _build() -> dict:
    recs = [
        _record(1, 1, {0: _r(1)}, "radial line", 1, "same", "same, M=1"),
        _record(
            "3/2", 1, {"-3/2": _r(1, 2), "3/2": _r(1, 2)},
            "equatorial triangle", 1, "same", "same, M=1",
        ),
        _record(
            2, 2, {-1: _r(2, 3), 2: _r(1, 3)},
            "tetrahedron", 2, "same", "same, M=2",
            note="printed amplitudes of m=-1 and m=2 are swapped here; the printed "
            "assignment has <S_z> = 1 and is not unpolarized",
        ),
        _record(
            "5/2", 1, {"-5/2": _r(1, 2), "5/2": _r(1, 2)},
            "equatorial triangle + poles", 1, "same", "same, M=1",
        ),
        _record(3, 3, {-2: _r(1, 2), 2: _r(1, 2)}, "octahedron", 3, "same", "same, M=3"),
        _record(
            "7/2", 2, {"-5/2": _r(7, 18), "1/2": _r(7, 18), "7/2": _r(2, 9)},
            "two triangles + pole", 2, "similar", "equatorial pentagon + poles, M=1",
        ),
        _record(
            4, 3, {-4: _r(5, 24), 4: _r(5, 24), 0: _r(7, 12)},
            "cube", 3, "same", "external reference, M=1",
        ),
        _record(
            "9/2", 2,
            {"-9/2": _r(1, 6), "9/2": _r(1, 6), "-3/2": _r(1, 3), "3/2": _r(1, 3)},
            "three triangles", 2, "similar", "similar, M=1",
        ),
        _record(
            5, 3, {-5: _r(1, 5), 5: _r(1, 5), 0: _r(3, 5)},
            "pentagonal prism", 3, "similar", "two staggered squares + poles, M=1",
            note="printed values 1/sqrt(3), 1/sqrt(5) are not normalized; "
            "the state used is 1/sqrt(5), sqrt(3/5)",
        ),
        _record(
            "11/2", 3,
            {"-11/2": _r(17, 144), "11/2": _r(17, 144),
             "-5/2": _i(55, 144), "5/2": _i(55, 144)},
            "pentagon + two triangles", 3, "similar", "similar, M=1",
        ),
        _record(
            6, 5, {-5: _r(7, 25), 5: _r(7, 25, -1), 0: _r(11, 25, -1)},
            "icosahedron", 5, "same", "same, M=5",
        ),
        _record(
            7, 4,
            {
                -6: _r(854, 3645), 6: _r(854, 3645),
                -3: ExactAmplitude(Surd(Fraction(637, 13420)), Surd(Fraction(512603, 9783180))),
                3: ExactAmplitude(Surd(Fraction(637, 13420)), Surd(Fraction(512603, 9783180))),
                0: ExactAmplitude(
                    Surd(Fraction(12561757, 163053000)), Surd(Fraction(512603, 2013000), -1)
                ),
            },
            "three squares + poles", 4, "different", "",
        ),
        _record(
            10, 5,
            {-10: _r(187, 1875), 10: _r(187, 1875), -5: _r(209, 625),
             5: _r(209, 625, -1), 0: _r(247, 1875)},
            "deformed dodecahedron", 5, "similar", "",
        ),
    ]
    return {r.S: r for r in recs}


@lru_cache(maxsize=1)
def _fixtures() -> dict:
    return _build()


TABULATED_SPINS = tuple(sorted(_build()))


def load_fixture(S) -> FixtureRecord:
    S = half(S)
    try:
        return _fixtures()[S]
    except KeyError:
        known = ", ".join(str(s) for s in TABULATED_SPINS)
        raise KeyError(f"no tabulated state for S = {S}; known: {known}") from None


def all_fixtures() -> list[FixtureRecord]:
    return [_fixtures()[s] for s in TABULATED_SPINS]


@dataclass(frozen=True)
class FixtureReport:
    S: HalfInt
    claimed_M: int
    norm_error: float
    value_at_M: float
    value_above_M: float | None
    design_order: int
    design_t: int | None
    design_relation: str
    zero_tol: float = 1e-10
    next_tol: float = 1e-6

    @property
    def killed(self) -> bool:
        return self.value_at_M < self.zero_tol

    @property
    def maximal(self) -> bool:
        return self.value_above_M is None or self.value_above_M > self.next_tol

    @property
    def design_ok(self) -> bool:
        if self.design_relation != "same":
            return True
        return self.design_order == self.design_t

    @property
    def passed(self) -> bool:
        return self.norm_error < 1e-14 and self.killed and self.maximal and self.design_ok

    def to_dict(self) -> dict:
        return {
            "S": str(self.S),
            "claimed_M": self.claimed_M,
            "norm_error": self.norm_error,
            "A_M": self.value_at_M,
            "A_M_plus_1": self.value_above_M,
            "design_order": self.design_order,
            "design_t": self.design_t,
            "design_relation": self.design_relation,
            "passed": self.passed,
        }


def verify_fixture(S) -> FixtureReport:
    from .design import design_order
    from .majorana import constellation
    from .multipole import cumulative_pure

    rec = load_fixture(S)
    norm_error = abs(float(rec.norm_squared() - 1))
    psi = rec.state()
    above = None
    if rec.claimed_M < rec.S.twice:
        above = cumulative_pure(psi, rec.claimed_M + 1)
    return FixtureReport(
        S=rec.S,
        claimed_M=rec.claimed_M,
        norm_error=norm_error,
        value_at_M=cumulative_pure(psi, rec.claimed_M),
        value_above_M=above,
        design_order=design_order(constellation(psi)),
        design_t=rec.design_t,
        design_relation=rec.design_relation,
    )


# ----------------------------------------------------------------------------
# Regular polyhedra, vertices on the unit sphere.

_PHI = (1 + math.sqrt(5)) / 2


def _normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _tetrahedron():
    return _normalize([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])


def _octahedron():
    return np.vstack([np.eye(3), -np.eye(3)])


def _cube():
    return _normalize([[x, y, z] for x in (1, -1) for y in (1, -1) for z in (1, -1)])


def _icosahedron():
    pts = []
    for a in (1, -1):
        for b in (_PHI, -_PHI):
            pts += [[0, a, b], [a, b, 0], [b, 0, a]]
    return _normalize(pts)


def _dodecahedron():
    pts = [[x, y, z] for x in (1, -1) for y in (1, -1) for z in (1, -1)]
    inv = 1 / _PHI
    for a in (inv, -inv):
        for b in (_PHI, -_PHI):
            pts += [[0, a, b], [a, b, 0], [b, 0, a]]
    return _normalize(pts)


PLATONIC_SOLIDS = {
    "tetrahedron": _tetrahedron,
    "octahedron": _octahedron,
    "cube": _cube,
    "icosahedron": _icosahedron,
    "dodecahedron": _dodecahedron,
}


def platonic_points(name: str) -> np.ndarray:
    """Unit-sphere vertices of a regular polyhedron as an (N, 3) array."""
    try:
        return PLATONIC_SOLIDS[name]()
    except KeyError:
        raise KeyError(f"unknown solid {name!r}; choose from {sorted(PLATONIC_SOLIDS)}") from None


def platonic_constellation(name: str):
    from .majorana import Constellation

    return Constellation.from_cartesian(platonic_points(name))
