"""Exact angular-momentum coupling coefficients and rotation matrices.

Half-integer quantum numbers are carried as :class:`HalfInt`, which stores
twice the value so that all selection-rule arithmetic is exact.  Clebsch-Gordan
coefficients are evaluated from the Racah sum with Python integers and only
converted to a float at the very end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

__all__ = [
    "HalfInt",
    "half",
    "EulerAngles",
    "clebsch_gordan",
    "wigner_d_small",
    "wigner_d_matrix",
    "wigner_D",
    "wigner_D_matrix",
    "rotation_matrix_z",
    "rotation_matrix_y",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class HalfInt:
    """An integer or half-odd-integer, stored as ``twice = 2 * value``."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, (int, np.integer)) or isinstance(self.twice, bool):
            raise TypeError(f"HalfInt needs an integer twice-value, got {self.twice!r}")
        object.__setattr__(self, "twice", int(self.twice))

    @classmethod
    def parse(cls, value) -> "HalfInt":
        """Build from an int, a Fraction, a float that is a multiple of 1/2,
        or a string such as ``"7/2"``, ``"-3"`` or ``"2.5"``."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, str):
            text = value.strip()
            try:
                frac = Fraction(text)
            except ValueError:
                raise ValueError(f"cannot parse {value!r} as a half-integer") from None
            return cls._from_fraction(frac, value)
        if isinstance(value, bool):
            raise TypeError("booleans are not half-integers")
        if isinstance(value, (int, np.integer)):
            return cls(2 * int(value))
        if isinstance(value, Rational):
            return cls._from_fraction(Fraction(value), value)
        if isinstance(value, (float, np.floating)):
            doubled = 2.0 * float(value)
            if not math.isfinite(doubled) or doubled != round(doubled):
                raise ValueError(f"{value!r} is not a multiple of 1/2")
            return cls(int(round(doubled)))
        raise TypeError(f"cannot interpret {value!r} as a half-integer")

    @classmethod
    def _from_fraction(cls, frac: Fraction, original) -> "HalfInt":
        doubled = 2 * frac
        if doubled.denominator != 1:
            raise ValueError(f"{original!r} is not a multiple of 1/2")
        return cls(doubled.numerator)

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __float__(self) -> float:
        return self.twice / 2

    def __int__(self) -> int:
        if self.twice % 2:
            raise ValueError(f"{self} is not an integer")
        return self.twice // 2

    def __index__(self) -> int:
        return int(self)

    def __hash__(self):
        return hash(("HalfInt", self.twice))

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return HalfInt(self.twice + other.twice)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return HalfInt(self.twice - other.twice)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return HalfInt(other.twice - self.twice)

    def __neg__(self):
        return HalfInt(-self.twice)

    def __abs__(self):
        return HalfInt(abs(self.twice))

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return self.twice == other.twice

    def __lt__(self, other):
        return self.twice < _coerce_strict(other).twice

    def __le__(self, other):
        return self.twice <= _coerce_strict(other).twice

    def __gt__(self, other):
        return self.twice > _coerce_strict(other).twice

    def __ge__(self, other):
        return self.twice >= _coerce_strict(other).twice

    def __str__(self):
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self):
        return f"HalfInt({self})"


def _coerce(value):
    try:
        return HalfInt.parse(value)
    except (TypeError, ValueError):
        return NotImplemented


def _coerce_strict(value) -> HalfInt:
    return HalfInt.parse(value)


def half(value) -> HalfInt:
    """Shorthand for :meth:`HalfInt.parse`."""
    return HalfInt.parse(value)


def rotation_matrix_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_matrix_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@dataclass(frozen=True)
class EulerAngles:
    """Active z-y-z Euler rotation ``Rz(alpha) Ry(beta) Rz(gamma)``."""

    alpha: float
    beta: float
    gamma: float

    def normalized(self) -> "EulerAngles":
        """Equivalent SO(3) angles with beta in [0, pi] and alpha, gamma in [0, 2pi).

        For half-integer spin the SU(2) representative may change sign.
        """
        return EulerAngles.from_matrix(self.matrix())

    def matrix(self) -> np.ndarray:
        return (
            rotation_matrix_z(self.alpha)
            @ rotation_matrix_y(self.beta)
            @ rotation_matrix_z(self.gamma)
        )

    def inverse(self) -> "EulerAngles":
        return EulerAngles(-self.gamma, -self.beta, -self.alpha)

    def compose(self, other: "EulerAngles") -> "EulerAngles":
        """Rotation ``self * other`` (apply ``other`` first)."""
        return EulerAngles.from_matrix(self.matrix() @ other.matrix())

    @classmethod
    def from_matrix(cls, rot) -> "EulerAngles":
        rot = np.asarray(rot, dtype=float)
        if rot.shape != (3, 3):
            raise ValueError("rotation matrix must be 3x3")
        sin_beta = math.hypot(rot[0, 2], rot[1, 2])
        beta = math.atan2(sin_beta, rot[2, 2])
        if sin_beta > 1e-12:
            alpha = math.atan2(rot[1, 2], rot[0, 2])
            gamma = math.atan2(rot[2, 1], -rot[2, 0])
        elif rot[2, 2] > 0:
            alpha, gamma = math.atan2(rot[1, 0], rot[0, 0]), 0.0
            beta = 0.0
        else:
            alpha, gamma = math.atan2(-rot[0, 1], -rot[0, 0]), 0.0
            beta = math.pi
        return cls(alpha % TWO_PI, beta, gamma % TWO_PI)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "EulerAngles":
        """Haar-random rotation."""
        alpha, gamma = rng.uniform(0.0, TWO_PI, size=2)
        beta = math.acos(rng.uniform(-1.0, 1.0))
        return cls(float(alpha), beta, float(gamma))


def _split_projection(j: HalfInt, m: HalfInt, what: str) -> tuple[int, int]:
    """Return the integers (j + m, j - m), validating range and parity."""
    if (j.twice - m.twice) % 2:
        raise ValueError(f"{what}: projection {m} has the wrong parity for j = {j}")
    if abs(m.twice) > j.twice:
        raise ValueError(f"{what}: |m| = {abs(m)} exceeds j = {j}")
    return (j.twice + m.twice) // 2, (j.twice - m.twice) // 2


@lru_cache(maxsize=None)
def _cg_twice(j1: int, m1: int, j2: int, m2: int, J: int, M: int) -> float:
    # all arguments are twice-values
    if m1 + m2 != M:
        return 0.0
    if J > j1 + j2 or J < abs(j1 - j2) or (j1 + j2 + J) % 2:
        return 0.0
    f = math.factorial
    a = (j1 + j2 - J) // 2
    b = (j1 - j2 + J) // 2
    c = (-j1 + j2 + J) // 2
    d = (j1 + j2 + J) // 2 + 1
    p1, q1 = (j1 + m1) // 2, (j1 - m1) // 2
    p2, q2 = (j2 + m2) // 2, (j2 - m2) // 2
    P, Q = (J + M) // 2, (J - M) // 2
    square = Fraction(
        (J + 1) * f(a) * f(b) * f(c) * f(p1) * f(q1) * f(p2) * f(q2) * f(P) * f(Q),
        f(d),
    )
    e1 = (J - j2 + m1) // 2
    e2 = (J - j1 - m2) // 2
    total = Fraction(0)
    for k in range(max(0, -e1, -e2), min(a, q1, p2) + 1):
        den = f(k) * f(a - k) * f(q1 - k) * f(p2 - k) * f(e1 + k) * f(e2 + k)
        total += Fraction(-1 if k % 2 else 1, den)
    if total == 0:
        return 0.0
    value = math.sqrt(square * total * total)
    return value if total > 0 else -value


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> (Condon-Shortley).

    Arguments may be anything :func:`half` accepts.  Projections outside
    their range or with the wrong parity raise ``ValueError``; couplings that
    violate a selection rule (M != m1 + m2, triangle inequality) return 0.
    """
    j1, m1, j2, m2, J, M = (half(x) for x in (j1, m1, j2, m2, J, M))
    for j in (j1, j2, J):
        if j.twice < 0:
            raise ValueError(f"negative angular momentum {j}")
    _split_projection(j1, m1, "m1")
    _split_projection(j2, m2, "m2")
    _split_projection(J, M, "M")
    return _cg_twice(j1.twice, m1.twice, j2.twice, m2.twice, J.twice, M.twice)


@lru_cache(maxsize=None)
def _d_terms(twice_j: int):
    """Coefficient and exponent tables for the small-d factorial sum.

    Returns arrays ``coef, pow_cos, pow_sin`` of shape (n, n, kmax) such that
    ``d[i', i] = sum_k coef * cos(b/2)**pow_cos * sin(b/2)**pow_sin``.
    """
    n = twice_j + 1
    f = math.factorial
    rows = []
    kmax = 0
    for ip in range(n):
        for i in range(n):
            # j + m' = ip, j - m' = twice_j - ip, likewise for m
            jpm_p, jmm_p = ip, twice_j - ip
            jpm, jmm = i, twice_j - i
            num = f(jpm_p) * f(jmm_p) * f(jpm) * f(jmm)
            lo = max(0, i - ip)
            hi = min(jpm, jmm_p)
            terms = []
            for k in range(lo, hi + 1):
                den = f(jpm - k) * f(k) * f(jmm_p - k) * f(k - i + ip)
                sign = -1.0 if (k - i + ip) % 2 else 1.0
                coef = sign * math.sqrt(Fraction(num, den * den))
                terms.append((coef, twice_j - 2 * k + i - ip, 2 * k - i + ip))
            kmax = max(kmax, len(terms))
            rows.append(terms)
    coef = np.zeros((n, n, kmax))
    pc = np.zeros((n, n, kmax))
    ps = np.zeros((n, n, kmax))
    for idx, terms in enumerate(rows):
        ip, i = divmod(idx, n)
        for t, (cf, a, b) in enumerate(terms):
            coef[ip, i, t] = cf
            pc[ip, i, t] = a
            ps[ip, i, t] = b
    for arr in (coef, pc, ps):
        arr.setflags(write=False)
    return coef, pc, ps


def _half_angle(beta: float) -> tuple[float, float]:
    # exact endpoints so that d(0) = identity and d(pi) is a signed permutation
    if beta == 0.0:
        return 1.0, 0.0
    if beta == math.pi:
        return 0.0, 1.0
    return math.cos(beta / 2.0), math.sin(beta / 2.0)


def wigner_d_matrix(j, beta: float) -> np.ndarray:
    """Full small-d matrix, rows m' and columns m ordered from -j to j."""
    j = half(j)
    if j.twice < 0:
        raise ValueError(f"negative angular momentum {j}")
    coef, pc, ps = _d_terms(j.twice)
    c, s = _half_angle(float(beta))
    return np.sum(coef * np.power(c, pc) * np.power(s, ps), axis=-1)


def wigner_d_small(j, mp, m, beta: float) -> float:
    """Wigner small-d element d^j_{m' m}(beta) = <j m'| exp(-i beta J_y) |j m>."""
    j, mp, m = half(j), half(mp), half(m)
    ip, _ = _split_projection(j, mp, "m'")
    i, _ = _split_projection(j, m, "m")
    coef, pc, ps = _d_terms(j.twice)
    c, s = _half_angle(float(beta))
    return float(np.sum(coef[ip, i] * np.power(c, pc[ip, i]) * np.power(s, ps[ip, i])))


def wigner_D(j, mp, m, R: EulerAngles) -> complex:
    """D^j_{m' m}(R) = exp(-i m' alpha) d^j_{m' m}(beta) exp(-i m gamma)."""
    j, mp, m = half(j), half(mp), half(m)
    d = wigner_d_small(j, mp, m, R.beta)
    phase = -(float(mp) * R.alpha + float(m) * R.gamma)
    return complex(d * complex(math.cos(phase), math.sin(phase)))


def wigner_D_matrix(j, R: EulerAngles) -> np.ndarray:
    """Matrix of D^j(R) in the |j, m> basis, m = -j..j."""
    j = half(j)
    ms = (np.arange(j.twice + 1) * 2 - j.twice) / 2.0
    d = wigner_d_matrix(j, R.beta)
    left = np.exp(-1j * ms * R.alpha)
    right = np.exp(-1j * ms * R.gamma)
    return left[:, None] * d * right[None, :]
