"""Exact spin-1/2 linear algebra: Bloch mapping, projectors, rotations, singlet.

Conventions: hbar = 1 and every spin observable is stored as ``n . sigma``,
so its eigenvalues are +1 and -1. Amplitudes are always written in the
computational (z-up, z-down) basis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import InvalidDirectionError, InvalidExpectationError, InvalidStateError

NORM_TOL = 1e-12
IDENTITY_TOL = 1e-10
RAY_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


class Outcome(enum.IntEnum):
    PLUS = 1
    MINUS = -1


@dataclass(frozen=True)
class UnitVector3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        comps = (self.x, self.y, self.z)
        if not all(math.isfinite(c) for c in comps):
            raise InvalidDirectionError(f"non-finite direction {comps}")
        norm2 = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidDirectionError(f"direction is not unit (|v|^2 = {norm2!r})")

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> "UnitVector3":
        """Build a unit vector pointing along (x, y, z)."""
        norm = math.sqrt(x * x + y * y + z * z)
        if not math.isfinite(norm) or norm == 0.0:
            raise InvalidDirectionError("cannot normalize a zero or non-finite vector")
        return cls(x / norm, y / norm, z / norm)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "UnitVector3":
        return cls.normalized(
            math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)
        )

    @classmethod
    def from_array(cls, arr: Sequence[float]) -> "UnitVector3":
        x, y, z = (float(c) for c in arr)
        return cls(x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "UnitVector3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "UnitVector3") -> np.ndarray:
        return np.cross(self.as_array(), other.as_array())

    def angle_to(self, other: "UnitVector3") -> float:
        return math.acos(min(1.0, max(-1.0, self.dot(other))))

    def __neg__(self) -> "UnitVector3":
        return UnitVector3(-self.x, -self.y, -self.z)


X_HAT = UnitVector3(1.0, 0.0, 0.0)
Y_HAT = UnitVector3(0.0, 1.0, 0.0)
Z_HAT = UnitVector3(0.0, 0.0, 1.0)

DirectionLike = Union[UnitVector3, Sequence[float], np.ndarray]


def as_direction(v: DirectionLike) -> UnitVector3:
    """Coerce a 3-sequence to a UnitVector3; zero or non-unit input raises."""
    if isinstance(v, UnitVector3):
        return v
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise InvalidDirectionError(f"expected 3 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or not np.any(arr):
        raise InvalidDirectionError("zero or non-finite direction")
    return UnitVector3.from_array(arr)


def random_direction(rng: np.random.Generator) -> UnitVector3:
    """Uniform point on the unit sphere."""
    while True:
        g = rng.standard_normal(3)
        n = float(np.linalg.norm(g))
        if n > 1e-8:
            return UnitVector3.normalized(*(g / n))


@dataclass(frozen=True)
class SpinState:
    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        norm2 = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if not math.isfinite(norm2) or abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state is not normalized (|a|^2+|b|^2 = {norm2!r})")

    @classmethod
    def from_array(cls, amps: Sequence[complex], normalize: bool = False) -> "SpinState":
        a, b = (complex(c) for c in amps)
        if normalize:
            n = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
            if n == 0.0:
                raise InvalidStateError("zero vector is not a state")
            a, b = a / n, b / n
        return cls(a, b)

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    def inner(self, other: "SpinState") -> complex:
        """<self|other>."""
        return self.alpha.conjugate() * other.alpha + self.beta.conjugate() * other.beta

    def ray_equal(self, other: "SpinState", tol: float = RAY_TOL) -> bool:
        return abs(self.inner(other)) > 1.0 - tol


def random_state(rng: np.random.Generator) -> SpinState:
    amps = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return SpinState.from_array(amps, normalize=True)


class Operator2:
    """Immutable 2x2 complex matrix."""

    __slots__ = ("_m",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"Operator2 needs a 2x2 matrix, got {m.shape}")
        m.setflags(write=False)
        self._m = m

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    def dagger(self) -> "Operator2":
        return Operator2(self._m.conj().T)

    def apply(self, s: SpinState) -> np.ndarray:
        """Raw (not renormalized) image of a state."""
        return self._m @ s.as_array()

    def __matmul__(self, other):
        if isinstance(other, Operator2):
            return Operator2(self._m @ other._m)
        if isinstance(other, SpinState):
            return self.apply(other)
        return NotImplemented

    def __add__(self, other: "Operator2") -> "Operator2":
        return Operator2(self._m + other._m)

    def __sub__(self, other: "Operator2") -> "Operator2":
        return Operator2(self._m - other._m)

    def allclose(self, other, atol: float = IDENTITY_TOL) -> bool:
        other_m = other._m if isinstance(other, Operator2) else np.asarray(other)
        return bool(np.allclose(self._m, other_m, rtol=0.0, atol=atol))

    def __repr__(self):
        return f"Operator2({self._m.tolist()!r})"


def _check_state(s: SpinState) -> SpinState:
    if not isinstance(s, SpinState):
        raise InvalidStateError(f"expected SpinState, got {type(s).__name__}")
    norm2 = abs(s.alpha) ** 2 + abs(s.beta) ** 2
    if abs(norm2 - 1.0) > NORM_TOL:
        raise InvalidStateError(f"state is not normalized (|a|^2+|b|^2 = {norm2!r})")
    return s


def pauli_map(s: SpinState) -> UnitVector3:
    """Bloch vector (2 Re a*b, 2 Im a*b, |a|^2 - |b|^2) of a normalized state."""
    _check_state(s)
    ab = s.alpha.conjugate() * s.beta
    x, y, z = 2.0 * ab.real, 2.0 * ab.imag, abs(s.alpha) ** 2 - abs(s.beta) ** 2
    # rounding can push |v| off 1 by a few ulps; renormalize so the type invariant holds
    return UnitVector3.normalized(x, y, z)


def state_from_direction(v: DirectionLike) -> SpinState:
    """The spin-up state |+>_v, with alpha = cos(t/2) e^{-ip/2}, beta = sin(t/2) e^{ip/2}."""
    v = as_direction(v)
    rho = math.hypot(v.x, v.y)
    # atan2 keeps full precision near the poles, where acos(z) does not
    theta = math.atan2(rho, v.z)
    phi = math.atan2(v.y, v.x) if rho > 0.0 else 0.0
    half = 0.5 * phi
    alpha = math.cos(0.5 * theta) * complex(math.cos(half), -math.sin(half))
    beta = math.sin(0.5 * theta) * complex(math.cos(half), math.sin(half))
    return SpinState.from_array((alpha, beta), normalize=True)


def spin_observable(n: DirectionLike) -> Operator2:
    """n . sigma, eigenvalues +1 / -1."""
    n = as_direction(n)
    return Operator2(n.x * SIGMA_X + n.y * SIGMA_Y + n.z * SIGMA_Z)


def projector(u: DirectionLike) -> Operator2:
    """P_u = |+>_u <+|_u."""
    ket = state_from_direction(u).as_array()
    return Operator2(np.outer(ket, ket.conj()))


def rotation_operator(n: DirectionLike, gamma: float) -> Operator2:
    """cos(gamma/2) I - i sin(gamma/2) (n . sigma)."""
    sig = spin_observable(n).matrix
    return Operator2(math.cos(0.5 * gamma) * IDENTITY - 1j * math.sin(0.5 * gamma) * sig)


def canonical_perpendicular(u: DirectionLike) -> UnitVector3:
    """Deterministic unit vector orthogonal to u.

    Crosses u with the basis axis along which u has the smallest absolute
    component (lowest index on ties).
    """
    u = as_direction(u)
    arr = u.as_array()
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(arr)))] = 1.0
    return UnitVector3.normalized(*np.cross(arr, axis))


def rotation_between(u: DirectionLike, v: DirectionLike) -> tuple[UnitVector3, float]:
    """Axis and angle with rotation_operator(axis, angle) |+>_u proportional to |+>_v.

    The axis is u x v normalized. For parallel inputs the angle is 0 and the
    axis is the canonical perpendicular; for antiparallel inputs the angle is
    pi about that same perpendicular.
    """
    u, v = as_direction(u), as_direction(v)
    gamma = u.angle_to(v)
    c = u.cross(v)
    norm = float(np.linalg.norm(c))
    if norm < 1e-12:
        return canonical_perpendicular(u), (0.0 if u.dot(v) > 0 else math.pi)
    return UnitVector3.normalized(*(c / norm)), gamma


def born_probability(s: SpinState, u: DirectionLike) -> float:
    """|<+_u|s>|^2."""
    _check_state(s)
    amp = state_from_direction(u).inner(s)
    return min(1.0, max(0.0, abs(amp) ** 2))


def sample_spin_measurement(
    s: SpinState, u: DirectionLike, rng: np.random.Generator
) -> tuple[Outcome, SpinState]:
    """Projective measurement of n . sigma along u; returns outcome and post-state."""
    u = as_direction(u)
    p = born_probability(s, u)
    if rng.random() < p:
        return Outcome.PLUS, state_from_direction(u)
    return Outcome.MINUS, state_from_direction(-u)


def sample_spin_counts(p_plus: float, trials: int, rng: np.random.Generator) -> int:
    """Number of +1 outcomes in ``trials`` independent Born-rule measurements."""
    return int(np.count_nonzero(rng.random(trials) < p_plus))


class TwoSpinState:
    """Normalized vector in C^2 (x) C^2, amplitudes ordered ++, +-, -+, -- in the z basis."""

    __slots__ = ("_amps",)

    def __init__(self, amplitudes):
        a = np.array(amplitudes, dtype=complex).reshape(4)
        norm2 = float(np.vdot(a, a).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidStateError(f"two-spin state is not normalized ({norm2!r})")
        a.setflags(write=False)
        self._amps = a

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    def ray_equal(self, other: "TwoSpinState", tol: float = RAY_TOL) -> bool:
        return abs(np.vdot(self._amps, other._amps)) > 1.0 - tol

    def expectation(self, op_a: Operator2, op_b: Operator2) -> float:
        """<psi| A (x) B |psi> by explicit 4x4 contraction."""
        big = np.kron(op_a.matrix, op_b.matrix)
        return float(np.vdot(self._amps, big @ self._amps).real)

    def joint_probabilities(self, c: DirectionLike, d: DirectionLike) -> dict[tuple[int, int], float]:
        """P(o_A, o_B) for spin measurements along c on A and d on B."""
        out = {}
        for oa in (1, -1):
            ka = state_from_direction(as_direction(c) if oa == 1 else -as_direction(c)).as_array()
            for ob in (1, -1):
                kb = state_from_direction(as_direction(d) if ob == 1 else -as_direction(d)).as_array()
                out[(oa, ob)] = float(abs(np.vdot(np.kron(ka, kb), self._amps)) ** 2)
        return out

    def marginal_plus_a(self, c: DirectionLike) -> float:
        p = self.joint_probabilities(c, Z_HAT)
        return p[(1, 1)] + p[(1, -1)]

    def marginal_plus_b(self, d: DirectionLike) -> float:
        p = self.joint_probabilities(Z_HAT, d)
        return p[(1, 1)] + p[(-1, 1)]


def singlet_state(reference: DirectionLike = Z_HAT) -> TwoSpinState:
    """(|+->  - |-+>)/sqrt(2) built from the up/down states along ``reference``."""
    w = as_direction(reference)
    up = state_from_direction(w).as_array()
    down = state_from_direction(-w).as_array()
    amps = (np.kron(up, down) - np.kron(down, up)) / math.sqrt(2.0)
    # re-normalize away rounding from the trig construction
    amps = amps / math.sqrt(float(np.vdot(amps, amps).real))
    return TwoSpinState(amps)


def singlet_expectation(c: DirectionLike, d: DirectionLike) -> float:
    """E = -c . d for the singlet."""
    return -as_direction(c).dot(as_direction(d))


def singlet_expectation_bruteforce(c: DirectionLike, d: DirectionLike) -> float:
    return singlet_state().expectation(spin_observable(c), spin_observable(d))


def singlet_joint_law(c: DirectionLike, d: DirectionLike) -> dict[tuple[int, int], float]:
    """Closed-form four-cell law: equal outcomes sin^2(g/2)/2, opposite cos^2(g/2)/2."""
    cd = min(1.0, max(-1.0, as_direction(c).dot(as_direction(d))))
    same = 0.25 * (1.0 - cd)
    diff = 0.25 * (1.0 + cd)
    return {(1, 1): same, (-1, -1): same, (1, -1): diff, (-1, 1): diff}


_CELLS = ((1, 1), (-1, -1), (1, -1), (-1, 1))


def _cell_edges(c: DirectionLike, d: DirectionLike) -> np.ndarray:
    law = singlet_joint_law(c, d)
    edges = np.cumsum([law[k] for k in _CELLS])
    edges[-1] = 1.0
    return edges


def singlet_sample(
    c: DirectionLike, d: DirectionLike, rng: np.random.Generator
) -> tuple[Outcome, Outcome]:
    """One coincidence draw on a fresh singlet pair."""
    edges = _cell_edges(c, d)
    oa, ob = _CELLS[int(np.searchsorted(edges, rng.random(), side="right"))]
    return Outcome(oa), Outcome(ob)


def singlet_sample_batch(
    c: DirectionLike, d: DirectionLike, trials: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized singlet_sample; consumes the stream exactly like ``trials`` scalar calls."""
    edges = _cell_edges(c, d)
    idx = np.searchsorted(edges, rng.random(trials), side="right")
    table = np.array(_CELLS, dtype=np.int8)
    return table[idx, 0], table[idx, 1]


def chsh_value(e_ab: float, e_ab2: float, e_a2b2: float, e_a2b: float) -> float:
    """|E_ab - E_ab'| + |E_a'b' + E_a'b|."""
    vals = (e_ab, e_ab2, e_a2b2, e_a2b)
    for e in vals:
        if not (math.isfinite(e) and -1.0 - 1e-12 <= e <= 1.0 + 1e-12):
            raise InvalidExpectationError(f"expectation {e!r} outside [-1, 1]")
    return float(abs(e_ab - e_ab2) + abs(e_a2b2 + e_a2b))
