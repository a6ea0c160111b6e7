"""The spin quantum-machine: a particle on the unit sphere measured by a breakable elastic.

An experiment along ``u`` stretches an elastic between ``u`` and ``-u``. The
particle drops orthogonally onto it at chord coordinate ``x = v . u``
(``+1`` is the ``u`` end, ``-1`` the ``-u`` end). The elastic then breaks at a
point drawn from a break profile. The particle rides the fragment anchored on
its own side: a break below the particle pulls it to ``+u``, a break above
pulls it to ``-u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import InvalidParameterError
from .quantum_core import (
    DirectionLike,
    Outcome,
    UnitVector3,
    as_direction,
    canonical_perpendicular,
)
from .stats import FrequencyEstimate
from .streams import run_blocked


@dataclass(frozen=True)
class ParticleState:
    position: UnitVector3

    @classmethod
    def at(cls, v: DirectionLike) -> "ParticleState":
        return cls(as_direction(v))


@dataclass(frozen=True)
class Uniform:
    """Elastic equally likely to break anywhere along its length."""


@dataclass(frozen=True)
class FixedPoint:
    """Elastic that always breaks at chord coordinate ``x0``."""

    x0: float

    def __post_init__(self):
        if not -1.0 <= self.x0 <= 1.0:
            raise InvalidParameterError(f"fixed break point {self.x0!r} outside [-1, 1]")


@dataclass(frozen=True)
class Epsilon:
    """Breakable only on the central segment [-eps, eps]; rigid outside it."""

    eps: float

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise InvalidParameterError(f"epsilon {self.eps!r} outside [0, 1]")


BreakProfile = Union[Uniform, FixedPoint, Epsilon]


@dataclass(frozen=True)
class SqmOutcome:
    direction: UnitVector3
    sign: Outcome
    break_point: float
    landing: float
    # break_point == landing exactly; sign was assigned +1 by convention
    boundary: bool = False

    @property
    def state(self) -> ParticleState:
        return ParticleState(self.direction)


def _position(v) -> UnitVector3:
    return v.position if isinstance(v, ParticleState) else as_direction(v)


def land_on_chord(v: ParticleState | DirectionLike, u: DirectionLike) -> float:
    """Orthogonal projection of the particle onto the diameter: x = v . u."""
    return min(1.0, max(-1.0, _position(v).dot(as_direction(u))))


def _draw_breaks(profile: BreakProfile, rng: np.random.Generator, size=None):
    # uniform doubles in [0, 1) so +1 (and +eps) is never drawn
    if isinstance(profile, Uniform):
        return -1.0 + 2.0 * rng.random(size)
    if isinstance(profile, Epsilon):
        return profile.eps * (-1.0 + 2.0 * rng.random(size))
    if isinstance(profile, FixedPoint):
        return profile.x0 if size is None else np.full(size, profile.x0)
    raise InvalidParameterError(f"unknown break profile {profile!r}")


def sample_break(profile: BreakProfile, rng: np.random.Generator) -> float:
    return float(_draw_breaks(profile, rng))


def sample_breaks(profile: BreakProfile, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` break points; consumes the stream exactly like ``n`` calls to sample_break."""
    return np.asarray(_draw_breaks(profile, rng, n), dtype=float)


def deterministic_experiment(landing: float, break_point: float) -> Outcome:
    """Outcome of the hidden deterministic experiment that breaks at ``break_point``.

    A tie (the particle sits exactly on the break) resolves to +1.
    """
    return Outcome.PLUS if break_point <= landing else Outcome.MINUS


def deterministic_outcomes(landing: float, break_points: np.ndarray) -> np.ndarray:
    """Vectorized deterministic_experiment over many fixed break points."""
    return np.where(np.asarray(break_points) <= landing, 1, -1).astype(np.int8)


def run_measurement(
    v: ParticleState | DirectionLike,
    u: DirectionLike,
    profile: BreakProfile,
    rng: np.random.Generator,
) -> SqmOutcome:
    u = as_direction(u)
    landing = land_on_chord(v, u)
    b = sample_break(profile, rng)
    sign = deterministic_experiment(landing, b)
    direction = u if sign is Outcome.PLUS else -u
    return SqmOutcome(direction, sign, b, landing, boundary=(b == landing))


def run_sequence(
    v0: ParticleState | DirectionLike,
    directions: Sequence[DirectionLike],
    profile: BreakProfile,
    rng: np.random.Generator,
) -> list[SqmOutcome]:
    """Chain measurements, each starting from the previous outcome's position."""
    if len(directions) == 0:
        raise InvalidParameterError("a measurement sequence needs at least one direction")
    state = _position(v0)
    outcomes = []
    for u in directions:
        out = run_measurement(state, u, profile, rng)
        outcomes.append(out)
        state = out.direction
    return outcomes


def analytic_probability(v: ParticleState | DirectionLike, u: DirectionLike) -> tuple[float, float]:
    """(1 + cos g)/2 and (1 - cos g)/2 for the uniform elastic."""
    c = land_on_chord(v, u)
    return 0.5 * (1.0 + c), 0.5 * (1.0 - c)


def epsilon_probability_from_cos(cos_gamma: float, eps: float) -> tuple[float, float]:
    if not 0.0 <= eps <= 1.0:
        raise InvalidParameterError(f"epsilon {eps!r} outside [0, 1]")
    c = min(1.0, max(-1.0, cos_gamma))
    if c >= eps:
        return 1.0, 0.0
    if c <= -eps:
        return 0.0, 1.0
    if eps == 1.0:
        # same expression as analytic_probability so eps = 1 reproduces it bit for bit
        return 0.5 * (1.0 + c), 0.5 * (1.0 - c)
    return (eps + c) / (2.0 * eps), (eps - c) / (2.0 * eps)


def analytic_epsilon_probability(
    v: ParticleState | DirectionLike, u: DirectionLike, eps: float
) -> tuple[float, float]:
    """Piecewise outcome law of the eps-model (upper rigid / breakable / lower rigid)."""
    return epsilon_probability_from_cos(land_on_chord(v, u), eps)


def plus_frequency(
    v: ParticleState | DirectionLike,
    u: DirectionLike,
    profile: BreakProfile,
    trials: int,
    seed: int,
    key: tuple[int, ...] = (),
    workers: int = 1,
) -> FrequencyEstimate:
    """Monte Carlo frequency of the ``+u`` outcome over ``trials`` fresh runs."""
    landing = land_on_chord(v, u)

    def kernel(rng, n):
        return [np.count_nonzero(sample_breaks(profile, n, rng) <= landing)]

    return FrequencyEstimate(int(run_blocked(kernel, trials, seed, key, workers)[0]), trials)


def hidden_measurement_frequency(
    v: ParticleState | DirectionLike,
    u: DirectionLike,
    trials: int,
    seed: int,
    key: tuple[int, ...] = (),
    workers: int = 1,
) -> FrequencyEstimate:
    """Pick a deterministic experiment FixedPoint(x0), x0 ~ uniform[-1, 1), and run it."""
    landing = land_on_chord(v, u)

    def kernel(rng, n):
        x0 = -1.0 + 2.0 * rng.random(n)
        return [np.count_nonzero(deterministic_outcomes(landing, x0) == 1)]

    return FrequencyEstimate(int(run_blocked(kernel, trials, seed, key, workers)[0]), trials)


def direction_at_angle(u: DirectionLike, gamma: float) -> UnitVector3:
    """A direction making angle ``gamma`` with ``u`` (rotated in a fixed plane)."""
    u = as_direction(u)
    w = canonical_perpendicular(u)
    return UnitVector3.normalized(
        *(math.cos(gamma) * u.as_array() + math.sin(gamma) * w.as_array())
    )
