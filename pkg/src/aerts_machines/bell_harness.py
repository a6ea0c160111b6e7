"""Elastic-band Bell entity, coincidence experiments and CHSH scenarios.

Scientist A holds the left end of a red elastic band of unstretched length L,
scientist B the right end. Each can either pull (outcome +1 iff the collected
length exceeds L/2) or look at the colour (outcome +1 iff red). When both pull
a whole band it breaks, which creates the anticorrelation that drives the CHSH
value to 4. A band that is already broken only carries correlations that
existed beforehand, and stays at the classical bound of 2.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

from .errors import (
    ConsumedEntityError,
    InvalidExperimentError,
    InvalidParameterError,
)
from .quantum_core import (
    Outcome,
    UnitVector3,
    as_direction,
    chsh_value,
    singlet_expectation,
    singlet_sample_batch,
)
from .streams import run_blocked

FRAGMENT_TOL = 1e-12


class Side(enum.Enum):
    A = "A"
    B = "B"


class Kind(enum.Enum):
    PULL = "pull"
    COLOR = "color"


class Color(enum.Enum):
    RED = "red"
    OTHER = "other"


@dataclass(frozen=True)
class Experiment:
    side: Side
    kind: Kind


PULL_A = Experiment(Side.A, Kind.PULL)
COLOR_A = Experiment(Side.A, Kind.COLOR)
PULL_B = Experiment(Side.B, Kind.PULL)
COLOR_B = Experiment(Side.B, Kind.COLOR)


@dataclass(frozen=True)
class UniformBreak:
    pass


@dataclass(frozen=True)
class FixedBreak:
    """Breaks only at ``position`` measured from the left (A) end."""

    position: float


BandBreakProfile = Union[UniformBreak, FixedBreak]


@dataclass(frozen=True)
class Whole:
    profile: BandBreakProfile = field(default_factory=UniformBreak)


@dataclass(frozen=True)
class Broken:
    left_fragment: float
    right_fragment: float


@dataclass(frozen=True)
class BandEntity:
    total_length: float = 1.0
    color: Color = Color.RED
    state: Union[Whole, Broken] = field(default_factory=Whole)
    # set once anybody has pulled; the band then cannot be pulled again
    pulled_by: Optional[Side] = None

    def __post_init__(self):
        L = self.total_length
        if not (math.isfinite(L) and L > 0):
            raise InvalidParameterError(f"band length must be positive, got {L!r}")
        st = self.state
        if isinstance(st, Whole) and isinstance(st.profile, FixedBreak):
            if not 0.0 < st.profile.position < L:
                raise InvalidParameterError(
                    f"fixed break at {st.profile.position!r} is not strictly inside (0, {L})"
                )
        if isinstance(st, Broken):
            if not (0.0 <= st.left_fragment <= L and st.right_fragment >= 0.0):
                raise InvalidParameterError(f"invalid fragments {st}")
            if abs(st.left_fragment + st.right_fragment - L) > FRAGMENT_TOL:
                raise InvalidParameterError(
                    f"fragments {st.left_fragment} + {st.right_fragment} != {L}"
                )

    @property
    def consumed(self) -> bool:
        return self.pulled_by is not None

    @classmethod
    def whole(cls, length: float = 1.0, break_at: Optional[float] = None) -> "BandEntity":
        profile = UniformBreak() if break_at is None else FixedBreak(break_at)
        return cls(length, Color.RED, Whole(profile))

    @classmethod
    def broken(cls, left: float, length: float = 1.0) -> "BandEntity":
        return cls(length, Color.RED, Broken(left, length - left))


@dataclass(frozen=True)
class CoincidenceResult:
    outcome_a: Outcome
    outcome_b: Outcome
    post_state: BandEntity

    @property
    def product(self) -> int:
        return int(self.outcome_a) * int(self.outcome_b)


@dataclass(frozen=True)
class ExpectationEstimate:
    value: float
    trials: int
    standard_error: float

    @classmethod
    def exact(cls, value: float) -> "ExpectationEstimate":
        return cls(float(value), 0, 0.0)

    @classmethod
    def from_counts(cls, n_plus: int, trials: int) -> "ExpectationEstimate":
        """Estimate from the number of +1 products among ``trials`` products of +-1."""
        if trials < 1:
            raise InvalidParameterError("an expectation estimate needs at least one trial")
        mean = (2 * n_plus - trials) / trials
        # population std of a +-1 variable with this mean
        std = math.sqrt(max(0.0, 1.0 - mean * mean))
        return cls(mean, trials, std / math.sqrt(trials))


@dataclass(frozen=True)
class ChshReport:
    e_ab: ExpectationEstimate
    e_ab_prime: ExpectationEstimate
    e_a_prime_b_prime: ExpectationEstimate
    e_a_prime_b: ExpectationEstimate
    s_value: float

    @classmethod
    def from_estimates(cls, e_ab, e_ab_prime, e_a_prime_b_prime, e_a_prime_b) -> "ChshReport":
        s = chsh_value(e_ab.value, e_ab_prime.value, e_a_prime_b_prime.value, e_a_prime_b.value)
        return cls(e_ab, e_ab_prime, e_a_prime_b_prime, e_a_prime_b, s)

    @property
    def estimates(self) -> dict[str, ExpectationEstimate]:
        return {
            "ab": self.e_ab,
            "ab'": self.e_ab_prime,
            "a'b'": self.e_a_prime_b_prime,
            "a'b": self.e_a_prime_b,
        }

    @property
    def combined_standard_error(self) -> float:
        return math.sqrt(sum(e.standard_error ** 2 for e in self.estimates.values()))


def _fragment_outcome(length: float, total: float) -> Outcome:
    # exactly L/2 is "not greater than L/2"
    return Outcome.PLUS if length > total / 2.0 else Outcome.MINUS


def _color_outcome(band: BandEntity) -> Outcome:
    return Outcome.PLUS if band.color is Color.RED else Outcome.MINUS


def _own_fragment(band: BandEntity, side: Side) -> float:
    st = band.state
    return st.left_fragment if side is Side.A else st.right_fragment


def run_single(
    band: BandEntity, e: Experiment, rng: Optional[np.random.Generator] = None
) -> tuple[Outcome, BandEntity]:
    """One experimenter acting alone. ``rng`` is unused; kept for a uniform signature."""
    if e.kind is Kind.COLOR:
        return _color_outcome(band), band
    if band.consumed:
        raise ConsumedEntityError(f"band was already pulled by {band.pulled_by.value}")
    if isinstance(band.state, Whole):
        # a lone pull collects the whole band intact
        return _fragment_outcome(band.total_length, band.total_length), replace(
            band, pulled_by=e.side
        )
    return _fragment_outcome(_own_fragment(band, e.side), band.total_length), replace(
        band, pulled_by=e.side
    )


def _break_position(band: BandEntity, rng: Optional[np.random.Generator]) -> float:
    profile = band.state.profile
    if isinstance(profile, FixedBreak):
        return profile.position
    if rng is None:
        raise InvalidParameterError("a uniformly breaking band needs a random stream")
    return band.total_length * rng.random()


def run_coincidence(
    band: BandEntity,
    ea: Experiment,
    eb: Experiment,
    rng: Optional[np.random.Generator] = None,
) -> CoincidenceResult:
    if ea.side is not Side.A or eb.side is not Side.B:
        raise InvalidExperimentError(f"expected an A and a B experiment, got {ea.side}, {eb.side}")
    pulls = (ea.kind is Kind.PULL, eb.kind is Kind.PULL)
    if any(pulls) and band.consumed:
        raise ConsumedEntityError(f"band was already pulled by {band.pulled_by.value}")

    if all(pulls) and isinstance(band.state, Whole):
        L = band.total_length
        left = _break_position(band, rng)
        right = L - left
        post = replace(band, state=Broken(left, right), pulled_by=Side.A)
        return CoincidenceResult(_fragment_outcome(left, L), _fragment_outcome(right, L), post)

    if not any(pulls):
        return CoincidenceResult(_color_outcome(band), _color_outcome(band), band)

    if all(pulls):
        # pre-broken band, each side reads its own fragment
        L = band.total_length
        oa = _fragment_outcome(band.state.left_fragment, L)
        ob = _fragment_outcome(band.state.right_fragment, L)
        return CoincidenceResult(oa, ob, replace(band, pulled_by=Side.A))

    # one pull, one look; the light still reaches the looker
    puller = ea if pulls[0] else eb
    o_pull, post = run_single(band, puller)
    o_color = _color_outcome(band)
    if pulls[0]:
        return CoincidenceResult(o_pull, o_color, post)
    return CoincidenceResult(o_color, o_pull, post)


def estimate_expectation(
    factory: Callable[[int], BandEntity],
    ea: Experiment,
    eb: Experiment,
    trials: int,
    rng: Optional[np.random.Generator] = None,
) -> ExpectationEstimate:
    """Mean of o_A * o_B over ``trials`` fresh bands ``factory(i)``."""
    if trials < 1:
        raise InvalidParameterError("trials must be at least 1")
    n_plus = 0
    for i in range(trials):
        n_plus += run_coincidence(factory(i), ea, eb, rng).product == 1
    return ExpectationEstimate.from_counts(n_plus, trials)


def coincidence_outcomes(
    band: BandEntity, ea: Experiment, eb: Experiment, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Outcome arrays (o_A, o_B) for ``n`` fresh copies of ``band``.

    Vectorized twin of run_coincidence: consumes the stream the same way as
    ``n`` scalar calls, so both give identical outcomes for the same stream.
    """
    if isinstance(band.state, Whole) and ea.kind is Kind.PULL and eb.kind is Kind.PULL:
        L = band.total_length
        profile = band.state.profile
        if isinstance(profile, FixedBreak):
            left = np.full(n, profile.position)
        else:
            left = L * rng.random(n)
        right = L - left
        return (
            np.where(left > L / 2.0, 1, -1).astype(np.int8),
            np.where(right > L / 2.0, 1, -1).astype(np.int8),
        )
    res = run_coincidence(band, ea, eb, rng)
    return np.full(n, int(res.outcome_a), dtype=np.int8), np.full(n, int(res.outcome_b), dtype=np.int8)


def coincidence_products(
    band: BandEntity, ea: Experiment, eb: Experiment, n: int, rng: np.random.Generator
) -> np.ndarray:
    oa, ob = coincidence_outcomes(band, ea, eb, n, rng)
    return oa * ob


def exact_expectation(band: BandEntity, ea: Experiment, eb: Experiment) -> float:
    """E^{AB} from the outcome law rather than from sampling."""
    if (
        isinstance(band.state, Whole)
        and isinstance(band.state.profile, UniformBreak)
        and ea.kind is Kind.PULL
        and eb.kind is Kind.PULL
    ):
        # (+1,-1) and (-1,+1) each with probability 1/2; the tie at L/2 has measure zero
        return -1.0
    return float(run_coincidence(band, ea, eb).product)


# --- CHSH scenarios ---------------------------------------------------------


@dataclass(frozen=True)
class UniformBand:
    length: float = 1.0

    def band(self) -> BandEntity:
        return BandEntity.whole(self.length)


@dataclass(frozen=True)
class FixedBreakBand:
    length: float = 1.0
    break_at: float = 1.0 / 3.0

    def band(self) -> BandEntity:
        return BandEntity.whole(self.length, break_at=self.break_at)


@dataclass(frozen=True)
class PreBrokenBand:
    length: float = 1.0
    left: float = 1.0 / 3.0

    def band(self) -> BandEntity:
        return BandEntity.broken(self.left, self.length)


def _coplanar(angle: float) -> UnitVector3:
    # measurement plane orthogonal to the y flight axis
    return UnitVector3.normalized(math.sin(angle), 0.0, math.cos(angle))


@dataclass(frozen=True)
class QuantumSinglet:
    """Spin filters a, a', b, b'. Defaults: a=0, b=pi/4, a'=pi/2, b'=3pi/4 in the x-z plane."""

    a: UnitVector3 = field(default_factory=lambda: _coplanar(0.0))
    a_prime: UnitVector3 = field(default_factory=lambda: _coplanar(math.pi / 2))
    b: UnitVector3 = field(default_factory=lambda: _coplanar(math.pi / 4))
    b_prime: UnitVector3 = field(default_factory=lambda: _coplanar(3 * math.pi / 4))

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, as_direction(getattr(self, name)))

    @classmethod
    def from_angles(cls, a: float, a_prime: float, b: float, b_prime: float) -> "QuantumSinglet":
        return cls(_coplanar(a), _coplanar(a_prime), _coplanar(b), _coplanar(b_prime))


Scenario = Union[UniformBand, FixedBreakBand, PreBrokenBand, QuantumSinglet]

# (A experiment, B experiment) for ab, ab', a'b', a'b; a and b pull, a' and b' look
BAND_SETTINGS = (
    (PULL_A, PULL_B),
    (PULL_A, COLOR_B),
    (COLOR_A, COLOR_B),
    (COLOR_A, PULL_B),
)


def _singlet_settings(sc: QuantumSinglet):
    return ((sc.a, sc.b), (sc.a, sc.b_prime), (sc.a_prime, sc.b_prime), (sc.a_prime, sc.b))


def chsh_scenario(
    scenario: Scenario,
    trials: int = 0,
    seed: int = 42,
    workers: int = 1,
) -> ChshReport:
    """Four expectations and S for a scenario; ``trials == 0`` gives exact values.

    Monte Carlo runs draw each expectation from its own keyed stream of ``seed``.
    """
    if trials < 0:
        raise InvalidParameterError("trials must be non-negative")
    estimates = []
    if isinstance(scenario, QuantumSinglet):
        for k, (c, d) in enumerate(_singlet_settings(scenario)):
            if trials == 0:
                estimates.append(ExpectationEstimate.exact(singlet_expectation(c, d)))
                continue

            def kernel(rng, n, c=c, d=d):
                oa, ob = singlet_sample_batch(c, d, n, rng)
                return [np.count_nonzero(oa == ob)]

            n_plus = int(run_blocked(kernel, trials, seed, (k,), workers)[0])
            estimates.append(ExpectationEstimate.from_counts(n_plus, trials))
    elif isinstance(scenario, (UniformBand, FixedBreakBand, PreBrokenBand)):
        band = scenario.band()
        for k, (ea, eb) in enumerate(BAND_SETTINGS):
            if trials == 0:
                estimates.append(ExpectationEstimate.exact(exact_expectation(band, ea, eb)))
                continue

            def kernel(rng, n, ea=ea, eb=eb):
                return [np.count_nonzero(coincidence_products(band, ea, eb, n, rng) == 1)]

            n_plus = int(run_blocked(kernel, trials, seed, (k,), workers)[0])
            estimates.append(ExpectationEstimate.from_counts(n_plus, trials))
    else:
        raise InvalidParameterError(f"unknown scenario {scenario!r}")
    return ChshReport.from_estimates(*estimates)


# --- local hidden variables -------------------------------------------------


@dataclass(frozen=True)
class LhvStrategy:
    o_a: int
    o_a_prime: int
    o_b: int
    o_b_prime: int

    @property
    def s_value(self) -> float:
        return chsh_value(
            self.o_a * self.o_b,
            self.o_a * self.o_b_prime,
            self.o_a_prime * self.o_b_prime,
            self.o_a_prime * self.o_b,
        )


def lhv_strategies() -> list[LhvStrategy]:
    """All 16 deterministic pre-assignments of (o_a, o_a', o_b, o_b')."""
    return [LhvStrategy(*signs) for signs in itertools.product((1, -1), repeat=4)]


def lhv_maximum() -> float:
    return max(s.s_value for s in lhv_strategies())
