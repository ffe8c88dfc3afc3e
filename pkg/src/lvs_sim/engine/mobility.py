"""
Truncated Levy Walk mobility for LVS Sim.

Users alternate flights (straight moves at constant speed along a uniform
heading) and pauses. Flight lengths and pause times follow power laws
truncated to finite ranges, drawn by inverse CDF. Positions reflect at the
edges of the region a user is confined to.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace

import numpy as np

from ..core.geometry import Box, Position, UserId, uniform_point
from ..core.scenario import TlwParams

TWO_PI = 2.0 * math.pi

__all__ = [
    "MobilityState",
    "TlwParams",
    "advance",
    "initial_state",
    "reflect",
    "sample_leg",
    "truncated_power_law",
    "truncated_power_law_cdf",
    "user_rng",
]


@dataclass(frozen=True, slots=True)
class MobilityState:
    """Per-user walk state.

    Exactly one of remaining_flight / remaining_pause is positive while the
    user is in that phase; pending_pause is the pause that follows the
    flight in progress.
    """

    position: Position
    remaining_flight: float
    heading: float
    remaining_pause: float
    pending_pause: float = 0.0

    @property
    def in_flight(self) -> bool:
        return self.remaining_flight > 0


def user_rng(seed: int, user_id: UserId, stream: str = "mobility") -> np.random.Generator:
    """Independent generator for one user, derived from the scenario seed.

    The id is folded through BLAKE2b so the stream does not depend on
    Python's randomized str hashing.
    """
    digest = hashlib.blake2b(f"{stream}:{user_id}".encode(), digest_size=8).digest()
    return np.random.default_rng([seed, int.from_bytes(digest, "big")])


def truncated_power_law(u: float, exponent: float, low: float, high: float) -> float:
    """Inverse CDF of the density proportional to x^(-1-exponent) on [low, high].

    Args:
        u: Uniform variate in [0, 1).
        exponent: Tail exponent (> 0).
        low: Lower truncation.
        high: Upper truncation.
    """
    if high <= low:
        return low
    a = low**-exponent
    b = high**-exponent
    value = (a - u * (a - b)) ** (-1.0 / exponent)
    return min(max(value, low), high)


def truncated_power_law_cdf(x: float, exponent: float, low: float, high: float) -> float:
    """Closed-form CDF matching truncated_power_law()."""
    if x <= low:
        return 0.0
    if x >= high:
        return 1.0
    a = low**-exponent
    return (a - x**-exponent) / (a - high**-exponent)


def sample_leg(params: TlwParams, rng: np.random.Generator) -> tuple[float, float, float]:
    """Draw one walk leg.

    Returns:
        (flight length in meters, heading in radians on [0, 2pi), pause in seconds).
    """
    flight = truncated_power_law(
        float(rng.random()), params.flight_exponent, params.min_flight, params.max_flight
    )
    heading = float(rng.uniform(0.0, TWO_PI))
    pause = truncated_power_law(
        float(rng.random()), params.pause_exponent, params.min_pause, params.max_pause
    )
    return flight, heading, pause


def reflect(value: float, low: float, high: float) -> tuple[float, bool]:
    """Fold a coordinate back into [low, high) by mirror reflection.

    Returns:
        (folded value, True when an odd number of reflections occurred).
    """
    span = high - low
    if low <= value < high:
        return value, False
    t = (value - low) % (2.0 * span)
    flipped = t >= span
    folded = high - (t - span) if flipped else low + t
    return min(folded, math.nextafter(high, low)), flipped


def initial_state(region: Box, params: TlwParams, rng: np.random.Generator) -> MobilityState:
    """Place a user uniformly in a region at the start of a fresh flight."""
    position = uniform_point(rng, region)
    flight, heading, pause = sample_leg(params, rng)
    return MobilityState(position, flight, heading, 0.0, pending_pause=pause)


def _move(
    position: Position, heading: float, distance: float, bounds: Box
) -> tuple[Position, float]:
    x, flip_x = reflect(position.x + distance * math.cos(heading), bounds.x_min, bounds.x_max)
    y, flip_y = reflect(position.y + distance * math.sin(heading), bounds.y_min, bounds.y_max)
    if flip_x:
        heading = math.pi - heading
    if flip_y:
        heading = -heading
    return Position(x, y), heading % TWO_PI


def advance(
    state: MobilityState,
    dt: float,
    params: TlwParams,
    bounds: Box,
    rng: np.random.Generator,
) -> MobilityState:
    """Integrate the walk over dt seconds.

    Flights are consumed at params.speed, then their pause; new legs are
    sampled whenever both are exhausted.

    Args:
        state: Current walk state.
        dt: Elapsed time in seconds (>= 0).
        params: Walk parameters.
        bounds: Region the user reflects in.
        rng: The user's generator.

    Returns:
        New walk state.
    """
    if dt < 0:
        raise ValueError("dt must be >= 0")
    if dt == 0:
        return state

    position = state.position
    heading = state.heading
    flight = state.remaining_flight
    pause = state.remaining_pause
    pending = state.pending_pause

    while dt > 0:
        if flight > 0:
            reach = dt * params.speed
            if reach >= flight:
                position, heading = _move(position, heading, flight, bounds)
                dt -= flight / params.speed
                flight, pause, pending = 0.0, pending, 0.0
            else:
                position, heading = _move(position, heading, reach, bounds)
                flight -= reach
                dt = 0.0
        elif pause > 0:
            if dt >= pause:
                dt -= pause
                pause = 0.0
            else:
                pause -= dt
                dt = 0.0
        else:
            flight, heading, pending = sample_leg(params, rng)
            if flight <= 0 and pending <= 0:
                # degenerate parameters, the user never moves
                break

    return replace(
        state,
        position=position,
        heading=heading,
        remaining_flight=flight,
        remaining_pause=pause,
        pending_pause=pending,
    )
