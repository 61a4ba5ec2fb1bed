"""Achievable rate regions under strong interference.

Both receivers see the superposition of the two transmit signals (receiver 2
loses the cross link in the Z topology).  With unit-energy alphabets, power P
and cross-channel magnitude |h| at least one, the per-user constraints are
the interference-free single-input terms and the sum constraints add the
cross term of the corresponding receiver.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .constellation import Constellation
from .mi import EstimatorConfig, MIEstimate, ReceiverModel, mi_cross, mi_single

_VERTEX_TOL = 1e-12


class Topology(str, Enum):
    TWO_IC = "two_ic"
    Z_IC = "z_ic"


@dataclass(frozen=True)
class ChannelConfig:
    """Symmetric-power interference channel parameters.

    ``psi`` is the cross-channel phase, ``phi`` the transmitter-side rotation
    of user 2, ``power`` the common transmit power (linear).  Only the strong
    regime |h| >= 1 is supported.
    """

    topology: Topology
    h_abs: float
    psi: float = 0.0
    phi: float = 0.0
    power: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "topology", Topology(self.topology))
        if not math.isfinite(self.h_abs) or self.h_abs < 1.0:
            raise ValueError("h_abs must be finite and at least 1 (strong interference)")
        if not (math.isfinite(self.psi) and math.isfinite(self.phi)):
            raise ValueError("angles must be finite")
        if not math.isfinite(self.power) or self.power <= 0:
            raise ValueError("power must be positive")


@dataclass(frozen=True)
class RateRegion:
    """Constraint values of the pentagon {R1 <= a, R2 <= b, R1+R2 <= s}.

    ``sum_rx2`` is absent (None) for the Z topology and for the Gaussian
    region, where the two sum constraints coincide; keeping it absent rather
    than +inf keeps serialised output honest.
    """

    r1_max: float
    r2_max: float
    sum_rx1: float
    sum_rx2: float | None
    topology: Topology
    source: str = "finite"

    def __post_init__(self):
        object.__setattr__(self, "topology", Topology(self.topology))
        for name in ("r1_max", "r2_max", "sum_rx1"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and nonnegative")
        if self.sum_rx2 is not None and (
            not math.isfinite(self.sum_rx2) or self.sum_rx2 < 0
        ):
            raise ValueError("sum_rx2 must be finite and nonnegative when present")
        if self.topology is Topology.Z_IC and self.sum_rx2 is not None:
            raise ValueError("the Z topology has no receiver-2 sum constraint")
        if self.source not in ("finite", "gaussian"):
            raise ValueError("source must be 'finite' or 'gaussian'")


@dataclass(frozen=True)
class RegionTerms:
    """Raw estimates behind a finite-alphabet region.

    ``cond`` is the shared single-input term (both users transmit with the
    same power, and a phase on the gain cannot change a single-input term, so
    one estimate serves receiver 1 and receiver 2).
    """

    cond: MIEstimate
    cross_rx1: MIEstimate
    cross_rx2: MIEstimate | None


def receiver_model(ch: ChannelConfig, alphabet: Constellation, receiver: int) -> ReceiverModel:
    """Build the receive-signal model seen by one receiver.

    Receiver 1 decodes user 1 (a-branch) with user 2 arriving through the
    cross gain |h|*exp(1j*(psi+phi)).  Receiver 2 decodes user 2, rotated by
    phi, with user 1 arriving through |h|*exp(1j*psi); in the Z topology that
    cross link is absent.
    """
    amp = math.sqrt(ch.power)
    if receiver == 1:
        return ReceiverModel(
            gain_a=amp,
            alphabet_a=alphabet,
            gain_b=amp * ch.h_abs * cmath.exp(1j * (ch.psi + ch.phi)),
            alphabet_b=alphabet,
        )
    if receiver == 2:
        if ch.topology is Topology.TWO_IC:
            return ReceiverModel(
                gain_a=amp * cmath.exp(1j * ch.phi),
                alphabet_a=alphabet,
                gain_b=amp * ch.h_abs * cmath.exp(1j * ch.psi),
                alphabet_b=alphabet,
            )
        return ReceiverModel(
            gain_a=amp * cmath.exp(1j * ch.phi),
            alphabet_a=alphabet,
        )
    raise ValueError("receiver must be 1 or 2")


def finite_region_terms(ch: ChannelConfig, alphabet: Constellation, cfg: EstimatorConfig) -> RegionTerms:
    """Estimate the three (two for Z) information terms of the region."""
    amp = math.sqrt(ch.power)
    cond = mi_single(alphabet, amp, cfg)
    cross1 = mi_cross(receiver_model(ch, alphabet, 1), cfg)
    cross2 = None
    if ch.topology is Topology.TWO_IC:
        cross2 = mi_cross(receiver_model(ch, alphabet, 2), cfg)
    return RegionTerms(cond, cross1, cross2)


def region_from_terms(topology: Topology, terms: RegionTerms, source: str = "finite") -> RateRegion:
    """Assemble constraint values from raw estimates via the chain rule."""
    r = terms.cond.bits
    sum1 = r + terms.cross_rx1.bits
    sum2 = r + terms.cross_rx2.bits if terms.cross_rx2 is not None else None
    return RateRegion(r, r, sum1, sum2, Topology(topology), source)


def finite_region(ch: ChannelConfig, alphabet: Constellation, cfg: EstimatorConfig) -> RateRegion:
    """Finite-alphabet rate region of the configured channel."""
    return region_from_terms(ch.topology, finite_region_terms(ch, alphabet, cfg))


def gaussian_region(h_abs: float, power: float, topology: Topology = Topology.TWO_IC) -> RateRegion:
    """Gaussian-input region: per-user log2(1+P), one shared sum constraint
    log2(1 + P + |h|^2 P)."""
    if not math.isfinite(h_abs) or h_abs < 1.0:
        raise ValueError("h_abs must be finite and at least 1")
    if not math.isfinite(power) or power <= 0:
        raise ValueError("power must be positive")
    per_user = math.log2(1.0 + power)
    shared_sum = math.log2(1.0 + power + h_abs * h_abs * power)
    return RateRegion(per_user, per_user, shared_sum, None, Topology(topology), "gaussian")


def max_sum_rate(region: RateRegion) -> float:
    """Largest R1 + R2 inside the region."""
    best = region.r1_max + region.r2_max
    best = min(best, region.sum_rx1)
    if region.sum_rx2 is not None:
        best = min(best, region.sum_rx2)
    return best


def vertices(region: RateRegion) -> list[tuple[float, float]]:
    """Corner points of the region, counter-clockwise from the origin.

    A rectangle when the sum constraint is slack, otherwise the usual
    pentagon (degenerate corners are merged).
    """
    a, b = region.r1_max, region.r2_max
    s = region.sum_rx1
    if region.sum_rx2 is not None:
        s = min(s, region.sum_rx2)
    if s >= a + b:
        corners = [(0.0, 0.0), (a, 0.0), (a, b), (0.0, b)]
    else:
        corners = [(0.0, 0.0), (min(a, s), 0.0)]
        if s > a:
            corners.append((a, s - a))
        if s > b:
            corners.append((s - b, b))
        corners.append((0.0, min(b, s)))
    out: list[tuple[float, float]] = []
    for pt in corners:
        if out and abs(pt[0] - out[-1][0]) <= _VERTEX_TOL and abs(pt[1] - out[-1][1]) <= _VERTEX_TOL:
            continue
        out.append(pt)
    if len(out) > 1 and abs(out[0][0] - out[-1][0]) <= _VERTEX_TOL and abs(out[0][1] - out[-1][1]) <= _VERTEX_TOL:
        out.pop()
    return out
