"""Very-strong-interference threshold search.

Interference is very strong once every cross term is at least the
single-input term: the sum constraints then stop binding and each user runs
at its interference-free rate.  For Gaussian inputs the crossover sits at
|h| = sqrt(1+P); for finite alphabets it is found by bisection on |h|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constellation import Constellation, periodicity
from .mi import EstimatorConfig, Method, mi_cross, mi_single
from .region import ChannelConfig, Topology, receiver_model
from .rotation import ObjectiveKind, optimize_rotation

_SCAN_POINTS = 8
_MAX_BRACKET_GROWTH = 3


class NoThresholdError(RuntimeError):
    """Raised when no very-strong crossover is found inside the search range."""


@dataclass(frozen=True)
class ThresholdQuery:
    """What to search for: channel family, input alphabet, tolerances.

    ``alphabet=None`` selects Gaussian inputs (closed forms, no estimator).
    ``mi_tolerance`` is the slack, in bits, granted to the cross terms when
    deciding the condition; ``tolerance_h`` is the bisection width target.
    """

    power: float
    alphabet: Constellation | None = None
    psi: float = 0.0
    rotation_enabled: bool = False
    tolerance_h: float = 1e-2
    mi_tolerance: float = 0.01
    topology: Topology = Topology.TWO_IC

    def __post_init__(self):
        if not math.isfinite(self.power) or self.power <= 0:
            raise ValueError("power must be positive")
        if not math.isfinite(self.tolerance_h) or self.tolerance_h <= 0:
            raise ValueError("tolerance_h must be positive")
        if not math.isfinite(self.mi_tolerance) or self.mi_tolerance < 0:
            raise ValueError("mi_tolerance must be nonnegative")
        object.__setattr__(self, "topology", Topology(self.topology))


@dataclass(frozen=True)
class ThresholdResult:
    h_vsi: float
    bracket: tuple[float, float]
    evaluations: int
    gaussian_reference: float

    def __post_init__(self):
        if self.h_vsi < 1.0:
            raise ValueError("thresholds live in the strong regime |h| >= 1")


def gaussian_vsi(power: float) -> float:
    """Closed-form crossover sqrt(1+P) for Gaussian inputs."""
    if not math.isfinite(power) or power <= 0:
        raise ValueError("power must be positive")
    return math.sqrt(1.0 + power)


def vsi_condition(
    ch: ChannelConfig,
    alphabet: Constellation,
    cfg: EstimatorConfig,
    mi_tolerance: float = 0.01,
    rotation_enabled: bool = False,
    rotation_grid_step: float | None = None,
) -> bool:
    """True when the channel is very strong for this alphabet.

    Checks min over receivers of the cross term against the single-input term
    minus ``mi_tolerance``.  With rotation enabled the minimum is first
    maximised over the rotation angle; the Z topology has a single cross term
    (receiver 2 is interference-free there).
    """
    cond = mi_single(alphabet, math.sqrt(ch.power), cfg).bits
    if rotation_enabled:
        kind = (
            ObjectiveKind.ZIC_CROSS
            if ch.topology is Topology.Z_IC
            else ObjectiveKind.TWO_IC_MAXMIN
        )
        best = optimize_rotation(ch, alphabet, kind=kind, grid_step=rotation_grid_step, cfg=cfg)
        worst_cross = best.objective_bits
    else:
        worst_cross = mi_cross(receiver_model(ch, alphabet, 1), cfg).bits
        if ch.topology is Topology.TWO_IC:
            worst_cross = min(
                worst_cross, mi_cross(receiver_model(ch, alphabet, 2), cfg).bits
            )
    return worst_cross >= cond - mi_tolerance


def find_threshold(query: ThresholdQuery, cfg: EstimatorConfig | None = None) -> ThresholdResult:
    """Bisect |h| for the smallest very-strong channel.

    The initial bracket is [1, sqrt(1+P)+0.5]; if the condition has not
    flipped there the upper end doubles away from 1 up to three times before
    the search gives up.  After bisection an eight-point scan inside the
    final bracket guards against a non-monotone condition; on a violation the
    whole range is rescanned at the width target.  Quadrature is the default
    backend so thresholds are reproducible without seed bookkeeping.
    """
    if cfg is None:
        cfg = EstimatorConfig(method=Method.GAUSS_HERMITE)
    reference = gaussian_vsi(query.power)
    power = query.power
    evaluations = 0

    if query.alphabet is None:
        per_user = math.log2(1.0 + power)

        def condition(h: float) -> bool:
            nonlocal evaluations
            evaluations += 1
            cross = math.log2(1.0 + power + h * h * power) - per_user
            return cross >= per_user - query.mi_tolerance

    else:
        grid_step = None
        if query.rotation_enabled:
            grid_step = periodicity(query.alphabet) / 64

        def condition(h: float) -> bool:
            nonlocal evaluations
            evaluations += 1
            ch = ChannelConfig(query.topology, h, query.psi, 0.0, power)
            return vsi_condition(
                ch,
                query.alphabet,
                cfg,
                mi_tolerance=query.mi_tolerance,
                rotation_enabled=query.rotation_enabled,
                rotation_grid_step=grid_step,
            )

    if condition(1.0):
        return ThresholdResult(1.0, (1.0, 1.0), evaluations, reference)

    lo, hi = 1.0, reference + 0.5
    growths = 0
    while not condition(hi):
        growths += 1
        if growths > _MAX_BRACKET_GROWTH:
            raise NoThresholdError(
                f"condition still false at |h| = {hi:.6g} after bracket growth"
            )
        hi = 1.0 + 2.0 * (hi - 1.0)

    while hi - lo > query.tolerance_h:
        mid = 0.5 * (lo + hi)
        if condition(mid):
            hi = mid
        else:
            lo = mid

    flags = [condition(h) for h in np.linspace(lo, hi, _SCAN_POINTS + 2)[1:-1]]
    if any(flags[i] and not flags[i + 1] for i in range(len(flags) - 1)):
        # the condition wobbled inside the bracket: rescan the whole range
        h = 1.0
        top = reference + 0.5
        while h <= top + query.tolerance_h:
            if condition(h):
                return ThresholdResult(
                    h, (max(1.0, h - query.tolerance_h), h), evaluations, reference
                )
            h += query.tolerance_h
        raise NoThresholdError("no stable crossover found in a full scan")

    return ThresholdResult(0.5 * (lo + hi), (lo, hi), evaluations, reference)
