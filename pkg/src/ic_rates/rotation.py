"""Transmitter-side rotation: effective angles and grid optimisation.

Only the combinations psi+phi (receiver 1) and psi-phi (receiver 2) enter the
cross terms, each modulo the rotational period of the alphabet, so rotation
search happens on one period.  Conditional terms are rotation-invariant and
never enter the objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .constellation import Constellation, periodicity
from .mi import EstimatorConfig, mi_cross
from .region import ChannelConfig, Topology, receiver_model

_GRID_TOL = 1e-9
_DEFAULT_GRID_POINTS = 64


class ObjectiveKind(str, Enum):
    ZIC_CROSS = "zic_cross"
    TWO_IC_MAXMIN = "two_ic_maxmin"


@dataclass(frozen=True)
class RotationResult:
    """Outcome of a rotation search over one alphabet period.

    ``objective_bits`` is the cross-term objective at ``phi_star`` (the
    receiver-1 cross term for the Z kind, the smaller of the two cross terms
    for the max-min kind).  ``per_grid_values`` records the coarse grid as
    (phi, cross_rx1, cross_rx2 or None) tuples for plotting.
    """

    phi_star: float
    objective_bits: float
    objective_kind: ObjectiveKind
    grid_step: float
    per_grid_values: tuple[tuple[float, float, float | None], ...]


def effective_angles(psi: float, phi: float, phi_per: float) -> tuple[float, float]:
    """Effective cross phases (psi+phi, psi-phi), each reduced mod phi_per."""
    if not (math.isfinite(psi) and math.isfinite(phi)):
        raise ValueError("angles must be finite")
    if not math.isfinite(phi_per) or phi_per <= 0:
        raise ValueError("the rotation period must be positive")
    return (psi + phi) % phi_per, (psi - phi) % phi_per


def canonical_psi(psi: float, phi_per: float, rotation_enabled: bool) -> float:
    """Fold a cross-channel phase into its reduced domain.

    Without rotation the rate terms are periodic in psi with period phi_per
    and symmetric about phi_per/2, so psi folds into [0, phi_per/2].  With an
    optimised rotation there is an additional symmetry about phi_per/4 and
    the domain halves again.  This is an accelerator for sweeps; nothing else
    calls it.
    """
    if not math.isfinite(psi):
        raise ValueError("psi must be finite")
    if not math.isfinite(phi_per) or phi_per <= 0:
        raise ValueError("the rotation period must be positive")
    r = psi % phi_per
    half = 0.5 * phi_per
    if r > half:
        r = phi_per - r
    if rotation_enabled and r > 0.5 * half:
        r = half - r
    return r


def optimize_rotation(
    ch: ChannelConfig,
    alphabet: Constellation,
    kind: ObjectiveKind | None = None,
    grid_step: float | None = None,
    cfg: EstimatorConfig = EstimatorConfig(method="quad"),
    refine: bool = True,
) -> RotationResult:
    """Maximise the cross-term objective over the rotation angle.

    The angle of ``ch`` itself is ignored; the optimiser owns phi.  A coarse
    grid over one period is scanned first (ties broken towards the smallest
    angle), then one refinement pass at an eighth of the step runs around the
    winner.  With the Monte Carlo backend the noise streams are identical at
    every angle, so the scanned surface is smooth rather than jittery.
    """
    if kind is None:
        kind = (
            ObjectiveKind.ZIC_CROSS
            if ch.topology is Topology.Z_IC
            else ObjectiveKind.TWO_IC_MAXMIN
        )
    kind = ObjectiveKind(kind)
    per = periodicity(alphabet)
    step = per / _DEFAULT_GRID_POINTS if grid_step is None else float(grid_step)
    if not math.isfinite(step) or step <= 0:
        raise ValueError("grid_step must be positive")
    npts = round(per / step)
    if npts < 16 or abs(npts * step - per) > _GRID_TOL:
        raise ValueError("grid_step must divide the rotation period into at least 16 points")

    def evaluate(phi: float) -> tuple[float, float, float | None]:
        c = replace(ch, phi=phi)
        i1 = mi_cross(receiver_model(c, alphabet, 1), cfg).bits
        if kind is ObjectiveKind.TWO_IC_MAXMIN:
            i2 = mi_cross(receiver_model(c, alphabet, 2), cfg).bits
            return min(i1, i2), i1, i2
        return i1, i1, None

    trace = []
    best_phi = 0.0
    best_val = -math.inf
    for j in range(npts):
        phi = j * step
        val, i1, i2 = evaluate(phi)
        trace.append((phi, i1, i2))
        if val > best_val:
            best_val, best_phi = val, phi

    if refine:
        fine = step / 8.0
        for m in range(-7, 8):
            if m == 0:
                continue
            phi = (best_phi + m * fine) % per
            val, _, _ = evaluate(phi)
            if val > best_val or (val == best_val and phi < best_phi):
                best_val, best_phi = val, phi

    return RotationResult(best_phi, best_val, kind, step, tuple(trace))
