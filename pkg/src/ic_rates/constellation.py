"""Finite complex input alphabets: construction, rotation, symmetry analysis.

All alphabets are normalised to unit average energy, so the transmit power
enters later as a complex gain on the symbols rather than as a property of
the point set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist

ENERGY_TOL = 1e-12
DISTINCT_TOL = 1e-9
DEFAULT_MATCH_TOL = 1e-9


class UnsupportedAlphabetError(ValueError):
    """Raised for alphabet sizes outside the supported square-QAM family."""


def min_pairwise_distance(points) -> float:
    """Smallest Euclidean distance between any two points of a complex list."""
    pts = np.asarray(points, dtype=np.complex128).ravel()
    if pts.size < 2:
        raise ValueError("need at least two points")
    view = np.column_stack([pts.real, pts.imag])
    return float(pdist(view).min())


@dataclass(frozen=True, eq=False)
class Constellation:
    """A finite set of distinct complex symbols with unit average energy.

    Points are dimensionless; the physical transmit symbol is sqrt(P) times a
    point, so the normalisation carries the whole power budget.
    """

    points: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.complex128, copy=True).ravel()
        if pts.size < 2:
            raise ValueError("a constellation needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("constellation points must be finite")
        energy = float(np.mean(pts.real**2 + pts.imag**2))
        if abs(energy - 1.0) > ENERGY_TOL:
            raise ValueError(
                f"average energy {energy!r} deviates from 1 by more than {ENERGY_TOL}"
            )
        if min_pairwise_distance(pts) <= DISTINCT_TOL:
            raise ValueError("constellation points are not pairwise distinct")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return int(self.points.size)

    def __repr__(self) -> str:  # keep reprs short, the array itself is noise
        return f"Constellation(label={self.label!r}, size={self.size})"

    @classmethod
    def from_points(cls, points, label: str = "", normalize: bool = False):
        pts = np.asarray(points, dtype=np.complex128).ravel()
        if normalize:
            pts = pts / math.sqrt(float(np.mean(pts.real**2 + pts.imag**2)))
        return cls(pts, label)


def make_qam(m: int) -> Constellation:
    """Square m-QAM on the odd-integer grid, scaled to unit average energy.

    Point order is row-major: real part ascending (outer key), imaginary part
    ascending (inner key).  Sizes must be perfect squares with an even side,
    which covers the usual 4/16/64 family.
    """
    m = int(m)
    side = math.isqrt(m) if m > 0 else 0
    if m < 4 or side * side != m or side % 2:
        raise UnsupportedAlphabetError(
            f"unsupported QAM size {m}: need a perfect square with even side (4, 16, 64, ...)"
        )
    levels = np.arange(side) * 2.0 - (side - 1)
    grid = (levels[:, None] + 1j * levels[None, :]).ravel()
    scale = math.sqrt(float(np.mean(grid.real**2 + grid.imag**2)))
    return Constellation(grid / scale, label=f"{m}-QAM")


def rotate(c: Constellation, phi: float) -> Constellation:
    """Rotate every point by exp(1j*phi), preserving order and energy."""
    if not math.isfinite(phi):
        raise ValueError("rotation angle must be finite")
    return Constellation(c.points * np.exp(1j * phi), label=c.label)


@dataclass(frozen=True)
class RotatedAlphabet:
    """A base alphabet together with the transmitter-side rotation applied to it."""

    base: Constellation
    phi: float

    def __post_init__(self):
        if not math.isfinite(self.phi):
            raise ValueError("rotation angle must be finite")

    @property
    def constellation(self) -> Constellation:
        return rotate(self.base, self.phi)


def sets_match(a, b, tol: float = DEFAULT_MATCH_TOL) -> bool:
    """True when two complex lists are equal as point sets.

    Greedy nearest-neighbour matching with bijectivity: every point of ``a``
    must claim a distinct point of ``b`` within ``tol``.
    """
    a = np.asarray(a, dtype=np.complex128).ravel()
    b = np.asarray(b, dtype=np.complex128).ravel()
    if a.shape != b.shape:
        return False
    order = np.lexsort((a.imag, a.real))
    used = np.zeros(b.size, dtype=bool)
    for idx in order:
        d = np.abs(b - a[idx])
        d[used] = np.inf
        j = int(np.argmin(d))
        if d[j] > tol:
            return False
        used[j] = True
    return True


def periodicity(c: Constellation, tol: float = DEFAULT_MATCH_TOL) -> float:
    """Smallest angle > 0 whose rotation maps the point set onto itself.

    Candidate angles are 2*pi/n for n up to four times the alphabet size; a
    set with no rotational symmetry reports the full turn 2*pi.  Square QAM
    comes out at pi/2.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    for n in range(4 * c.size, 1, -1):
        phi = 2.0 * math.pi / n
        if sets_match(rotate(c, phi).points, c.points, tol):
            return phi
    return 2.0 * math.pi


def superposition(c_a: Constellation, c_b: Constellation, gain: complex) -> np.ndarray:
    """All pairwise sums ``a_k + gain * b_l``, row-major (k outer, l inner).

    The result is a plain point list, not a Constellation: collisions are
    meaningful (they mark unresolvable symbol pairs) and are kept.
    """
    gain = complex(gain)
    if not np.isfinite(gain):
        raise ValueError("gain must be finite")
    return (c_a.points[:, None] + gain * c_b.points[None, :]).ravel()


def min_superposition_distance(c_a: Constellation, c_b: Constellation, gain: complex) -> float:
    """Minimum pairwise distance of the superposition set; 0 flags collisions."""
    return min_pairwise_distance(superposition(c_a, c_b, gain))
