"""Mutual-information estimators for discrete inputs in complex Gaussian noise.

Every rate-region constraint reduces to an expectation, over CN(0,1) receiver
noise, of a log-likelihood ratio between Gaussian mixtures centred on symbol
differences.  Two backends realise that expectation:

* Monte Carlo, with one independent noise stream per expectation term.  The
  stream depends only on (seed, term indices), never on gains or angles, so
  sweeps over channel parameters see common random numbers and optimisation
  surfaces stay smooth.
* Tensorised Gauss-Hermite quadrature, fully deterministic, implemented in
  plain NumPy as an in-package oracle for the sampler.

The outer averages over transmitted symbols are always exact sums; only the
noise is sampled or quadratured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .constellation import Constellation, min_pairwise_distance

_LOG2E = math.log2(math.e)
_DISTINCT_TOL = 1e-9
_JOINT_LIMIT = 4096
_QUAD_CHUNK = 8_000_000  # element budget per temporary in the quadrature path


class Method(str, Enum):
    MONTE_CARLO = "mc"
    GAUSS_HERMITE = "quad"


@dataclass(frozen=True)
class EstimatorConfig:
    """Numerical settings shared by all estimators.

    ``samples`` counts Monte Carlo draws per expectation term, the quadrature
    order is per real dimension (order**2 nodes in total), and the seed pins
    every noise stream.
    """

    method: Method = Method.MONTE_CARLO
    samples: int = 20000
    quadrature_order: int = 24
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if self.method is Method.MONTE_CARLO and self.samples < 1000:
            raise ValueError("Monte Carlo needs at least 1000 samples per term")
        if not 8 <= int(self.quadrature_order) <= 64:
            raise ValueError("quadrature order must lie in [8, 64]")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class MIEstimate:
    """One mutual-information value in bits plus its statistical quality."""

    bits: float
    std_error: float
    method: Method
    samples_used: int


@dataclass(frozen=True)
class ReceiverModel:
    """One receive signal ``Y = gain_a * X_a + gain_b * X_b + Z``.

    The a-branch carries the symbol whose conditional rate is of interest;
    the b-branch is the co-channel signal a cross term decodes.  ``alphabet_b``
    may be omitted for single-input models.
    """

    gain_a: complex
    alphabet_a: Constellation
    gain_b: complex = 0j
    alphabet_b: Constellation | None = None

    def __post_init__(self):
        ga = complex(self.gain_a)
        gb = complex(self.gain_b)
        if not (np.isfinite(ga) and np.isfinite(gb)):
            raise ValueError("receiver gains must be finite")
        if ga == 0:
            raise ValueError("the decoded branch needs a nonzero gain")
        if gb != 0 and self.alphabet_b is None:
            raise ValueError("a nonzero interferer gain needs an alphabet_b")
        object.__setattr__(self, "gain_a", ga)
        object.__setattr__(self, "gain_b", gb)


def _noise_stream(seed: int, key: tuple[int, ...], count: int) -> np.ndarray:
    """CN(0,1) draws for one expectation term, keyed by (seed, *key).

    Streams depend on nothing but the seed and the term indices, which is what
    makes common random numbers across channel parameters automatic.
    """
    rng = np.random.default_rng((int(seed),) + tuple(int(k) for k in key))
    x = rng.standard_normal((count, 2))
    return (x[:, 0] + 1j * x[:, 1]) * math.sqrt(0.5)


@lru_cache(maxsize=8)
def _gh_grid(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Two-dimensional Gauss-Hermite nodes and weights matched to CN(0,1).

    Nodes are symmetrised so the grid is closed under sign flips and complex
    conjugation to machine precision; weights are renormalised to sum to one.
    """
    t, w = np.polynomial.hermite.hermgauss(order)
    t = 0.5 * (t - t[::-1])
    w = 0.5 * (w + w[::-1])
    z = (t[:, None] + 1j * t[None, :]).ravel()
    wt = (w[:, None] * w[None, :]).ravel()
    wt = wt / wt.sum()
    z.setflags(write=False)
    wt.setflags(write=False)
    return z, wt


def _diff_matrix(points: np.ndarray, gain: complex) -> np.ndarray:
    return gain * (points[:, None] - points[None, :])


def _check_ceiling(bits: float, cap: float, std_error: float) -> None:
    if bits > cap + 3.0 * std_error + 1e-9:
        raise ArithmeticError(
            f"estimate {bits} exceeds the entropy ceiling {cap} beyond 3 standard errors"
        )


def _require_pair(model: ReceiverModel) -> None:
    if model.alphabet_b is None:
        raise ValueError("this term needs both alphabets on the receiver model")


# ---------------------------------------------------------------------------
# single-input terms: I(Y;X) for Y = g*X + Z, also the conditional terms
# ---------------------------------------------------------------------------

def _single_stats_mc(diffs: np.ndarray, cfg: EstimatorConfig):
    from . import _kernels  # deferred so quadrature-only flows skip the JIT

    m = diffs.shape[0]
    w = np.full(cfg.samples, 1.0 / cfg.samples)
    means = np.empty(m)
    seconds = np.empty(m)
    for k in range(m):
        z = _noise_stream(cfg.seed, (k,), cfg.samples)
        means[k], seconds[k] = _kernels.single_pair_stats(
            np.ascontiguousarray(diffs[k]), z, w
        )
    var_of_mean = np.clip(seconds - means**2, 0.0, None) / (cfg.samples - 1)
    return means, math.sqrt(float(var_of_mean.sum())) / m


def _single_means_quad(diffs: np.ndarray, cfg: EstimatorConfig) -> np.ndarray:
    z, w = _gh_grid(cfg.quadrature_order)
    m = diffs.shape[0]
    zsq = z.real**2 + z.imag**2
    rows = max(1, int(_QUAD_CHUNK // (z.size * m)))
    means = np.empty(m)
    for start in range(0, m, rows):
        block = diffs[start : start + rows]
        shifted = block[:, None, :] + z[None, :, None]  # (rows, nodes, M)
        log_num = logsumexp(-(shifted.real**2 + shifted.imag**2), axis=2)
        means[start : start + rows] = ((log_num + zsq[None, :]) * _LOG2E) @ w
    return means


def _streams_for_direct(j: int, size_b: int) -> tuple[int, int]:
    # joint hypothesis j maps back to the (k, l) pair it was built from, so
    # chain-rule and brute-force paths share noise where they overlap
    return divmod(j, size_b)


def _direct_stats_mc(diffs: np.ndarray, size_b: int, cfg: EstimatorConfig):
    from . import _kernels

    n = diffs.shape[0]
    w = np.full(cfg.samples, 1.0 / cfg.samples)
    means = np.empty(n)
    seconds = np.empty(n)
    for j in range(n):
        z = _noise_stream(cfg.seed, _streams_for_direct(j, size_b), cfg.samples)
        means[j], seconds[j] = _kernels.single_pair_stats(
            np.ascontiguousarray(diffs[j]), z, w
        )
    var_of_mean = np.clip(seconds - means**2, 0.0, None) / (cfg.samples - 1)
    return means, math.sqrt(float(var_of_mean.sum())) / n


def mi_single(alphabet: Constellation, gain: complex, cfg: EstimatorConfig) -> MIEstimate:
    """I(Y;X) in bits for Y = gain*X + Z, X uniform on the alphabet.

    This is also every conditional term of the rate regions: conditioning on
    the other user's symbol removes it from the receive signal.
    """
    gain = complex(gain)
    if not np.isfinite(gain) or gain == 0:
        raise ValueError("gain must be finite and nonzero")
    pts = alphabet.points
    if min_pairwise_distance(pts) <= _DISTINCT_TOL:
        raise ValueError("alphabet has duplicate points")
    diffs = _diff_matrix(pts, gain)
    if cfg.method is Method.MONTE_CARLO:
        means, se = _single_stats_mc(diffs, cfg)
        used = cfg.samples
    else:
        means = _single_means_quad(diffs, cfg)
        se, used = 0.0, cfg.quadrature_order**2
    cap = math.log2(alphabet.size)
    bits = max(cap - float(means.mean()), 0.0)
    _check_ceiling(bits, cap, se)
    return MIEstimate(bits, se, cfg.method, used)


# ---------------------------------------------------------------------------
# cross term: I(Y;X_b) with the a-branch unknown at the decoder
# ---------------------------------------------------------------------------

def _cross_stats_mc(da: np.ndarray, db: np.ndarray, cfg: EstimatorConfig):
    from . import _kernels

    ma, mb = da.shape[0], db.shape[0]
    w = np.full(cfg.samples, 1.0 / cfg.samples)
    means = np.empty((ma, mb))
    seconds = np.empty((ma, mb))
    for k in range(ma):
        row_a = np.ascontiguousarray(da[k])
        for l in range(mb):
            z = _noise_stream(cfg.seed, (k, l), cfg.samples)
            means[k, l], seconds[k, l] = _kernels.cross_pair_stats(
                row_a, np.ascontiguousarray(db[l]), z, w
            )
    var_of_mean = np.clip(seconds - means**2, 0.0, None) / (cfg.samples - 1)
    return means, math.sqrt(float(var_of_mean.sum())) / (ma * mb)


def _cross_means_quad(da: np.ndarray, db: np.ndarray, cfg: EstimatorConfig) -> np.ndarray:
    z, w = _gh_grid(cfg.quadrature_order)
    ma, mb = da.shape[0], db.shape[0]
    means = np.empty((ma, mb))
    for k in range(ma):
        shifted = da[k][None, :] + z[:, None]  # (nodes, Ma)
        log_den = logsumexp(-(shifted.real**2 + shifted.imag**2), axis=1)
        joint = shifted[None, :, :, None] + db[:, None, None, :]  # (Mb, nodes, Ma, Mb)
        log_num = logsumexp(
            -(joint.real**2 + joint.imag**2).reshape(mb, z.size, ma * mb), axis=2
        )
        means[k] = ((log_num - log_den[None, :]) * _LOG2E) @ w
    return means


def mi_cross(model: ReceiverModel, cfg: EstimatorConfig) -> MIEstimate:
    """I(Y;X_b) in bits: how much the receive signal reveals about the
    co-channel symbol when its own symbol is unknown too.

    The numerator of the log ratio marginalises both branches, the
    denominator only the a-branch (the b symbol being conditioned on).
    """
    _require_pair(model)
    da = _diff_matrix(model.alphabet_a.points, model.gain_a)
    db = _diff_matrix(model.alphabet_b.points, model.gain_b)
    mb = model.alphabet_b.size
    if cfg.method is Method.MONTE_CARLO:
        means, se = _cross_stats_mc(da, db, cfg)
        used = cfg.samples
    else:
        means = _cross_means_quad(da, db, cfg)
        se, used = 0.0, cfg.quadrature_order**2
    cap = math.log2(mb)
    bits = max(cap - float(means.mean()), 0.0)
    _check_ceiling(bits, cap, se)
    return MIEstimate(bits, se, cfg.method, used)


def mi_joint(model: ReceiverModel, cfg: EstimatorConfig) -> MIEstimate:
    """Joint information I(Y; X_a, X_b) via the chain rule:
    cross term plus the conditional single-input term of the a-branch.
    """
    _require_pair(model)
    cross = mi_cross(model, cfg)
    cond = mi_single(model.alphabet_a, model.gain_a, cfg)
    bits = cross.bits + cond.bits
    se = math.hypot(cross.std_error, cond.std_error)
    _check_ceiling(bits, math.log2(model.alphabet_a.size * model.alphabet_b.size), se)
    return MIEstimate(bits, se, cfg.method, cross.samples_used)


def mi_joint_direct(model: ReceiverModel, cfg: EstimatorConfig) -> MIEstimate:
    """Joint information computed without the chain rule.

    The M_a * M_b superposition points form one hypothesis list (collisions
    permitted, each pair keeps probability 1/(M_a*M_b)) and the single-input
    form runs over it.  Brute force, intended as a consistency check.
    """
    _require_pair(model)
    na, nb = model.alphabet_a.size, model.alphabet_b.size
    n = na * nb
    if n > _JOINT_LIMIT:
        raise ValueError(f"joint brute force supports at most {_JOINT_LIMIT} hypotheses")
    s = (
        model.gain_a * model.alphabet_a.points[:, None]
        + model.gain_b * model.alphabet_b.points[None, :]
    ).ravel()
    diffs = s[:, None] - s[None, :]
    if cfg.method is Method.MONTE_CARLO:
        means, se = _direct_stats_mc(diffs, nb, cfg)
        used = cfg.samples
    else:
        means = _single_means_quad(diffs, cfg)
        se, used = 0.0, cfg.quadrature_order**2
    cap = math.log2(n)
    bits = max(cap - float(means.mean()), 0.0)
    _check_ceiling(bits, cap, se)
    return MIEstimate(bits, se, cfg.method, used)
