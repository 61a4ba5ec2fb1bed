"""Deterministic parameter sweeps with caching and CSV output.

A sweep walks the Cartesian product of power, phase and |h| grids, derives
one seed per grid point from the base seed and the grid indices, and emits a
fixed-schema CSV.  Finished points are cached on disk keyed by a content hash
of everything that affects the result, so re-runs and partial re-runs are
cheap and byte-stable.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from itertools import product
from pathlib import Path

import numpy as np

from .constellation import Constellation, make_qam, periodicity
from .mi import EstimatorConfig, Method
from .region import ChannelConfig, RegionTerms, Topology, finite_region_terms, max_sum_rate, region_from_terms
from .rotation import effective_angles, optimize_rotation

CSV_HEADER = (
    "topology,M,P_dB,h_abs,psi,phi,rho1,rho2,I_cond_bits,I_cross_rx1_bits,"
    "I_cross_rx2_bits,sum_rate_bits,std_error_bits,method,samples,seed"
)

_ALPHABETS = {"qam4": 4, "qam16": 16, "qam64": 64}
_CACHE_ENV = "IC_RATES_CACHE"
_DEFAULT_CACHE = "~/.cache/ic-rates"


class SweepConfigError(ValueError):
    """Raised for malformed sweep specifications."""


class RotationMode(str, Enum):
    OFF = "off"
    OPTIMIZE = "optimize"
    FIXED = "fixed"


def resolve_alphabet(name: str) -> Constellation:
    """Map a config-file alphabet name to its constellation."""
    try:
        return make_qam(_ALPHABETS[name])
    except KeyError:
        raise SweepConfigError(
            f"unknown alphabet {name!r}; choose from {sorted(_ALPHABETS)}"
        ) from None


@dataclass(frozen=True)
class SweepSpec:
    """Everything a sweep needs, mirroring the JSON config schema."""

    topology: Topology
    alphabet: str
    power_db: tuple[float, ...]
    h_abs: tuple[float, ...]
    psi: tuple[float, ...]
    rotation: RotationMode = RotationMode.OFF
    rotation_phi: float = 0.0
    rotation_grid_points: int = 64
    estimator: EstimatorConfig = EstimatorConfig()
    output: str | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "topology", Topology(self.topology))
        object.__setattr__(self, "rotation", RotationMode(self.rotation))
        for name in ("power_db", "h_abs", "psi"):
            grid = tuple(float(v) for v in getattr(self, name))
            if not grid:
                raise SweepConfigError(f"{name} grid must not be empty")
            if not all(math.isfinite(v) for v in grid):
                raise SweepConfigError(f"{name} grid must be finite")
            object.__setattr__(self, name, grid)
        if any(h < 1.0 for h in self.h_abs):
            raise SweepConfigError("h_abs grid must stay in the strong regime (>= 1)")
        if not math.isfinite(self.rotation_phi):
            raise SweepConfigError("rotation_phi must be finite")
        if self.rotation_grid_points < 16:
            raise SweepConfigError("rotation_grid_points must be at least 16")
        if self.alphabet not in _ALPHABETS:
            raise SweepConfigError(
                f"unknown alphabet {self.alphabet!r}; choose from {sorted(_ALPHABETS)}"
            )
        if not 0 <= int(self.seed) < 2**64:
            raise SweepConfigError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class SweepRecord:
    """One CSV row; field order matches the header."""

    topology: Topology
    m: int
    p_db: float
    h_abs: float
    psi: float
    phi: float
    rho1: float
    rho2: float
    i_cond_bits: float
    i_cross_rx1_bits: float
    i_cross_rx2_bits: float | None
    sum_rate_bits: float
    std_error_bits: float
    method: Method
    samples: int
    seed: int


def spec_from_json(data: dict) -> SweepSpec:
    """Build a spec from a parsed JSON config."""
    if not isinstance(data, dict):
        raise SweepConfigError("sweep config must be a JSON object")
    known = {
        "topology", "alphabet", "power_db", "h_abs", "psi", "rotation",
        "estimator", "output", "seed", "rotation_grid_points",
    }
    unknown = set(data) - known
    if unknown:
        raise SweepConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("topology", "alphabet", "power_db", "h_abs", "psi"):
        if key not in data:
            raise SweepConfigError(f"missing config key {key!r}")

    rotation = data.get("rotation", "off")
    rotation_phi = 0.0
    if isinstance(rotation, dict):
        if set(rotation) != {"fixed"}:
            raise SweepConfigError("rotation object must be {\"fixed\": angle}")
        rotation_phi = float(rotation["fixed"])
        mode = RotationMode.FIXED
    else:
        try:
            mode = RotationMode(rotation)
        except ValueError:
            raise SweepConfigError(
                "rotation must be 'off', 'optimize' or {\"fixed\": angle}"
            ) from None
        if mode is RotationMode.FIXED:
            raise SweepConfigError("a fixed rotation needs its angle: {\"fixed\": angle}")

    est = data.get("estimator", {})
    if not isinstance(est, dict):
        raise SweepConfigError("estimator must be an object")
    try:
        estimator = EstimatorConfig(
            method=est.get("method", Method.MONTE_CARLO),
            samples=int(est.get("samples", 20000)),
            quadrature_order=int(est.get("quadrature_order", 24)),
        )
    except ValueError as exc:
        raise SweepConfigError(str(exc)) from None

    try:
        return SweepSpec(
            topology=data["topology"],
            alphabet=data["alphabet"],
            power_db=tuple(data["power_db"]),
            h_abs=tuple(data["h_abs"]),
            psi=tuple(data["psi"]),
            rotation=mode,
            rotation_phi=rotation_phi,
            rotation_grid_points=int(data.get("rotation_grid_points", 64)),
            estimator=estimator,
            output=data.get("output"),
            seed=int(data.get("seed", 0)),
        )
    except (TypeError, ValueError) as exc:
        raise SweepConfigError(str(exc)) from None


def derive_seed(base_seed: int, ip: int, ipsi: int, ih: int) -> int:
    """Per-point seed from the base seed and the grid indices (stable hash)."""
    ss = np.random.SeedSequence((int(base_seed), int(ip), int(ipsi), int(ih)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def cache_key(point_params: dict, estimator: EstimatorConfig) -> str:
    """Content hash of everything that affects one sweep point.

    The output path never enters; the seed, method and the active accuracy
    knob (samples for Monte Carlo, order for quadrature) always do.
    """
    accuracy = (
        {"samples": estimator.samples}
        if estimator.method is Method.MONTE_CARLO
        else {"quadrature_order": estimator.quadrature_order}
    )
    payload = {
        "point": {k: point_params[k] for k in sorted(point_params)},
        "estimator": {"method": estimator.method.value, **accuracy, "seed": estimator.seed},
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _point_params(spec: SweepSpec, p_db: float, psi: float, h_abs: float) -> dict:
    params = {
        "topology": spec.topology.value,
        "alphabet": spec.alphabet,
        "p_db": p_db,
        "psi": psi,
        "h_abs": h_abs,
        "rotation": spec.rotation.value,
    }
    if spec.rotation is RotationMode.FIXED:
        params["rotation_phi"] = spec.rotation_phi
    if spec.rotation is RotationMode.OPTIMIZE:
        params["rotation_grid_points"] = spec.rotation_grid_points
    return params


def _record_std_error(terms: RegionTerms) -> float:
    """Most conservative combined error among the sum-rate constraints."""
    candidates = [
        math.hypot(terms.cross_rx1.std_error, terms.cond.std_error),
        2.0 * terms.cond.std_error,  # r1+r2 reuses one estimate twice
    ]
    if terms.cross_rx2 is not None:
        candidates.append(math.hypot(terms.cross_rx2.std_error, terms.cond.std_error))
    return max(candidates)


def compute_point(spec: SweepSpec, p_db: float, psi: float, h_abs: float, seed: int) -> SweepRecord:
    """Evaluate one grid point: rotation choice, region terms, sum rate."""
    alphabet = resolve_alphabet(spec.alphabet)
    power = 10.0 ** (p_db / 10.0)
    cfg = replace(spec.estimator, seed=seed)
    per = periodicity(alphabet)

    if spec.rotation is RotationMode.OFF:
        phi = 0.0
    elif spec.rotation is RotationMode.FIXED:
        phi = spec.rotation_phi
    else:
        base = ChannelConfig(spec.topology, h_abs, psi, 0.0, power)
        rr = optimize_rotation(
            base, alphabet, grid_step=per / spec.rotation_grid_points, cfg=cfg
        )
        phi = rr.phi_star

    ch = ChannelConfig(spec.topology, h_abs, psi, phi, power)
    terms = finite_region_terms(ch, alphabet, cfg)
    region = region_from_terms(ch.topology, terms)
    rho1, rho2 = effective_angles(psi, phi, per)
    return SweepRecord(
        topology=spec.topology,
        m=alphabet.size,
        p_db=p_db,
        h_abs=h_abs,
        psi=psi,
        phi=phi,
        rho1=rho1,
        rho2=rho2,
        i_cond_bits=terms.cond.bits,
        i_cross_rx1_bits=terms.cross_rx1.bits,
        i_cross_rx2_bits=None if terms.cross_rx2 is None else terms.cross_rx2.bits,
        sum_rate_bits=max_sum_rate(region),
        std_error_bits=_record_std_error(terms),
        method=cfg.method,
        samples=terms.cross_rx1.samples_used,
        seed=seed,
    )


def _worker(args) -> SweepRecord:
    return compute_point(*args)


# ---------------------------------------------------------------------------
# cache plumbing
# ---------------------------------------------------------------------------

def _cache_dir(override) -> Path:
    if override is not None:
        return Path(override)
    return Path(os.environ.get(_CACHE_ENV, _DEFAULT_CACHE)).expanduser()


def _record_to_dict(rec: SweepRecord) -> dict:
    d = rec.__dict__.copy()
    d["topology"] = rec.topology.value
    d["method"] = rec.method.value
    return d


def _record_from_dict(d: dict) -> SweepRecord:
    return SweepRecord(
        topology=Topology(d["topology"]),
        m=int(d["m"]),
        p_db=float(d["p_db"]),
        h_abs=float(d["h_abs"]),
        psi=float(d["psi"]),
        phi=float(d["phi"]),
        rho1=float(d["rho1"]),
        rho2=float(d["rho2"]),
        i_cond_bits=float(d["i_cond_bits"]),
        i_cross_rx1_bits=float(d["i_cross_rx1_bits"]),
        i_cross_rx2_bits=None if d["i_cross_rx2_bits"] is None else float(d["i_cross_rx2_bits"]),
        sum_rate_bits=float(d["sum_rate_bits"]),
        std_error_bits=float(d["std_error_bits"]),
        method=Method(d["method"]),
        samples=int(d["samples"]),
        seed=int(d["seed"]),
    )


def _cache_load(path: Path) -> SweepRecord | None:
    try:
        with open(path) as fh:
            return _record_from_dict(json.load(fh))
    except (OSError, ValueError, KeyError, TypeError):
        return None  # missing or corrupted entries are recomputed


def _cache_store(path: Path, rec: SweepRecord) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(_record_to_dict(rec), fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# CSV serialisation
# ---------------------------------------------------------------------------

def _fmt(value: float | None) -> str:
    return "" if value is None else format(value, ".12g")


def record_to_row(rec: SweepRecord) -> str:
    fields = [
        rec.topology.value,
        str(rec.m),
        _fmt(rec.p_db),
        _fmt(rec.h_abs),
        _fmt(rec.psi),
        _fmt(rec.phi),
        _fmt(rec.rho1),
        _fmt(rec.rho2),
        _fmt(rec.i_cond_bits),
        _fmt(rec.i_cross_rx1_bits),
        _fmt(rec.i_cross_rx2_bits),
        _fmt(rec.sum_rate_bits),
        _fmt(rec.std_error_bits),
        rec.method.value,
        str(rec.samples),
        str(rec.seed),
    ]
    return ",".join(fields)


def record_from_row(row: str) -> SweepRecord:
    parts = row.split(",")
    if len(parts) != 16:
        raise ValueError(f"expected 16 CSV fields, got {len(parts)}")
    return SweepRecord(
        topology=Topology(parts[0]),
        m=int(parts[1]),
        p_db=float(parts[2]),
        h_abs=float(parts[3]),
        psi=float(parts[4]),
        phi=float(parts[5]),
        rho1=float(parts[6]),
        rho2=float(parts[7]),
        i_cond_bits=float(parts[8]),
        i_cross_rx1_bits=float(parts[9]),
        i_cross_rx2_bits=None if parts[10] == "" else float(parts[10]),
        sum_rate_bits=float(parts[11]),
        std_error_bits=float(parts[12]),
        method=Method(parts[13]),
        samples=int(parts[14]),
        seed=int(parts[15]),
    )


def write_csv(records: list[SweepRecord], path) -> None:
    lines = [CSV_HEADER] + [record_to_row(r) for r in records]
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> list[SweepRecord]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("not a sweep CSV (header mismatch)")
    return [record_from_row(line) for line in lines[1:]]


# ---------------------------------------------------------------------------
# the sweep itself
# ---------------------------------------------------------------------------

def run_sweep(
    spec: SweepSpec,
    use_cache: bool = True,
    cache_dir=None,
    workers: int = 1,
) -> list[SweepRecord]:
    """Evaluate the whole grid, reusing cached points, and write the CSV.

    Results are sorted by (P_dB, psi, h_abs) and are identical whether points
    run serially or on a process pool, because each point owns a seed derived
    from the base seed and its grid indices alone.
    """
    cdir = _cache_dir(cache_dir)
    jobs = []  # (sort position, cache path or None, task args or record)
    records: dict[int, SweepRecord] = {}
    pending = []
    paths: dict[int, Path | None] = {}

    pos = 0
    for (ip, p_db), (ipsi, psi), (ih, h_abs) in product(
        enumerate(spec.power_db), enumerate(spec.psi), enumerate(spec.h_abs)
    ):
        seed = derive_seed(spec.seed, ip, ipsi, ih)
        cfg = replace(spec.estimator, seed=seed)
        key = cache_key(_point_params(spec, p_db, psi, h_abs), cfg)
        path = cdir / f"{key}.json" if use_cache else None
        paths[pos] = path
        hit = _cache_load(path) if (use_cache and path.exists()) else None
        if hit is not None:
            records[pos] = hit
        else:
            pending.append((pos, (spec, p_db, psi, h_abs, seed)))
        pos += 1

    if pending:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                fresh = list(pool.map(_worker, [args for _, args in pending]))
        else:
            fresh = [_worker(args) for _, args in pending]
        for (slot, _), rec in zip(pending, fresh):
            records[slot] = rec
            if paths[slot] is not None:
                _cache_store(paths[slot], rec)

    out = sorted(records.values(), key=lambda r: (r.p_db, r.psi, r.h_abs))
    if spec.output:
        write_csv(out, spec.output)
    return out
