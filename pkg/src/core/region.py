# File: src/core/region.py
"""Membership queries for JM_d, boundary-curve export and geometric probes"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import csv
import io
import json
import logging
import threading

from scipy import optimize

from core.closed_form import (EvalMode, boundary_point, eval_T, povm_bound_eta, simple_regime_eta,
                              unit_efficiency_visibility, visibility)
from core.data_models import BoundarySample, Dimension, NoiseParams
from core.errors import DegenerateEndpointError, DegenerateMixtureError, MonotonicityViolationError
from utils.config_manager import TOLERANCES, get_config

logger = logging.getLogger(__name__)

CSV_HEADER = ("t", "eta", "p")


def _region_config() -> Dict[str, Any]:
    return get_config()["region"]


def curve_end_gap() -> Fraction:
    """Distance of the last exported t from the degenerate endpoint t = 1"""
    return Fraction(str(get_config()["closed_form"]["curve_end_gap"]))


def format_float(value: Any) -> str:
    """17 significant digits, '.' separator: lossless for doubles"""
    return format(float(value), ".17g")


@dataclass(frozen=True)
class BoundaryCurve:
    """Ordered boundary samples of one dimension"""
    d: int
    samples: Tuple[BoundarySample, ...]

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        tol = TOLERANCES["algebraic"]
        for before, after in zip(self.samples, self.samples[1:]):
            if not float(after.t) > float(before.t):
                raise ValueError("boundary samples must have strictly increasing t")
            if float(after.eta) > float(before.eta) + tol:
                raise ValueError("boundary efficiency must be non-increasing along the curve")

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def to_dict(self) -> Dict[str, Any]:
        return {"d": int(self.d), "samples": [sample.to_dict() for sample in self.samples]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for sample in self.samples:
            writer.writerow([format_float(sample.t), format_float(sample.eta), format_float(sample.p)])
        return buffer.getvalue()

    def save(self, filepath: str, fmt: str = "csv"):
        """Save curve to file (csv or json)"""
        text = self.to_csv() if fmt == "csv" else self.to_json()
        with open(filepath, "w", encoding="utf-8", newline="") as f:
            f.write(text)

    @classmethod
    def from_json(cls, text: str) -> 'BoundaryCurve':
        data = json.loads(text)
        return cls(d=int(data["d"]),
                   samples=tuple(BoundarySample.from_dict(item) for item in data["samples"]))

    @classmethod
    def from_csv(cls, text: str, d: int) -> 'BoundaryCurve':
        reader = csv.DictReader(io.StringIO(text))
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return cls(d=d, samples=tuple(BoundarySample.from_dict(row) for row in reader))


@dataclass(frozen=True)
class MembershipVerdict:
    inside: bool
    eta_max: float
    margin: float

    def to_dict(self) -> Dict[str, Any]:
        return {"inside": self.inside, "eta_max": self.eta_max, "margin": self.margin}


@dataclass(frozen=True)
class NonconvexityWitness:
    """Two boundary points whose q-mixture in the (eta, p) plane leaves JM_d"""
    first: BoundarySample
    second: BoundarySample
    q: float
    midpoint: NoiseParams
    verdict: MembershipVerdict


class _MonotonicityCache:
    """Per-dimension verification of strict increase of p(t) on [1/d, 1/2].

    p(t) equals p0(d) on all of [0, 1/d] and rises so flatly after 1/d that
    doubles cannot resolve it for large d, so the check is exact. Each
    dimension has its own lock; different dimensions verify concurrently.
    """

    def __init__(self):
        self._guard = threading.Lock()
        self._locks: Dict[int, threading.Lock] = {}
        self._verified: Dict[int, bool] = {}

    def _lock_for(self, d: int) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(d, threading.Lock())

    def ensure(self, d: int, n_points: int):
        if self._verified.get(d):
            return
        with self._lock_for(d):
            if self._verified.get(d):
                return
            self._verify(d, n_points)
            self._verified[d] = True

    @staticmethod
    def _verify(d: int, n_points: int):
        lower, upper = Fraction(1, d), Fraction(1, 2)
        if lower >= upper:
            return
        grid = [lower + (upper - lower) * Fraction(i, n_points - 1) for i in range(n_points)]
        values = [visibility(d, t, EvalMode.EXACT) for t in grid]
        for (t0, p0), (t1, p1) in zip(zip(grid, values), zip(grid[1:], values[1:])):
            if not p1 > p0:
                raise MonotonicityViolationError(
                    f"p(t) not strictly increasing for d={d} between t={float(t0):.6g} "
                    f"and t={float(t1):.6g}")
        logger.debug(f"p(t) verified strictly increasing on [1/{d}, 1/2] ({n_points} points)")


_MONOTONICITY = _MonotonicityCache()


def eta_max(d: int, p: float) -> float:
    """Largest efficiency with (eta, p) in JM_d"""
    d = Dimension(d)
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p <= unit_efficiency_visibility(d):
        return 1.0
    if p > 0.5:
        return simple_regime_eta(d, p)

    _MONOTONICITY.ensure(int(d), _region_config()["monotonicity_grid"])

    def excess(t: float) -> float:
        return visibility(d, t) - p

    # p within rounding of a bracket end
    if excess(0.5) <= 0:
        return eval_T(d, 0.5)
    if excess(1.0 / d) >= 0:
        return eval_T(d, 1.0 / d)

    try:
        t_star = optimize.bisect(excess, 1.0 / d, 0.5, xtol=_region_config()["bisection_xtol"])
    except (ValueError, RuntimeError) as e:
        raise MonotonicityViolationError(f"root-finding for p={p}, d={d} failed: {e}") from e
    return eval_T(d, t_star)


def is_jointly_measurable(d: int, params: NoiseParams) -> MembershipVerdict:
    """Closed-set membership test with the boundary tolerance"""
    limit = eta_max(d, params.p)
    margin = limit - params.eta
    return MembershipVerdict(inside=margin >= -TOLERANCES["membership"],
                             eta_max=limit, margin=margin)


def mixture(params1: NoiseParams, params2: NoiseParams, q: float) -> NoiseParams:
    """(eta, p) of the statistical mixture q*M1 + (1-q)*M2; both eta = 0 has no visibility"""
    if not 0 <= q <= 1:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    if q == 1:
        return params1
    if q == 0:
        return params2
    eta = q * params1.eta + (1 - q) * params2.eta
    if eta == 0:
        raise DegenerateMixtureError(
            f"mixture of two never-clicking measurements (q={q}): visibility undefined")
    p = (q * params1.eta * params1.p + (1 - q) * params2.eta * params2.p) / eta
    return NoiseParams(min(eta, 1.0), min(max(p, 0.0), 1.0))


def curve_grid(d: int, n_samples: int) -> List[Fraction]:
    """Uniform t-grid plus every breakpoint 1/(m+1); t = 1 moved to 1 - gap"""
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    grid = {Fraction(i, n_samples - 1) for i in range(n_samples)}
    grid.update(Fraction(1, m + 1) for m in range(1, d))
    grid.discard(Fraction(1))
    grid.add(1 - curve_end_gap())
    return sorted(grid)


def export_curve(d: int, n_samples: int,
                 mode: Union[EvalMode, str] = EvalMode.FLOAT64) -> BoundaryCurve:
    """Sample the boundary of JM_d"""
    d = Dimension(d)
    mode = EvalMode.of(mode)
    grid = curve_grid(d, n_samples)
    logger.info(f"Exporting boundary curve d={d} on {len(grid)} t-values ({mode.value})")
    samples = []
    for t in grid:
        try:
            samples.append(boundary_point(d, t, mode))
        except DegenerateEndpointError:
            # T_d(t) underflows near t = 1 in float64 for large d
            logger.warning(f"Curve for d={d} truncated at t={float(t):.6g}: efficiency underflows")
            break
    return BoundaryCurve(d=int(d), samples=tuple(samples))


def probe_nonconvexity(d: int, grid_size: Optional[int] = None,
                       min_violation: Optional[float] = None,
                       q: float = 0.5) -> Optional[NonconvexityWitness]:
    """Search boundary pairs whose (eta, p)-plane mixture lies outside JM_d"""
    d = Dimension(d)
    settings = _region_config()
    grid_size = grid_size or settings["nonconvexity_grid"]
    min_violation = settings["nonconvexity_min_violation"] if min_violation is None else min_violation

    grid = [Fraction(i, grid_size) for i in range(grid_size)]
    samples = [boundary_point(d, t) for t in grid]
    logger.info(f"Probing convexity of JM_{d} over {grid_size}x{grid_size} boundary pairs")

    for i, first in enumerate(samples):
        for second in samples[i + 1:]:
            midpoint = NoiseParams(q * first.eta + (1 - q) * second.eta,
                                   q * first.p + (1 - q) * second.p)
            verdict = is_jointly_measurable(d, midpoint)
            if verdict.margin < -min_violation:
                logger.info(f"Non-convexity witness: t={float(first.t):.4g}, "
                            f"t={float(second.t):.4g}, margin={verdict.margin:.4g}")
                return NonconvexityWitness(first, second, q, midpoint, verdict)
    logger.info(f"No non-convexity witness found for d={d}")
    return None


@dataclass(frozen=True)
class BoundComparison:
    """PVM boundary against the sufficient-only POVM bound at one visibility"""
    p: float
    eta_max: float
    povm_bound: float

    @property
    def ratio(self) -> float:
        return self.eta_max / self.povm_bound if self.povm_bound > 0 else float("nan")

    def to_dict(self) -> Dict[str, float]:
        return {"p": self.p, "eta_max": self.eta_max, "povm_bound": self.povm_bound,
                "ratio": self.ratio}


def compare_bounds(d: int, n_samples: int) -> List[BoundComparison]:
    """eta_max(d, p) and (1-p)^d on a uniform p-grid over [0, 1]"""
    d = Dimension(d)
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    rows = []
    for i in range(n_samples):
        p = i / (n_samples - 1)
        rows.append(BoundComparison(p=p, eta_max=eta_max(d, p), povm_bound=povm_bound_eta(d, p)))
    return rows
