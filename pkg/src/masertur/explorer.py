"""Parameter sweeps, heatmaps and Monte Carlo exploration of the engine.

All drivers are deterministic: sweeps and heatmaps are pure functions of
their specs, and the Monte Carlo sampler draws every sample from a
counter-based stream keyed by (seed, sample index). Work is split into
fixed-size chunks, so results are bit-identical no matter how many workers
process them.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .bound import quantum_bound
from .errors import ConfigError, DomainError, NumericalError
from .model import EngineParams, steady_state_closed_form
from .uncertainty import thermodynamic_uncertainty

#: Samples with |n_l - n_u| below this are excluded (and counted) in
#: Monte Carlo runs; matches the oracle guard used by the test suites.
MC_EXCLUSION = 1e-3

#: Fixed chunk size of the Monte Carlo index grid. Never depends on the
#: worker count, which is what makes parallel runs reproducible.
MC_CHUNK = 65536

#: Uniform ranges of the standard exploration region, in kernels.PARAM_ORDER.
STANDARD_RANGES = (
    (1e-4, 5.0),
    (1e-4, 5.0),
    (1e-4, 10.0),
    (1e-4, 10.0),
    (1e-4, 1.0),
    (0.0, 1.0),
)

_SCALES = ("linear", "log")


@dataclass(frozen=True)
class AxisSpec:
    """A one-dimensional grid over one parameter."""

    lo: float
    hi: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigError(f"axis range must satisfy lo < hi, got [{self.lo}, {self.hi}]")
        if self.points < 2:
            raise ConfigError("axis needs at least 2 points")
        if self.scale not in _SCALES:
            raise ConfigError(f"scale must be one of {_SCALES}, got {self.scale!r}")
        if self.scale == "log" and self.lo <= 0:
            raise ConfigError("log scale requires lo > 0")

    def grid(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep around a base operating point."""

    base: EngineParams
    axis: str
    lo: float
    hi: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.axis not in kernels.PARAM_ORDER:
            raise ConfigError(
                f"axis must be one of {kernels.PARAM_ORDER}, got {self.axis!r}"
            )

    def grid(self) -> np.ndarray:
        return AxisSpec(self.lo, self.hi, self.points, self.scale).grid()


@dataclass(frozen=True)
class McSpec:
    """Monte Carlo study specification.

    dists holds the per-parameter uniform ranges in kernels.PARAM_ORDER;
    hist_range fixes the common histogram window (bins of width bin_width).
    """

    samples: int = 1_000_000
    bin_width: float = 0.01
    seed: int = 0
    dists: tuple = STANDARD_RANGES
    hist_range: tuple = (0.0, 20.0)

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.bin_width <= 0:
            raise ConfigError("bin_width must be > 0")
        if len(self.dists) != len(kernels.PARAM_ORDER):
            raise ConfigError("dists must give one (lo, hi) range per parameter")
        for name, (lo, hi) in zip(kernels.PARAM_ORDER, self.dists):
            if not lo < hi:
                raise ConfigError(f"range for {name} must satisfy lo < hi")
            if name in ("gamma_u", "gamma_l") and lo <= 0:
                raise ConfigError(f"range for {name} must be positive")
            if name in ("n_u", "n_l", "epsilon") and lo < 0:
                raise ConfigError(f"range for {name} must be nonnegative")
        if not self.hist_range[0] < self.hist_range[1]:
            raise ConfigError("hist_range must satisfy lo < hi")


@dataclass
class Histogram:
    """Fixed-width histogram with under/overflow counters."""

    bin_edges: np.ndarray
    counts: np.ndarray
    underflow: int = 0
    overflow: int = 0
    total: int = 0

    @classmethod
    def from_range(cls, lo: float, hi: float, width: float) -> "Histogram":
        nbins = int(round((hi - lo) / width))
        if nbins < 1:
            raise ConfigError("histogram range shorter than one bin")
        edges = lo + width * np.arange(nbins + 1)
        return cls(bin_edges=edges, counts=np.zeros(nbins, dtype=np.int64))

    @property
    def nbins(self) -> int:
        return len(self.counts)

    def add(self, values: np.ndarray) -> None:
        lo = self.bin_edges[0]
        width = self.bin_edges[1] - self.bin_edges[0]
        raw = np.floor((values - lo) / width).astype(np.int64)
        self.underflow += int((raw < 0).sum())
        self.overflow += int((raw >= self.nbins).sum())
        in_range = raw[(raw >= 0) & (raw < self.nbins)]
        self.counts += np.bincount(in_range, minlength=self.nbins)
        self.total += len(values)

    def merge(self, other: "Histogram") -> None:
        if not np.array_equal(self.bin_edges, other.bin_edges):
            raise ValueError("cannot merge histograms with different binning")
        self.counts += other.counts
        self.underflow += other.underflow
        self.overflow += other.overflow
        self.total += other.total

    def to_dict(self) -> dict:
        return {
            "bin_edges": self.bin_edges.tolist(),
            "counts": self.counts.tolist(),
            "underflow": self.underflow,
            "overflow": self.overflow,
            "total": self.total,
        }


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a sweep; error is set on singular (gap) rows."""

    x: float
    q: float = float("nan")
    q_cl: float = float("nan")
    bound: float = float("nan")
    mean: float = float("nan")
    variance: float = float("nan")
    sigma: float = float("nan")
    rho_ul_re: float = float("nan")
    rho_ul_im: float = float("nan")
    error: str | None = None


def evaluate_point(params: EngineParams) -> SweepRow:
    """The single-point pipeline behind every sweep/heatmap cell."""
    report = thermodynamic_uncertainty(params, "quantum")
    components = quantum_bound(params)
    ss = steady_state_closed_form(params)
    return SweepRow(
        x=float("nan"),
        q=report.q,
        q_cl=report.q_classical,
        bound=components.bound,
        mean=report.mean_rate,
        variance=report.variance_rate,
        sigma=report.sigma,
        rho_ul_re=ss.rho_ul_re,
        rho_ul_im=ss.rho_ul_im,
    )


def sweep(spec: SweepSpec) -> list[SweepRow]:
    """Sweep one parameter; singular points become gap rows, never aborts."""
    rows = []
    for x in spec.grid():
        x = float(x)
        try:
            params = replace(spec.base, **{spec.axis: x})
            rows.append(replace(evaluate_point(params), x=x))
        except (DomainError, NumericalError) as exc:
            rows.append(SweepRow(x=x, error=str(exc)))
    return rows


@dataclass
class HeatmapResult:
    """Row-major grids over (delta rows, epsilon columns)."""

    eps_grid: np.ndarray
    delta_grid: np.ndarray
    q: np.ndarray
    q_cl: np.ndarray
    rho_ul_abs: np.ndarray
    rho_ul_im: np.ndarray
    errors: dict = field(default_factory=dict)


def heatmap(base: EngineParams, eps_axis: AxisSpec, delta_axis: AxisSpec) -> HeatmapResult:
    """Uncertainty and coherence maps over the drive-detuning plane."""
    eps_grid = eps_axis.grid()
    delta_grid = delta_axis.grid()
    shape = (len(delta_grid), len(eps_grid))
    result = HeatmapResult(
        eps_grid=eps_grid,
        delta_grid=delta_grid,
        q=np.full(shape, np.nan),
        q_cl=np.full(shape, np.nan),
        rho_ul_abs=np.full(shape, np.nan),
        rho_ul_im=np.full(shape, np.nan),
    )
    for i, dlt in enumerate(delta_grid):
        for j, eps in enumerate(eps_grid):
            try:
                params = replace(base, epsilon=float(eps), delta=float(dlt))
                row = evaluate_point(params)
            except (DomainError, NumericalError) as exc:
                result.errors[(i, j)] = str(exc)
                continue
            result.q[i, j] = row.q
            result.q_cl[i, j] = row.q_cl
            result.rho_ul_abs[i, j] = abs(complex(row.rho_ul_re, row.rho_ul_im))
            result.rho_ul_im[i, j] = row.rho_ul_im
    return result


@dataclass
class McResult:
    """Aggregates of one Monte Carlo run."""

    hist_q: Histogram
    hist_q_cl: Histogram
    stats: dict
    excluded: int
    samples: int
    seed: int


def _new_stats(with_bound: bool) -> dict:
    stats = {
        "count_q_below_2": 0,
        "count_q_cl_below_2": 0,
        "count_q_cl_below_tur": 0,
        "count_q_pop_below_2": 0,
        "count_q_cl_above_q_pop": 0,
        "count_sign_law_exceptions": 0,
        "min_q": float("inf"),
        "max_q": float("-inf"),
        "min_q_cl": float("inf"),
        "max_q_cl": float("-inf"),
    }
    if with_bound:
        stats.update(
            {
                "count_q_below_bound": 0,
                "count_bound_undefined": 0,
                "min_q_minus_bound": float("inf"),
            }
        )
    return stats


def _merge_stats(target: dict, part: dict) -> None:
    for key, value in part.items():
        if key.startswith("count"):
            target[key] += value
        elif key.startswith("min"):
            target[key] = min(target[key], value)
        elif key.startswith("max"):
            target[key] = max(target[key], value)


def _mc_chunk(spec: McSpec, start: int, count: int, with_bound: bool):
    """Process samples [start, start+count): sample, filter, evaluate, aggregate."""
    streams = kernels.uniform_streams(spec.seed, start, count, len(kernels.PARAM_ORDER))
    columns = [
        lo + streams[k] * (hi - lo) for k, (lo, hi) in enumerate(spec.dists)
    ]
    gu, gl, nu, nl, eps, dlt = columns
    valid = np.abs(nl - nu) >= MC_EXCLUSION
    excluded = int(count - valid.sum())
    gu, gl, nu, nl, eps, dlt = (c[valid] for c in columns)
    _, mean_cl, q, q_cl, q_pop, advantage = kernels.batch_uncertainty(
        gu, gl, nu, nl, eps, dlt
    )
    hist_q = Histogram.from_range(*spec.hist_range, spec.bin_width)
    hist_q_cl = Histogram.from_range(*spec.hist_range, spec.bin_width)
    hist_q.add(q)
    hist_q_cl.add(q_cl)
    stats = _new_stats(with_bound)
    stats["count_q_below_2"] = int((q < 2.0).sum())
    stats["count_q_cl_below_2"] = int((q_cl < 2.0).sum())
    stats["count_q_cl_below_tur"] = int((q_cl < 2.0 - 1e-9).sum())
    stats["count_q_pop_below_2"] = int((q_pop < 2.0 - 1e-12).sum())
    stats["count_q_cl_above_q_pop"] = int((q_cl > q_pop + 1e-10).sum())
    if len(q):
        stats["min_q"] = float(q.min())
        stats["max_q"] = float(q.max())
        stats["min_q_cl"] = float(q_cl.min())
        stats["max_q_cl"] = float(q_cl.max())
    gamma_big = 0.5 * (gu * nu + gl * nl)
    law_rhs = dlt * dlt - gamma_big * gamma_big
    applicable = (law_rhs != 0.0) & (mean_cl != 0.0)
    stats["count_sign_law_exceptions"] = int(
        (np.sign(advantage[applicable]) != np.sign(law_rhs[applicable])).sum()
    )
    if with_bound:
        for k in range(len(q)):
            point = EngineParams(
                gamma_u=gu[k], gamma_l=gl[k], n_u=nu[k], n_l=nl[k],
                epsilon=eps[k], delta=dlt[k],
            )
            try:
                b = quantum_bound(point).bound
            except (DomainError, NumericalError):
                stats["count_bound_undefined"] += 1
                continue
            margin = q[k] - b
            stats["count_q_below_bound"] += int(margin < -1e-8)
            stats["min_q_minus_bound"] = min(stats["min_q_minus_bound"], margin)
    return hist_q, hist_q_cl, stats, excluded


def _mc_chunk_task(args):
    return _mc_chunk(*args)


def monte_carlo(spec: McSpec, workers: int = 1, with_bound: bool = False) -> McResult:
    """Monte Carlo exploration over the configured parameter region.

    Output is independent of the worker count: samples are keyed by index,
    the chunk grid is fixed, and aggregation uses only associative,
    commutative merges.
    """
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    tasks = [
        (spec, start, min(MC_CHUNK, spec.samples - start), with_bound)
        for start in range(0, spec.samples, MC_CHUNK)
    ]
    hist_q = Histogram.from_range(*spec.hist_range, spec.bin_width)
    hist_q_cl = Histogram.from_range(*spec.hist_range, spec.bin_width)
    stats = _new_stats(with_bound)
    excluded = 0
    if workers == 1:
        parts = map(_mc_chunk_task, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        parts = pool.map(_mc_chunk_task, tasks)
    for part_q, part_q_cl, part_stats, part_excluded in parts:
        hist_q.merge(part_q)
        hist_q_cl.merge(part_q_cl)
        _merge_stats(stats, part_stats)
        excluded += part_excluded
    if workers > 1:
        pool.shutdown()
    return McResult(
        hist_q=hist_q,
        hist_q_cl=hist_q_cl,
        stats=stats,
        excluded=excluded,
        samples=spec.samples,
        seed=spec.seed,
    )
