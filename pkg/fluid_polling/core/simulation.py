"""
Event-driven simulation of the fluid polling model

Workloads are piecewise linear between switch epochs, so every time integral
is evaluated in closed form over the pieces; there is no time stepping. The
run is processed in chunks of visits, and inside a chunk the reflected
workloads are obtained from one vectorised Lindley recursion per queue.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict, field, fields
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import stats

from fluid_polling.core.inversion import Ecdf
from fluid_polling.core.model import AsymmetricParams, WorkloadState, is_stable, total_workload_scale
from fluid_polling.utils.config import Config
from fluid_polling.utils.logger import get_logger
from fluid_polling.utils.validators import Validators

logger = get_logger(__name__)

GENERATOR_NAME = "Philox"
CHUNK_VISITS = 1 << 17


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator; streams are disjoint jumps of one Philox sequence"""
    bit_generator = np.random.Philox(seed)
    if stream:
        bit_generator = bit_generator.jumped(stream)
    return np.random.Generator(bit_generator)


class SimConfig(BaseModel):
    """Run length, warmup and batching of one simulation"""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(default=Config.DEFAULT_SEED, ge=0, lt=2 ** 64)
    total_time: float = Field(gt=0, allow_inf_nan=False)
    warmup_time: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    batch_count: int = Field(default=20, ge=2)
    stream: int = Field(default=0, ge=0)
    ecdf_interval: float = Field(default=1.0, gt=0, allow_inf_nan=False)
    ecdf_max_samples: int = Field(default=10_000_000, ge=1)

    @model_validator(mode="after")
    def _check_window(self) -> "SimConfig":
        if self.warmup_time >= self.total_time:
            raise ValueError("warmup_time must be smaller than total_time")
        return self

    @property
    def batch_length(self) -> float:
        return (self.total_time - self.warmup_time) / self.batch_count


@dataclass
class MomentAccumulator:
    """Time integrals of workload statistics; fields are floats or per-batch arrays"""
    time: Any = 0.0
    s1: Any = 0.0
    s2: Any = 0.0
    s11: Any = 0.0
    s22: Any = 0.0
    s12: Any = 0.0
    z1: Any = 0.0
    z2: Any = 0.0

    @classmethod
    def zeros(cls, batches: int) -> "MomentAccumulator":
        return cls(*(np.zeros(batches) for _ in fields(cls)))

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        """Sum of two accumulators; the operation is associative and commutative"""
        return MomentAccumulator(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    def __add__(self, other: "MomentAccumulator") -> "MomentAccumulator":
        return self.merge(other)

    def total(self) -> "MomentAccumulator":
        """Collapse per-batch arrays to scalars"""
        return MomentAccumulator(*(float(np.sum(getattr(self, f.name))) for f in fields(self)))

    def batch(self, index: int) -> "MomentAccumulator":
        return MomentAccumulator(*(float(getattr(self, f.name)[index]) for f in fields(self)))

    def moments(self) -> Dict[str, float]:
        """Time averages; all zero for an empty accumulator"""
        t = float(self.time)
        if t <= 0:
            return {k: 0.0 for k in ("v1", "v2", "v11", "v22", "v12", "zero1", "zero2")}
        return {
            "v1": self.s1 / t, "v2": self.s2 / t,
            "v11": self.s11 / t, "v22": self.s22 / t, "v12": self.s12 / t,
            "zero1": self.z1 / t, "zero2": self.z2 / t,
        }

    def correlation(self) -> float:
        m = self.moments()
        var1 = m["v11"] - m["v1"] ** 2
        var2 = m["v22"] - m["v2"] ** 2
        if var1 <= 0 or var2 <= 0:
            return 0.0
        return float(np.clip((m["v12"] - m["v1"] * m["v2"]) / math.sqrt(var1 * var2), -1.0, 1.0))


def _active_time(x0: np.ndarray, rate: np.ndarray, duration: np.ndarray) -> np.ndarray:
    """Length of the initial stretch on which max(0, x0 + rate t) is positive"""
    with np.errstate(divide="ignore", invalid="ignore"):
        hit = np.where(rate < 0, x0 / -rate, np.inf)
    return np.minimum(duration, hit)


def segment_integrals(x0: np.ndarray, a: np.ndarray, y0: np.ndarray, b: np.ndarray,
                      duration: np.ndarray) -> Tuple[np.ndarray, ...]:
    """Closed-form integrals of x(t) = max(0, x0 + a t), y(t) = max(0, y0 + b t)

    Args:
        x0, y0: Workloads at the start of the pieces
        a, b: Net rates of change over the pieces
        duration: Piece lengths

    Returns:
        (int x, int y, int x^2, int y^2, int xy, time x = 0, time y = 0)
    """
    tx = _active_time(x0, a, duration)
    ty = _active_time(y0, b, duration)
    int_x = x0 * tx + 0.5 * a * tx ** 2
    int_y = y0 * ty + 0.5 * b * ty ** 2
    int_xx = x0 ** 2 * tx + x0 * a * tx ** 2 + a ** 2 * tx ** 3 / 3.0
    int_yy = y0 ** 2 * ty + y0 * b * ty ** 2 + b ** 2 * ty ** 3 / 3.0
    tc = np.minimum(tx, ty)
    int_xy = x0 * y0 * tc + 0.5 * (x0 * b + y0 * a) * tc ** 2 + a * b * tc ** 3 / 3.0
    zero_x = np.where(a < 0, duration - tx, np.where((a == 0) & (x0 == 0), duration, 0.0))
    zero_y = np.where(b < 0, duration - ty, np.where((b == 0) & (y0 == 0), duration, 0.0))
    return int_x, int_y, int_xx, int_yy, int_xy, zero_x, zero_y


def segment_accumulate(state: WorkloadState, duration: float, acc: MomentAccumulator,
                       p: AsymmetricParams) -> MomentAccumulator:
    """Add the exact integrals over one segment during which the server stays put

    Args:
        state: Workloads and server position at the start of the segment
        duration: Segment length
        acc: Accumulator to extend
        p: Model parameters

    Returns:
        The updated accumulator

    Raises:
        ValidationError: If duration is negative
    """
    duration = Validators.nonnegative("duration", duration)
    a = p.lambda1 - (p.mu1 if state.serving == 1 else 0.0)
    b = p.lambda2 - (p.mu2 if state.serving == 2 else 0.0)
    parts = segment_integrals(np.array([state.v1]), np.array([a]), np.array([state.v2]),
                              np.array([b]), np.array([duration]))
    s1, s2, s11, s22, s12, z1, z2 = (float(x[0]) for x in parts)
    return acc.merge(MomentAccumulator(duration, s1, s2, s11, s22, s12, z1, z2))


def lindley(increments: np.ndarray, floors: Optional[np.ndarray], start: float) -> np.ndarray:
    """Solve V_k = max(V_{k-1} + D_k, g_k) for all k at once

    With S the inclusive cumulative sum of D, V_k = S_k + max(start, max_{i<=k}(g_i - S_i)).
    A missing floor array means g = 0.
    """
    partial = np.cumsum(increments)
    gap = -partial if floors is None else floors - partial
    return partial + np.maximum(start, np.maximum.accumulate(gap))


def batch_ci(batch_values: Any, level: float = 0.95) -> Tuple[float, float]:
    """Normal-approximation confidence interval around the mean of batch values

    Raises:
        ValidationError: With fewer than two batches
    """
    values = np.asarray(batch_values, dtype=float)
    Validators.min_count("batch_values", values, 2)
    Validators.probability("level", level)
    center = float(values.mean())
    half = batch_half_width(values, level)
    return center - half, center + half


def batch_half_width(batch_values: Any, level: float = 0.95) -> float:
    values = np.asarray(batch_values, dtype=float)
    z = stats.norm.ppf(0.5 + level / 2.0)
    return float(z * values.std(ddof=1) / math.sqrt(values.size))


def batch_standard_error(batch_values: Any) -> float:
    values = np.asarray(batch_values, dtype=float)
    return float(values.std(ddof=1) / math.sqrt(values.size))


@dataclass
class SimResult:
    """Time-averaged statistics of one simulation run"""
    mean_v1: float
    mean_v2: float
    mean_v1sq: float
    mean_v2sq: float
    mean_v1v2: float
    frac_zero1: float
    frac_zero2: float
    correlation: float
    ci_low: float
    ci_high: float
    ecdf_total: Ecdf = field(repr=False)
    mean_v1_se: float = 0.0
    mean_v2_se: float = 0.0
    frac_zero1_se: float = 0.0
    frac_zero2_se: float = 0.0
    batch_correlations: List[float] = field(default_factory=list, repr=False)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.pop("ecdf_total")
        data["ecdf_samples"] = self.ecdf_total.size
        return data


@dataclass
class _Pieces:
    start: np.ndarray
    duration: np.ndarray
    x0: np.ndarray
    y0: np.ndarray
    a: np.ndarray
    b: np.ndarray


def _visit_chunk(p: AsymmetricParams, rng: np.random.Generator, first_queue: int,
                 count: int) -> Tuple[np.ndarray, np.ndarray]:
    served = (np.arange(count) + (first_queue - 1)) % 2 + 1
    means = np.where(served == 1, 1.0 / p.c1, 1.0 / p.c2)
    return served, means * rng.standard_exponential(count)


def _build_pieces(p: AsymmetricParams, clock: float, served: np.ndarray, durations: np.ndarray,
                  cuts: np.ndarray, v1: float, v2: float) -> Tuple[_Pieces, float, float]:
    """Split visits at the cut times and run the reflected workloads across them"""
    ends = clock + np.cumsum(durations)
    inside = cuts[(cuts > clock) & (cuts < ends[-1])]
    piece_end = np.sort(np.concatenate([ends, inside]))
    piece_start = np.concatenate([[clock], piece_end[:-1]])
    visit = np.minimum(np.searchsorted(ends, piece_end, side="left"), ends.size - 1)
    queue = served[visit]
    duration = piece_end - piece_start
    a = np.where(queue == 1, p.lambda1 - p.mu1, p.lambda1)
    b = np.where(queue == 2, p.lambda2 - p.mu2, p.lambda2)
    path1 = lindley(a * duration, None, v1)
    path2 = lindley(b * duration, None, v2)
    x0 = np.concatenate([[v1], path1[:-1]])
    y0 = np.concatenate([[v2], path2[:-1]])
    pieces = _Pieces(piece_start, duration, x0, y0, a, b)
    return pieces, float(path1[-1]), float(path2[-1])


def _sample_total(pieces: _Pieces, times: np.ndarray) -> np.ndarray:
    idx = np.clip(np.searchsorted(pieces.start, times, side="right") - 1, 0, pieces.start.size - 1)
    offset = times - pieces.start[idx]
    v1 = np.maximum(0.0, pieces.x0[idx] + pieces.a[idx] * offset)
    v2 = np.maximum(0.0, pieces.y0[idx] + pieces.b[idx] * offset)
    return v1 + v2


def simulate(p: AsymmetricParams, cfg: SimConfig) -> SimResult:
    """Simulate the fluid polling model and time-average workload statistics

    Visit times are exponential with rates c1, c2 and the server starts at queue 1 with
    probability c2/(c1+c2). Statistics are accumulated over [warmup_time, total_time] in
    batch_count equal batches; the total workload, scaled by total_workload_scale(p), is
    sampled on a fixed time grid for the ECDF.

    Args:
        p: Model parameters
        cfg: Run configuration

    Returns:
        SimResult with batch-means standard errors and run metadata
    """
    stable = is_stable(p)
    if not stable:
        logger.warning("Simulating unstable parameters %s; statistics will not settle", p.model_dump())
    rng = make_rng(cfg.seed, cfg.stream)
    logger.info("simulate: %s total_time=%g warmup=%g batches=%d seed=%d stream=%d generator=%s",
                p.model_dump(), cfg.total_time, cfg.warmup_time, cfg.batch_count,
                cfg.seed, cfg.stream, GENERATOR_NAME)

    edges = cfg.warmup_time + cfg.batch_length * np.arange(cfg.batch_count)
    cuts = np.concatenate([[cfg.warmup_time], edges[1:], [cfg.total_time]])
    scale = total_workload_scale(p) if stable else 1.0

    window = cfg.total_time - cfg.warmup_time
    interval = cfg.ecdf_interval
    if window / interval > cfg.ecdf_max_samples:
        interval = window / cfg.ecdf_max_samples
        logger.info("ECDF sampling interval raised to %g to respect ecdf_max_samples", interval)
    next_grid = 1
    last_grid = int(math.floor(window / interval))

    acc = MomentAccumulator.zeros(cfg.batch_count)
    samples: List[np.ndarray] = []
    first_queue = 1 if rng.random() < p.c2 / (p.c1 + p.c2) else 2
    clock, v1, v2 = 0.0, 0.0, 0.0
    visits = chunks = 0

    while clock < cfg.total_time:
        served, durations = _visit_chunk(p, rng, first_queue, CHUNK_VISITS)
        pieces, v1, v2 = _build_pieces(p, clock, served, durations, cuts, v1, v2)
        chunk_end = float(pieces.start[-1] + pieces.duration[-1])

        keep = (pieces.start >= cfg.warmup_time) & (pieces.start < cfg.total_time)
        if np.any(keep):
            start = pieces.start[keep]
            parts = segment_integrals(pieces.x0[keep], pieces.a[keep], pieces.y0[keep],
                                      pieces.b[keep], pieces.duration[keep])
            batch = np.clip(np.searchsorted(edges, start, side="right") - 1, 0, cfg.batch_count - 1)
            sums = [np.bincount(batch, weights=w, minlength=cfg.batch_count)
                    for w in (pieces.duration[keep],) + parts]
            acc = acc.merge(MomentAccumulator(*sums))

        top = min(last_grid, int(math.floor((min(chunk_end, cfg.total_time) - cfg.warmup_time) / interval)))
        if top >= next_grid:
            times = cfg.warmup_time + interval * np.arange(next_grid, top + 1)
            samples.append(scale * _sample_total(pieces, times))
            next_grid = top + 1

        visits += served.size
        chunks += 1
        first_queue = 3 - int(served[-1])
        clock = chunk_end
        logger.debug("chunk %d done at t=%.6g (v1=%.4g, v2=%.4g)", chunks, clock, v1, v2)

    overall = acc.total()
    m = overall.moments()
    per_batch = [acc.batch(k) for k in range(cfg.batch_count)]
    batch_corr = [b.correlation() for b in per_batch]
    correlation = overall.correlation()
    half = batch_half_width(batch_corr)
    ecdf = Ecdf.from_samples(np.concatenate(samples) if samples else np.empty(0))

    logger.info("simulate done: %d visits in %d chunks, correlation=%.5f +- %.5f",
                visits, chunks, correlation, half)
    return SimResult(
        mean_v1=m["v1"], mean_v2=m["v2"],
        mean_v1sq=m["v11"], mean_v2sq=m["v22"], mean_v1v2=m["v12"],
        frac_zero1=m["zero1"], frac_zero2=m["zero2"],
        correlation=correlation, ci_low=correlation - half, ci_high=correlation + half,
        ecdf_total=ecdf,
        mean_v1_se=batch_standard_error([b.moments()["v1"] for b in per_batch]),
        mean_v2_se=batch_standard_error([b.moments()["v2"] for b in per_batch]),
        frac_zero1_se=batch_standard_error([b.moments()["zero1"] for b in per_batch]),
        frac_zero2_se=batch_standard_error([b.moments()["zero2"] for b in per_batch]),
        batch_correlations=batch_corr,
        metadata={
            "parameters": p.model_dump(), "config": cfg.model_dump(),
            "generator": GENERATOR_NAME, "stable": stable, "scale": scale,
            "ecdf_interval": interval, "visits": visits, "chunks": chunks,
        },
    )


def _simulate_task(args: Tuple[Dict[str, float], Dict[str, Any]]) -> SimResult:
    params, config = args
    return simulate(AsymmetricParams(**params), SimConfig(**config))


def simulate_many(runs: List[Tuple[AsymmetricParams, SimConfig]], workers: int = 1) -> List[SimResult]:
    """Run independent simulations, in a process pool when workers > 1

    Results are returned in input order.
    """
    Validators.integer_at_least("workers", workers, 1)
    payload = [(p.model_dump(), cfg.model_dump()) for p, cfg in runs]
    if workers == 1 or len(payload) < 2:
        return [_simulate_task(item) for item in payload]
    with ProcessPoolExecutor(max_workers=min(workers, len(payload))) as pool:
        return list(pool.map(_simulate_task, payload))
