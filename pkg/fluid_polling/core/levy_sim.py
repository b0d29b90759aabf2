"""
Simulators for the Levy-driven heavy-traffic limit and its pre-limit systems
"""

import math
from dataclasses import dataclass, asdict, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from fluid_polling.core.levy import (
    HTDrifts, SubordinatorSpec, SwitchLaw, limit_covariance, switching_bm_variance,
)
from fluid_polling.core.simulation import (
    GENERATOR_NAME, MomentAccumulator, batch_standard_error, lindley, make_rng, segment_integrals,
)
from fluid_polling.utils.logger import get_logger
from fluid_polling.utils.validators import ValidationError, Validators

logger = get_logger(__name__)

RBM_CHUNK_STEPS = 1_000_000
PRELIMIT_CHUNK_CYCLES = 1 << 16
SCHEMES = ("bridge", "euler")


@dataclass
class ReflectedMoments:
    """Stationary moment estimates with batch-means standard errors"""
    mean1: float
    mean2: float
    second1: float
    second2: float
    cross: float
    correlation: float
    mean1_se: float = 0.0
    mean2_se: float = 0.0
    second1_se: float = 0.0
    second2_se: float = 0.0
    cross_se: float = 0.0
    correlation_se: float = 0.0

    @property
    def var1(self) -> float:
        return self.second1 - self.mean1 ** 2

    @property
    def var2(self) -> float:
        return self.second2 - self.mean2 ** 2

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class RbmResult:
    """Output of a reflected Brownian motion run"""
    moments: ReflectedMoments
    lst_grid: List[Tuple[float, float]] = field(default_factory=list)
    lst_values: List[float] = field(default_factory=list)
    path: np.ndarray = field(default_factory=lambda: np.empty((0, 3)), repr=False)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "moments": self.moments.to_dict(),
            "lst": [{"s1": s1, "s2": s2, "value": v}
                    for (s1, s2), v in zip(self.lst_grid, self.lst_values)],
            "path_samples": int(self.path.shape[0]),
            "metadata": self.metadata,
        }


def _moments_from_batches(acc: MomentAccumulator, batches: int) -> ReflectedMoments:
    overall = acc.total()
    m = overall.moments()
    per_batch = [acc.batch(k).moments() for k in range(batches)]
    batch_corr = [acc.batch(k).correlation() for k in range(batches)]
    se = {key: batch_standard_error([b[key] for b in per_batch]) for key in ("v1", "v2", "v11", "v22", "v12")}
    return ReflectedMoments(
        mean1=m["v1"], mean2=m["v2"], second1=m["v11"], second2=m["v22"], cross=m["v12"],
        correlation=overall.correlation(),
        mean1_se=se["v1"], mean2_se=se["v2"], second1_se=se["v11"], second2_se=se["v22"],
        cross_se=se["v12"], correlation_se=batch_standard_error(batch_corr),
    )


def _loading(cov: np.ndarray) -> np.ndarray:
    """Matrix L with L L^T = cov, valid for singular covariances"""
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (2, 2) or not np.allclose(cov, cov.T):
        raise ValidationError("Covariance must be a symmetric 2x2 matrix")
    values, vectors = np.linalg.eigh(cov)
    if values.min() < -1e-12 * max(1.0, abs(values.max())):
        raise ValidationError("Covariance must be positive semidefinite")
    return vectors * np.sqrt(np.clip(values, 0.0, None))


def simulate_reflected_bm(drifts: Tuple[float, float], cov: Any, dt: float, horizon: float,
                          seed: int, scheme: str = "bridge", warmup: Optional[float] = None,
                          batch_count: int = 100,
                          lst_grid: Optional[Sequence[Tuple[float, float]]] = None,
                          path_stride: Optional[int] = None, stream: int = 0) -> RbmResult:
    """Simulate a coordinatewise reflected BM with free process -drift t + noise

    Args:
        drifts: Negative drifts (theta1, theta2) of the free processes
        cov: Noise covariance per unit time
        dt: Step size
        horizon: Simulated time
        seed: Generator seed
        scheme: "bridge" reflects with the exact Brownian-bridge minimum of each step,
            "euler" clamps at zero after each step
        warmup: Discarded initial time; defaults to min(horizon/10, 50/min(theta^2))
        batch_count: Batches for the standard errors
        lst_grid: Real (s1, s2) pairs at which the empirical LST is estimated
        path_stride: Keep every path_stride-th step as a (t, v1, v2) sample

    Returns:
        RbmResult

    Raises:
        ValidationError: For invalid step, horizon, scheme or covariance
    """
    dt = Validators.positive("dt", dt)
    horizon = Validators.positive("horizon", horizon)
    if scheme not in SCHEMES:
        raise ValidationError(f"Unknown scheme {scheme!r}; expected one of {SCHEMES}")
    theta = np.array([Validators.finite("theta1", drifts[0]), Validators.finite("theta2", drifts[1])])
    loading = _loading(cov)
    variances = np.diag(np.asarray(cov, dtype=float))
    if warmup is None:
        warmup = min(0.1 * horizon, 50.0 / max(min(theta ** 2), 1e-12))
    warmup = Validators.nonnegative("warmup", warmup)
    total_steps = int(round(horizon / dt))
    warm_steps = int(round(warmup / dt))
    if total_steps - warm_steps < batch_count:
        raise ValidationError("Horizon too short for the requested batches after warmup")
    steps_per_batch = (total_steps - warm_steps) // batch_count
    grid = np.asarray(lst_grid if lst_grid is not None else [], dtype=float).reshape(-1, 2)

    rng = make_rng(seed, stream)
    logger.info("reflected BM: drifts=%s dt=%g horizon=%g scheme=%s seed=%d generator=%s",
                theta.tolist(), dt, horizon, scheme, seed, GENERATOR_NAME)

    acc = MomentAccumulator.zeros(batch_count)
    lst_sums = np.zeros(grid.shape[0])
    lst_count = 0
    path: List[np.ndarray] = []
    v = np.zeros(2)
    done = 0
    sqrt_dt = math.sqrt(dt)

    while done < total_steps:
        n = min(RBM_CHUNK_STEPS, total_steps - done)
        noise = rng.standard_normal((n, 2)) @ loading.T * sqrt_dt
        increments = noise - theta * dt
        if scheme == "bridge":
            log_u = np.log(rng.random((n, 2)))
            reach = np.sqrt(increments ** 2 - 2.0 * variances * dt * log_u)
            floors = 0.5 * (increments + reach)
        else:
            floors = np.zeros((n, 2))
        values = np.column_stack([lindley(increments[:, j], floors[:, j], v[j]) for j in range(2)])
        v = values[-1].copy()

        index = done + 1 + np.arange(n)
        keep = index > warm_steps
        if np.any(keep):
            kept = values[keep]
            batch = np.minimum((index[keep] - warm_steps - 1) // steps_per_batch, batch_count - 1)
            x, y = kept[:, 0], kept[:, 1]
            weights = (np.full(x.size, dt), x * dt, y * dt, x * x * dt, y * y * dt, x * y * dt,
                       (x == 0) * dt, (y == 0) * dt)
            acc = acc.merge(MomentAccumulator(*(np.bincount(batch, weights=w, minlength=batch_count)
                                                for w in weights)))
            if grid.size:
                lst_sums += np.exp(-(kept @ grid.T)).sum(axis=0)
                lst_count += kept.shape[0]
        if path_stride:
            chosen = index % path_stride == 0
            path.append(np.column_stack([index[chosen] * dt, values[chosen]]))
        done += n
        logger.debug("reflected BM: %d/%d steps", done, total_steps)

    moments = _moments_from_batches(acc, batch_count)
    return RbmResult(
        moments=moments,
        lst_grid=[tuple(map(float, row)) for row in grid],
        lst_values=(lst_sums / max(lst_count, 1)).tolist(),
        path=np.concatenate(path) if path else np.empty((0, 3)),
        metadata={"drifts": theta.tolist(), "cov": np.asarray(cov, dtype=float).tolist(),
                  "dt": dt, "horizon": horizon, "warmup": warmup, "scheme": scheme,
                  "seed": seed, "stream": stream, "generator": GENERATOR_NAME,
                  "batch_count": batch_count},
    )


def default_dt(d: HTDrifts) -> float:
    return 1e-3 / max(d.theta1_hat ** 2, d.theta2_hat ** 2, 1.0)


def rbm_simulate(d: HTDrifts, horizon: float, seed: int, dt: Optional[float] = None,
                 scheme: str = "bridge", **kwargs: Any) -> RbmResult:
    """Reflected limit of the fluid-derived free processes -theta_j t -+ W(t)

    Both coordinates are driven by one Wiener process with opposite signs.
    """
    return simulate_reflected_bm(
        (d.theta1_hat, d.theta2_hat), [[1.0, -1.0], [-1.0, 1.0]],
        dt if dt is not None else default_dt(d), horizon, seed, scheme=scheme, **kwargs,
    )


@dataclass
class PrelimitResult:
    """Scaled workload statistics of a pre-limit system"""
    moments: ReflectedMoments
    path: np.ndarray = field(repr=False)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"moments": self.moments.to_dict(), "path_samples": int(self.path.shape[0]),
                "metadata": self.metadata}


def _cycle_chunk(sw: SwitchLaw, rng: np.random.Generator, cycles: int) -> Tuple[np.ndarray, np.ndarray]:
    t1, t2 = sw.sample(rng, cycles)
    durations = np.empty(2 * cycles)
    durations[0::2], durations[1::2] = t1, t2
    served = np.tile([1, 2], cycles)
    return served, durations


def prelimit_simulate(sub: SubordinatorSpec, sw: SwitchLaw, n: float, mu_n: Tuple[float, float],
                      horizon: float, seed: int, warmup: Optional[float] = None,
                      sample_interval: Optional[float] = None, batch_count: int = 20,
                      stream: int = 0) -> PrelimitResult:
    """Simulate the pre-limit polling system and return n^{-1/2} V(n t) statistics

    The server alternates between the queues with visit pairs drawn from sw; input
    is the drift of sub plus its compound Poisson jumps. Time is measured in the
    scaled units t, so the system runs for n * horizon original time units.

    Args:
        sub: Input process
        sw: Switching law
        n: Scaling parameter
        mu_n: Service rates of the n-th system
        horizon: Scaled horizon
        seed: Generator seed
        warmup: Discarded scaled time; defaults to horizon/10
        sample_interval: Scaled spacing of path samples (none when omitted)
        batch_count: Batches for the standard errors

    Returns:
        PrelimitResult with moments of the scaled workloads
    """
    n = Validators.positive("n", n)
    horizon = Validators.positive("horizon", horizon)
    mu1, mu2 = (Validators.positive("mu1", mu_n[0]), Validators.positive("mu2", mu_n[1]))
    warmup = Validators.nonnegative("warmup", 0.1 * horizon if warmup is None else warmup)
    if warmup >= horizon:
        raise ValidationError("warmup must be smaller than the horizon")
    Validators.integer_at_least("batch_count", batch_count, 2)

    root = math.sqrt(n)
    end_time = n * horizon
    start_time = n * warmup
    edges = start_time + (end_time - start_time) / batch_count * np.arange(batch_count)
    cuts = np.concatenate([[start_time], edges[1:], [end_time]])
    interval = None if sample_interval is None else n * Validators.positive("sample_interval", sample_interval)

    rng = make_rng(seed, stream)
    logger.info("prelimit: n=%g mu=%s horizon=%g sub=%s switching=%s seed=%d",
                n, (mu1, mu2), horizon, sub.name, sw.name, seed)

    acc = MomentAccumulator.zeros(batch_count)
    path: List[np.ndarray] = []
    clock, v1, v2 = 0.0, 0.0, 0.0
    next_sample = 1
    while clock < end_time:
        served, durations = _cycle_chunk(sw, rng, PRELIMIT_CHUNK_CYCLES)
        ends = clock + np.cumsum(durations)
        span = ends[-1] - clock
        jump_count = rng.poisson(sub.jump_rate * span) if sub.jump_rate > 0 else 0
        jump_times = np.sort(clock + span * rng.random(jump_count))
        if jump_count:
            x1, x2 = sub.jump_sampler(rng, jump_count)
        else:
            x1 = x2 = np.empty(0)

        inside = cuts[(cuts > clock) & (cuts < ends[-1])]
        times = np.concatenate([ends, inside, jump_times])
        kinds = np.concatenate([np.zeros(ends.size + inside.size, dtype=int),
                                1 + np.arange(jump_count)])
        order = np.argsort(times, kind="stable")
        piece_end, kinds = times[order], kinds[order]
        piece_start = np.concatenate([[clock], piece_end[:-1]])
        duration = piece_end - piece_start
        visit = np.minimum(np.searchsorted(ends, piece_end, side="left"), ends.size - 1)
        queue = served[visit]
        a = np.where(queue == 1, sub.drift1 - mu1, sub.drift1)
        b = np.where(queue == 2, sub.drift2 - mu2, sub.drift2)
        jump1 = np.where(kinds > 0, np.concatenate([[0.0], x1])[kinds], 0.0)
        jump2 = np.where(kinds > 0, np.concatenate([[0.0], x2])[kinds], 0.0)

        path1 = lindley(a * duration + jump1, jump1, v1)
        path2 = lindley(b * duration + jump2, jump2, v2)
        x0 = np.concatenate([[v1], path1[:-1]])
        y0 = np.concatenate([[v2], path2[:-1]])
        v1, v2 = float(path1[-1]), float(path2[-1])

        keep = (piece_start >= start_time) & (piece_start < end_time)
        if np.any(keep):
            parts = segment_integrals(x0[keep], a[keep], y0[keep], b[keep], duration[keep])
            batch = np.clip(np.searchsorted(edges, piece_start[keep], side="right") - 1, 0, batch_count - 1)
            acc = acc.merge(MomentAccumulator(*(np.bincount(batch, weights=w, minlength=batch_count)
                                                for w in (duration[keep],) + parts)))

        if interval is not None:
            top = int(math.floor((min(ends[-1], end_time)) / interval))
            if top >= next_sample:
                t = interval * np.arange(next_sample, top + 1)
                idx = np.clip(np.searchsorted(piece_start, t, side="right") - 1, 0, piece_start.size - 1)
                off = t - piece_start[idx]
                w1 = np.maximum(0.0, x0[idx] + a[idx] * off)
                w2 = np.maximum(0.0, y0[idx] + b[idx] * off)
                path.append(np.column_stack([t / n, w1 / root, w2 / root]))
                next_sample = top + 1
        clock = float(ends[-1])

    raw = _moments_from_batches(acc, batch_count)
    moments = ReflectedMoments(
        mean1=raw.mean1 / root, mean2=raw.mean2 / root,
        second1=raw.second1 / n, second2=raw.second2 / n, cross=raw.cross / n,
        correlation=raw.correlation,
        mean1_se=raw.mean1_se / root, mean2_se=raw.mean2_se / root,
        second1_se=raw.second1_se / n, second2_se=raw.second2_se / n, cross_se=raw.cross_se / n,
        correlation_se=raw.correlation_se,
    )
    return PrelimitResult(
        moments=moments,
        path=np.concatenate(path) if path else np.empty((0, 3)),
        metadata={"n": n, "mu_n": [mu1, mu2], "horizon": horizon, "warmup": warmup,
                  "subordinator": sub.to_dict(), "switching": sw.to_dict(),
                  "limit_covariance": limit_covariance(sub, sw).tolist(),
                  "seed": seed, "stream": stream, "generator": GENERATOR_NAME},
    )


@dataclass
class SwitchingVarianceEstimate:
    estimate: float
    standard_error: float
    formula: float
    horizon: float
    replications: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def switching_variance_estimate(sw: SwitchLaw, horizon: float, replications: int,
                                seed: int) -> SwitchingVarianceEstimate:
    """Monte Carlo estimate of Var(int_0^t (I(u) - p1) du)/t across replicated paths"""
    horizon = Validators.positive("horizon", horizon)
    Validators.integer_at_least("replications", replications, 2)
    rng = make_rng(seed)
    cycles = max(16, int(2.0 * horizon / (sw.mean1 + sw.mean2)) + 16)
    totals = np.empty(replications)
    for r in range(replications):
        at_one = 0.0
        clock = 0.0
        while clock < horizon:
            t1, t2 = sw.sample(rng, cycles)
            starts1 = clock + np.concatenate([[0.0], np.cumsum(t1 + t2)[:-1]])
            ends1 = starts1 + t1
            at_one += np.clip(np.minimum(ends1, horizon) - starts1, 0.0, None).sum()
            clock = float(starts1[-1] + t1[-1] + t2[-1])
        totals[r] = at_one - sw.p1 * horizon
    estimate = float(totals.var(ddof=1) / horizon)
    return SwitchingVarianceEstimate(
        estimate=estimate,
        standard_error=estimate * math.sqrt(2.0 / (replications - 1)),
        formula=switching_bm_variance(sw),
        horizon=horizon,
        replications=replications,
    )
