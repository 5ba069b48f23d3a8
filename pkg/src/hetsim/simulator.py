"""Monte Carlo estimation of the average content-delivery delay.

One replication draws fresh network geometry (routers, macro and small
cells), runs the retransmission protocol against the nearest base station
of the scenario's tier with fading redrawn independently per attempt, and
then appends the tail delay: the backhaul draw for macro users, and for
small-cell users either a cache read (hit) or a backhaul draw (miss).

Replications are embarrassingly parallel. Each one consumes its own
random stream derived from (master_seed, replication index), and partial
results are placed by index, so an estimate is bit-identical regardless
of worker count or execution order. HETSIM_THREADS caps the worker pool.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .caching import CacheConfig, CachePolicy, is_hit, require_valid
from .channel import RadioParams
from .errors import InvalidParameterError
from .geometry import PointSet, Tier, Window, nearest, sample_ppp
from .popularity import (
    DistanceDependent,
    Fixed,
    PopularityDist,
    PopularityModel,
    effective_eta,
    sample_request,
)
from .analytics import DelayParams

BATCH_SIZE = 256  # fixed so results never depend on worker count
CI_Z = 1.959963984540054  # two-sided 95% normal quantile


class DistanceMode(str, enum.Enum):
    AVERAGED = "averaged"
    PER_USER = "per-user"


@dataclass(frozen=True)
class MacroUser:
    pass


@dataclass(frozen=True)
class SmallUser:
    policy: CachePolicy = CachePolicy.NO_CACHE
    model: PopularityModel = Fixed(1.45)
    distance_mode: DistanceMode = DistanceMode.AVERAGED


Scenario = MacroUser | SmallUser


@dataclass(frozen=True)
class DelaySample:
    downlink_ms: float
    tail_ms: float
    attempts: int
    outage: bool
    hit: bool

    @property
    def total_ms(self) -> float:
        return self.downlink_ms + self.tail_ms


@dataclass(frozen=True)
class DelayEstimate:
    mean_ms: float
    ci_low_ms: float
    ci_high_ms: float
    replications: int
    outage_rate: float
    hit_rate: float


def _gains(radius: np.ndarray, power: float, alpha: float) -> np.ndarray:
    """Received-power coefficients power * r^(-alpha) for unit fading."""
    if alpha == 4.0:  # dominant case; avoids a large pow() bill
        r2 = radius * radius
        return power / (r2 * r2)
    return power * radius**-alpha


def downlink_delay(
    serving_tier: Tier,
    serving_index: int,
    macro: PointSet,
    small: PointSet,
    radio: RadioParams,
    slot_ms: float,
    max_attempts: int,
    rng: np.random.Generator,
) -> tuple[int, bool, float]:
    """Run the retransmission protocol over one fixed geometry.

    Fading is redrawn i.i.d. for every node on every attempt; an attempt
    succeeds when the SIR clears the target. Returns (attempts, outage,
    delay); outage means no success within max_attempts, and the slot cost
    of all attempts is paid either way.
    """
    gains = np.concatenate(
        (
            _gains(macro.radii(), radio.power_macro, radio.pathloss_exponent),
            _gains(small.radii(), radio.power_small, radio.pathloss_exponent),
        )
    )
    flat = serving_index if serving_tier is Tier.MACRO else len(macro) + serving_index
    if not 0 <= flat < gains.size:
        raise InvalidParameterError(f"serving index {serving_index} outside its tier")
    gamma = radio.target_sir
    for attempt in range(1, max_attempts + 1):
        h = rng.standard_exponential(gains.size)
        signal = gains[flat] * h[flat]
        interference = float(gains @ h) - signal
        # SIR >= gamma without the division, so an interference-free draw
        # (infinite SIR) is an ordinary success
        if signal >= gamma * interference:
            return attempt, False, slot_ms * attempt
    return max_attempts, True, slot_ms * max_attempts


def run_replication(
    scenario: Scenario,
    params: DelayParams,
    cache: CacheConfig,
    window: Window,
    rng: np.random.Generator,
) -> DelaySample:
    """Sample one end-to-end delay of the typical user."""
    routers = sample_ppp(params.lambda_cr, window, rng, Tier.CENTRAL_ROUTER)
    macro = sample_ppp(params.lambda_mc, window, rng, Tier.MACRO)
    small = sample_ppp(params.lambda_sc, window, rng, Tier.SMALL_CELL)

    if isinstance(scenario, MacroUser):
        serving_set, tier, lambda_tier = macro, Tier.MACRO, params.lambda_mc
    else:
        serving_set, tier, lambda_tier = small, Tier.SMALL_CELL, params.lambda_sc
    serving_index, serving_distance = nearest(serving_set)

    attempts, outage, downlink = downlink_delay(
        tier, serving_index, macro, small, params.radio, params.slot_ms, params.max_attempts, rng
    )

    _, router_distance = nearest(routers, reference=serving_set.point(serving_index))
    backhaul_mean = params.backhaul_beta * router_distance * (lambda_tier / params.lambda_cr)

    hit = False
    if isinstance(scenario, SmallUser) and scenario.policy is not CachePolicy.NO_CACHE:
        override = (
            serving_distance
            if scenario.distance_mode is DistanceMode.PER_USER
            and isinstance(scenario.model, DistanceDependent)
            else None
        )
        eta = effective_eta(scenario.model, params.lambda_sc, params.lambda_ut, override)
        request = float(sample_request(PopularityDist(eta), rng))
        hit = is_hit(request, scenario.policy, cache, rng)

    tail_mean = params.cache_read_mean_ms if hit else backhaul_mean
    tail = float(rng.exponential(tail_mean)) if tail_mean > 0 else 0.0
    return DelaySample(downlink_ms=downlink, tail_ms=tail, attempts=attempts, outage=outage, hit=hit)


def replication_rng(master_seed: int, index: int) -> np.random.Generator:
    """The stream replication ``index`` consumes, independent of execution order."""
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(index,)))


def _run_batch(scenario, params, cache, window, master_seed, start, stop):
    totals = np.empty(stop - start)
    outages = np.empty(stop - start, dtype=bool)
    hits = np.empty(stop - start, dtype=bool)
    for i, rep in enumerate(range(start, stop)):
        sample = run_replication(scenario, params, cache, window, replication_rng(master_seed, rep))
        totals[i] = sample.total_ms
        outages[i] = sample.outage
        hits[i] = sample.hit
    return start, totals, outages, hits


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("HETSIM_THREADS")
        if env is not None:
            workers = int(env)
        else:
            workers = min(os.cpu_count() or 1, 8)
    return max(1, workers)


def estimate(
    scenario: Scenario,
    params: DelayParams,
    cache: CacheConfig,
    window: Window,
    replications: int,
    master_seed: int,
    workers: int | None = None,
) -> DelayEstimate:
    """Mean delay with a 95% normal-approximation confidence interval.

    Pure function of its arguments: the per-replication streams and the
    index-ordered reduction make the result independent of ``workers``
    (default: HETSIM_THREADS, else the CPU count).
    """
    if replications < 1:
        raise InvalidParameterError(f"replications must be >= 1, got {replications}")
    if isinstance(scenario, SmallUser) and scenario.policy is not CachePolicy.NO_CACHE:
        require_valid(scenario.policy, cache)
        # fail fast on an unresolvable steepness instead of inside a worker
        if scenario.distance_mode is DistanceMode.AVERAGED or not isinstance(
            scenario.model, DistanceDependent
        ):
            effective_eta(scenario.model, params.lambda_sc, params.lambda_ut)

    workers = _resolve_workers(workers)
    spans = [(start, min(start + BATCH_SIZE, replications)) for start in range(0, replications, BATCH_SIZE)]
    totals = np.empty(replications)
    outages = np.empty(replications, dtype=bool)
    hits = np.empty(replications, dtype=bool)

    if workers == 1 or len(spans) == 1:
        results = (_run_batch(scenario, params, cache, window, master_seed, a, b) for a, b in spans)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_batch, scenario, params, cache, window, master_seed, a, b)
                for a, b in spans
            ]
            results = [f.result() for f in futures]
    for start, batch_totals, batch_outages, batch_hits in results:
        stop = start + batch_totals.size
        totals[start:stop] = batch_totals
        outages[start:stop] = batch_outages
        hits[start:stop] = batch_hits

    mean = float(np.mean(totals))
    if replications > 1:
        half = CI_Z * float(np.std(totals, ddof=1)) / math.sqrt(replications)
    else:
        half = 0.0
    return DelayEstimate(
        mean_ms=mean,
        ci_low_ms=mean - half,
        ci_high_ms=mean + half,
        replications=replications,
        outage_rate=float(np.mean(outages)),
        hit_rate=float(np.mean(hits)),
    )
