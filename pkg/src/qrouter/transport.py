"""Monte Carlo single-photon transport through the router's two multiplexers.

Physical picture of one router transit for a photon on signal channel i:

* pass 1 (demultiplexing at the sender's MUX): the photon leaves on port i
  (delivered), on port i + o (leaked by offset o), or is absorbed (lost);
* pass 2 (multiplexing at the MUX that port feeds): the fiber enters that MUX
  on the port assigned to the same wavelength label, so by reciprocity the
  photon reaches the trunk with exactly the probability that pass 1 would
  have sent it to that port. The sampler draws a fresh pass outcome and the
  photon emerges only if it matches the pass-1 outcome.

A photon delivered at both passes reaches the intended user; one leaked by o
at both passes reaches the user behind port i + o. The wrong/correct ratio
therefore equals the squared single-pass crosstalk ratio.

Randomness comes from Philox4x32-10 keyed by the seed and indexed by trial
number, so a partitioned run reproduces the single-worker run bit for bit.
Besides the raw counts, every sampled path (including paths drawn from a
uniform proposal over pass outcomes) contributes its exact probability once
to a path-weighted tally; rare-event expectations then come out exact
instead of needing 1e8+ trials.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import philox
from .errors import QRouterError, UnphysicalSpecError
from .photonics import (MuxSpec, check_channel, db_to_ratio, interfering_offsets,
                        leak_ratio_per_pass, router_insertion_loss_db,
                        two_pass_crosstalk_ratio)

DELIVERED = "delivered"
LEAKED = "leaked"
LOST = "lost"

MAX_PASSES = 2
DEFAULT_CHUNK = 1 << 17
PROB_SLACK = 1e-12
RATIO_RTOL = 1e-12


@dataclass(frozen=True)
class PassOutcome:
    kind: str
    offset: int = 0

    def __post_init__(self):
        if self.kind == LEAKED and self.offset == 0:
            raise ValueError("a leak needs a nonzero offset")
        if self.kind != LEAKED and self.offset != 0:
            raise ValueError(f"{self.kind} outcome cannot carry an offset")


@dataclass(frozen=True, eq=False)
class PassDistribution:
    """Outcome probabilities of one pass: index 0 delivered, then leaks, then lost."""

    signal_channel: int
    offsets: tuple
    probs: np.ndarray

    @property
    def size(self) -> int:
        return len(self.probs)

    @property
    def lost_index(self) -> int:
        return len(self.probs) - 1

    def outcome(self, k: int) -> PassOutcome:
        if k == 0:
            return PassOutcome(DELIVERED)
        if k == self.lost_index:
            return PassOutcome(LOST)
        return PassOutcome(LEAKED, self.offsets[k])

    def sample(self, u):
        """Outcome indices for uniforms ``u`` in [0, 1)."""
        cdf = np.cumsum(self.probs[:-1])
        return np.searchsorted(cdf, u, side="right")


def pass_distribution(spec: MuxSpec, signal_channel: int | None = None) -> PassDistribution:
    if signal_channel is None:
        signal_channel = spec.mid_band_channel()
    check_channel(spec, signal_channel)
    leaks = interfering_offsets(spec, signal_channel)
    probs = [db_to_ratio(spec.insertion_loss_db)]
    probs += [leak_ratio_per_pass(spec, o, signal_channel) for o in leaks]
    total = math.fsum(probs)
    if total > 1.0 + PROB_SLACK:
        raise UnphysicalSpecError(
            f"per-pass delivered + leak probabilities sum to {total:.6g} > 1")
    probs.append(max(0.0, 1.0 - total))
    return PassDistribution(signal_channel, (0, *leaks), np.array(probs))


def simulate_pass(spec: MuxSpec, rng, signal_channel: int | None = None) -> PassOutcome:
    """Sample one pass; ``rng`` is a numpy Generator or a uniform in [0, 1)."""
    dist = pass_distribution(spec, signal_channel)
    u = rng.random() if hasattr(rng, "random") else float(rng)
    return dist.outcome(int(dist.sample(u)))


@dataclass(frozen=True)
class SimConfig:
    trials: int = 1_000_000
    seed: int = 42
    spec: MuxSpec = field(default_factory=MuxSpec)
    passes: int = 2
    signal_channel: int | None = None
    weighted: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise QRouterError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.passes <= MAX_PASSES:
            raise QRouterError(f"passes must be in 0..{MAX_PASSES}, got {self.passes}")
        philox.split_seed(self.seed)
        if self.signal_channel is None:
            object.__setattr__(self, "signal_channel", self.spec.mid_band_channel())
        check_channel(self.spec, self.signal_channel)


@dataclass(frozen=True, eq=False)
class Tally:
    """Integer counts per final outcome plus the set of sampled paths.

    Merging adds counts and unions path sets, so it is associative and
    commutative and never depends on how trials were partitioned.
    """

    trials: int
    counts: np.ndarray
    visited: np.ndarray

    def merge(self, other: "Tally") -> "Tally":
        return Tally(self.trials + other.trials,
                     self.counts + other.counts,
                     self.visited | other.visited)

    def __eq__(self, other):
        return (isinstance(other, Tally) and self.trials == other.trials
                and np.array_equal(self.counts, other.counts)
                and np.array_equal(self.visited, other.visited))


def _final_index(ks, dist: PassDistribution, passes: int, n: int) -> np.ndarray:
    if passes == 0:
        return np.zeros(n, dtype=np.int64)
    if passes == 1:
        return ks[0]
    k1, k2 = ks
    return np.where((k1 == k2) & (k1 != dist.lost_index), k1, dist.lost_index)


def run_partition(config: SimConfig, start: int, stop: int,
                  dist: PassDistribution | None = None) -> Tally:
    """Simulate trials ``start..stop-1``."""
    if dist is None:
        dist = pass_distribution(config.spec, config.signal_channel)
    n = stop - start
    K = dist.size
    passes = config.passes
    visited = np.zeros((K,) * passes, dtype=bool)
    if n <= 0:
        return Tally(0, np.zeros(K, dtype=np.int64), visited)
    if passes == 0:
        counts = np.zeros(K, dtype=np.int64)
        counts[0] = n
        return Tally(n, counts, visited)

    u = philox.trial_uniforms(config.seed, start, stop, 2 * passes)
    ks = [dist.sample(u[:, p]) for p in range(passes)]
    final = _final_index(ks, dist, passes, n)
    counts = np.bincount(final, minlength=K).astype(np.int64)

    visited[tuple(ks)] = True
    if config.weighted:
        proposal = [np.minimum((u[:, passes + p] * K).astype(np.int64), K - 1)
                    for p in range(passes)]
        visited[tuple(proposal)] = True
    return Tally(n, counts, visited)


def partition_bounds(trials: int, chunk: int) -> list[tuple[int, int]]:
    return [(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]


def run_tally(config: SimConfig, workers: int = 1, chunk: int = DEFAULT_CHUNK) -> Tally:
    dist = pass_distribution(config.spec, config.signal_channel)
    bounds = partition_bounds(config.trials, chunk)
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: run_partition(config, *b, dist=dist), bounds))
    else:
        parts = [run_partition(config, s, e, dist=dist) for s, e in bounds]
    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    return total


def tally_key(offset: int) -> str:
    return DELIVERED if offset == 0 else f"{LEAKED}[{offset:+d}]"


def analytic_fractions(spec: MuxSpec, signal_channel: int, passes: int) -> dict:
    """Expected final-outcome probabilities from the closed-form photonics."""
    offsets = interfering_offsets(spec, signal_channel)
    if passes == 0:
        out = {DELIVERED: 1.0}
        out.update({tally_key(o): 0.0 for o in offsets})
        out[LOST] = 0.0
        return out
    if passes == 1:
        out = {DELIVERED: db_to_ratio(spec.insertion_loss_db)}
    else:
        out = {DELIVERED: db_to_ratio(router_insertion_loss_db(spec))}
    for o in offsets:
        out[tally_key(o)] = leak_ratio_per_pass(spec, o, signal_channel) ** passes
    out[LOST] = max(0.0, 1.0 - math.fsum(out.values()))
    return out


def _path_weighted(tally: Tally, dist: PassDistribution, passes: int) -> tuple[np.ndarray, float]:
    """Exact probability mass of the sampled paths, grouped by final outcome."""
    K = dist.size
    if passes == 0:
        exact = np.zeros(K)
        exact[0] = 1.0
        return exact, 1.0
    if passes == 1:
        mass = np.where(tally.visited, dist.probs, 0.0)
        return mass, float(mass.sum())
    mass = np.where(tally.visited, np.outer(dist.probs, dist.probs), 0.0)
    exact = np.zeros(K)
    diag = np.diagonal(mass).copy()
    exact[:-1] = diag[:-1]
    off = mass.copy()
    idx = np.arange(K - 1)
    off[idx, idx] = 0.0
    exact[-1] = off.sum()
    return exact, float(mass.sum())


@dataclass(frozen=True)
class SimReport:
    config: SimConfig
    trials: int
    counts: dict
    fractions: dict
    standard_error: dict
    analytic_expected: dict
    path_weighted: dict
    path_coverage: float
    wrong_to_correct: dict
    generator: str = philox.ALGORITHM

    @property
    def delivered_fraction(self) -> float:
        return self.fractions[DELIVERED]

    @property
    def lost_fraction(self) -> float:
        return self.fractions[LOST]

    @property
    def leaked_fraction_by_offset(self) -> dict:
        return {int(k[len(LEAKED) + 1:-1]): v for k, v in self.fractions.items()
                if k.startswith(LEAKED)}

    def with_analytic(self, **overrides) -> "SimReport":
        expected = dict(self.analytic_expected)
        expected.update(overrides)
        return replace(self, analytic_expected=expected)


def build_report(config: SimConfig, tally: Tally) -> SimReport:
    dist = pass_distribution(config.spec, config.signal_channel)
    keys = [tally_key(o) for o in dist.offsets] + [LOST]
    n = tally.trials
    counts = {k: int(c) for k, c in zip(keys, tally.counts)}
    fractions = {k: c / n for k, c in counts.items()}
    se = {k: math.sqrt(p * (1.0 - p) / n) for k, p in fractions.items()}
    exact, coverage = _path_weighted(tally, dist, config.passes)
    weighted = {k: float(x) for k, x in zip(keys, exact)}

    wrong_to_correct = {}
    if config.passes == 2:
        correct_w = weighted[DELIVERED]
        correct_n = counts[DELIVERED]
        for o in dist.offsets[1:]:
            key = tally_key(o)
            wrong_to_correct[key] = {
                "analytic": two_pass_crosstalk_ratio(config.spec, o, config.signal_channel),
                "path_weighted": (weighted[key] / correct_w
                                  if weighted[key] > 0 and correct_w > 0 else None),
                "raw": counts[key] / correct_n if correct_n else None,
            }
    return SimReport(
        config=config,
        trials=n,
        counts=counts,
        fractions=fractions,
        standard_error=se,
        analytic_expected=analytic_fractions(config.spec, config.signal_channel, config.passes),
        path_weighted=weighted,
        path_coverage=coverage,
        wrong_to_correct=wrong_to_correct,
    )


def simulate_router_transit(config: SimConfig, workers: int = 1,
                            chunk: int = DEFAULT_CHUNK) -> SimReport:
    return build_report(config, run_tally(config, workers=workers, chunk=chunk))


def z_score(observed: float, expected: float, trials: int) -> float:
    """Binomial z-score of an observed fraction against the expected probability."""
    sigma = math.sqrt(expected * (1.0 - expected) / trials)
    if sigma == 0.0:
        return 0.0 if observed == expected else math.inf
    return (observed - expected) / sigma


def within(z: float, threshold: float) -> bool:
    # Strict: a tally sitting exactly on the threshold fails.
    return abs(z) < threshold


@dataclass(frozen=True)
class Comparison:
    threshold: float
    z_scores: dict
    tested: dict
    ratio_rel_error: dict
    passed: bool

    def failures(self) -> list[str]:
        bad = [k for k, z in self.z_scores.items()
               if self.tested[k] and not within(z, self.threshold)]
        bad += [f"ratio {k}" for k, e in self.ratio_rel_error.items()
                if e is not None and not e <= RATIO_RTOL]
        return bad


def compare_to_analytic(report: SimReport, threshold: float = 4.0,
                        min_expected: float = 10.0) -> Comparison:
    """z-score every tally against its analytic probability.

    A tally enters the verdict when the normal approximation is sound
    (at least ``min_expected`` expected hits and misses) or when it is
    deterministic (expected probability 0 or 1). Path-weighted wrong/correct ratios
    must match the closed form to 1e-12 relative wherever both paths were
    sampled.
    """
    n = report.trials
    z_scores, tested = {}, {}
    for key, p in report.analytic_expected.items():
        z_scores[key] = z_score(report.fractions[key], p, n)
        deterministic = p in (0.0, 1.0)
        tested[key] = deterministic or min(n * p, n * (1.0 - p)) >= min_expected
    rel = {}
    for key, row in report.wrong_to_correct.items():
        if row["path_weighted"] is None:
            rel[key] = None
        else:
            rel[key] = abs(row["path_weighted"] - row["analytic"]) / row["analytic"]
    passed = all(within(z_scores[k], threshold) for k in z_scores if tested[k])
    passed = passed and all(e <= RATIO_RTOL for e in rel.values() if e is not None)
    return Comparison(threshold, z_scores, tested, rel, passed)
