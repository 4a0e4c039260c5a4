"""Monte Carlo experiments: empirical DFR, the pair-coincidence law of the
Gallager model, percentile estimates of the maximum column intersection and
scenario parameter search."""

from __future__ import annotations

import json
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np
from scipy import stats

from .bounds import scenario_dfr
from .construct import GallagerParams, QcParams, sample_gallager, sample_qc
from .core import BinaryWord, MdpcCode, SparseBinaryMatrix, expand_qc
from .decode import decode_bits
from .errors import ParameterError
from .intersect import guaranteed_radius, max_column_intersection, qc_max_intersection
from .rng import Rng, derive_seed

RECORD_COLUMNS = [
    "schema_version",
    "source",
    "n",
    "r",
    "t",
    "trials",
    "master_seed",
    "max_iterations",
    "failures",
    "syndrome_failures",
    "miscorrections",
    "dfr",
    "cp95_low",
    "cp95_high",
    "residual_mean",
    "residual_histogram",
    "wall_time",
]
SEARCH_COLUMNS = [
    "schema_version",
    "scenario",
    "n",
    "w",
    "v",
    "t",
    "s",
    "radius",
    "t_prime",
    "log2_bound",
    "feasible",
]
CSV_SCHEMA_VERSION = 1


def sample_error(n: int, t: int, seed: int) -> BinaryWord:
    """Uniform weight-t error; errors for t and t+1 under one seed are nested."""
    return BinaryWord(n, tuple(sorted(Rng(seed).sample(n, t))))


@dataclass(frozen=True)
class TrialPlan:
    t: int
    trials: int
    master_seed: int
    max_iterations: int = 1
    matrix: SparseBinaryMatrix | None = None
    construction: GallagerParams | QcParams | None = None

    def __post_init__(self):
        if (self.matrix is None) == (self.construction is None):
            raise ParameterError("give exactly one code source: a matrix or construction params")
        if self.trials < 1 or self.max_iterations < 1 or self.t < 0:
            raise ParameterError("need trials >= 1, max_iterations >= 1, t >= 0")

    def resolve_matrix(self) -> SparseBinaryMatrix:
        if self.matrix is not None:
            return self.matrix
        if isinstance(self.construction, GallagerParams):
            return sample_gallager(self.construction).matrix
        c = self.construction
        return expand_qc(sample_qc(c.p, c.half_weight, c.seed))

    def echo(self) -> dict:
        if self.matrix is not None:
            source = {"kind": "matrix", "rows": self.matrix.rows, "cols": self.matrix.cols}
        else:
            kind = "gallager" if isinstance(self.construction, GallagerParams) else "qc"
            source = {"kind": kind, **asdict(self.construction)}
        return {
            "source": source,
            "t": self.t,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "max_iterations": self.max_iterations,
        }


def clopper_pearson(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    a = 1 - level
    lo = 0.0 if k == 0 else float(stats.beta.ppf(a / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - a / 2, k + 1, n - k))
    return lo, hi


@dataclass(frozen=True)
class ExperimentRecord:
    plan: dict
    n: int
    r: int
    failures: int
    syndrome_failures: int
    miscorrections: int
    residual_weight_histogram: dict[int, int]
    wall_time: float = field(compare=False)

    @property
    def trials(self) -> int:
        return self.plan["trials"]

    @property
    def dfr_point_estimate(self) -> float:
        return self.failures / self.trials

    @property
    def clopper_pearson_95(self) -> tuple[float, float]:
        return clopper_pearson(self.failures, self.trials)

    @property
    def residual_mean(self) -> float:
        total = sum(self.residual_weight_histogram.values())
        return sum(k * c for k, c in self.residual_weight_histogram.items()) / total

    def to_row(self) -> dict:
        lo, hi = self.clopper_pearson_95
        return {
            "schema_version": CSV_SCHEMA_VERSION,
            "source": json.dumps(self.plan["source"], sort_keys=True),
            "n": self.n,
            "r": self.r,
            "t": self.plan["t"],
            "trials": self.trials,
            "master_seed": self.plan["master_seed"],
            "max_iterations": self.plan["max_iterations"],
            "failures": self.failures,
            "syndrome_failures": self.syndrome_failures,
            "miscorrections": self.miscorrections,
            "dfr": self.dfr_point_estimate,
            "cp95_low": lo,
            "cp95_high": hi,
            "residual_mean": self.residual_mean,
            "residual_histogram": ";".join(
                f"{k}:{c}" for k, c in sorted(self.residual_weight_histogram.items())
            ),
            "wall_time": round(self.wall_time, 6),
        }


def _run_trials(m: SparseBinaryMatrix, plan_t: int, iters: int, master: int, lo: int, hi: int):
    out = []
    for i in range(lo, hi):
        error = sample_error(m.cols, plan_t, derive_seed(master, i))
        bits, syn_trace, _, after_first = decode_bits(m, error.to_bits(), iters)
        # transmitted codeword is zero, so the residual is the word itself
        out.append((syn_trace[-1] != 0, bool(bits.any()), int(after_first.sum())))
    return out


def run_dfr(plan: TrialPlan, workers: int = 1) -> ExperimentRecord:
    """Decode ``plan.trials`` uniform weight-t errors added to the zero codeword.

    Trial i uses seed ``derive_seed(master_seed, i)``, and results are merged
    in trial order, so the record does not depend on ``workers``.
    """
    start = time.perf_counter()
    m = plan.resolve_matrix()
    if plan.t > m.cols:
        raise ParameterError("t exceeds code length")
    args = (m, plan.t, plan.max_iterations, plan.master_seed)
    if workers <= 1 or plan.trials < 2 * workers:
        results = _run_trials(*args, 0, plan.trials)
    else:
        edges = np.linspace(0, plan.trials, workers + 1).astype(int)
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_run_trials, *args, lo, hi) for lo, hi in zip(edges, edges[1:])]
            results = [row for f in futures for row in f.result()]
    # a nonzero syndrome implies a wrong output; miscorrections are the rest
    hist = Counter(r[2] for r in results)
    return ExperimentRecord(
        plan=plan.echo(),
        n=m.cols,
        r=m.rows,
        failures=sum(r[1] for r in results),
        syndrome_failures=sum(r[0] for r in results),
        miscorrections=sum(1 for r in results if r[1] and not r[0]),
        residual_weight_histogram=dict(sorted(hist.items())),
        wall_time=time.perf_counter() - start,
    )


def coincidence_probability(n: int, w: int) -> float:
    """Probability that two given columns share the row of one permuted block: (w-1)/(n-1)."""
    return (w - 1) / (n - 1)


def intersection_law(n: int, w: int, v: int) -> np.ndarray:
    """Binomial(v, (w-1)/(n-1)) pmf of the intersection number of two columns."""
    return stats.binom.pmf(np.arange(v + 1), v, coincidence_probability(n, w))


@dataclass(frozen=True)
class CoincidenceReport:
    observed: dict[int, int]
    bins: list[tuple[int, int]]
    bin_observed: list[int]
    bin_expected: list[float]
    chi2: float
    dof: int
    p_value: float
    matrices: int
    pairs_per_matrix: int


def _merge_bins(obs: np.ndarray, exp: np.ndarray, min_expected: float = 5.0):
    bins, bo, be = [], [], []
    lo, acc_o, acc_e = 0, 0, 0.0
    for k in range(len(exp)):
        acc_o += int(obs[k])
        acc_e += float(exp[k])
        if acc_e >= min_expected:
            bins.append((lo, k))
            bo.append(acc_o)
            be.append(acc_e)
            lo, acc_o, acc_e = k + 1, 0, 0.0
    if acc_e > 0 or acc_o > 0:
        if not bins:
            raise ParameterError("too few samples: no bin reaches the expected-count minimum")
        bins[-1] = (bins[-1][0], len(exp) - 1)
        bo[-1] += acc_o
        be[-1] += acc_e
    if len(bins) < 2:
        raise ParameterError("too few samples: need at least two bins with expectation >= 5")
    return bins, bo, be


def coincidence_test(
    params: GallagerParams, matrices: int = 20, pairs: int = 2000
) -> CoincidenceReport:
    """Chi-square test of sampled pair intersection numbers against Binomial(v, (w-1)/(n-1)).

    Bins with expected count below 5 are merged with their neighbours.
    """
    n, w, v = params.n, params.w, params.v
    counts = np.zeros(v + 1, dtype=np.int64)
    for k in range(matrices):
        code = sample_gallager(GallagerParams(n, w, v, params.r, derive_seed(params.seed, k)))
        cols = [set(c) for c in code.matrix.col_supports]
        rng = Rng(derive_seed(params.seed, k, 1))
        for _ in range(pairs):
            j = rng.below(n)
            j2 = rng.below(n - 1)
            j2 += j2 >= j
            counts[len(cols[j] & cols[j2])] += 1
    total = matrices * pairs
    expected = intersection_law(n, w, v) * total
    bins, bo, be = _merge_bins(counts, expected)
    chi2, p_value = stats.chisquare(bo, be)
    return CoincidenceReport(
        observed={k: int(c) for k, c in enumerate(counts) if c},
        bins=bins,
        bin_observed=bo,
        bin_expected=be,
        chi2=float(chi2),
        dof=len(bins) - 1,
        p_value=float(p_value),
        matrices=matrices,
        pairs_per_matrix=pairs,
    )


@dataclass(frozen=True)
class SEstimate:
    s0: int
    percentile: float
    samples: list[int]

    def to_dict(self) -> dict:
        return {
            "s0": self.s0,
            "percentile": self.percentile,
            "sample_count": len(self.samples),
            "samples": self.samples,
        }


def sample_max_s(params: GallagerParams | QcParams, samples: int) -> list[int]:
    """Maximum column intersection of ``samples`` independent draws (seeds derived from params.seed)."""
    out = []
    for k in range(samples):
        seed = derive_seed(params.seed, k)
        if isinstance(params, QcParams):
            out.append(qc_max_intersection(sample_qc(params.p, params.half_weight, seed)).max_s)
        else:
            g = GallagerParams(params.n, params.w, params.v, params.r, seed)
            out.append(max_column_intersection(sample_gallager(g).matrix).max_s)
    return out


def percentile_s(values: Iterable[int], percentile: float) -> int:
    """Smallest s0 such that a fraction >= percentile of the values is <= s0."""
    values = sorted(values)
    if not 0 < percentile <= 1:
        raise ParameterError("percentile must lie in (0, 1]")
    need = math.ceil(percentile * len(values) - 1e-12)
    return values[max(need, 1) - 1]


def estimate_s_percentile(
    params: GallagerParams | QcParams, samples: int = 50, percentile: float = 0.2
) -> SEstimate:
    if samples < 5:
        raise ParameterError("need at least 5 samples")
    values = sample_max_s(params, samples)
    return SEstimate(percentile_s(values, percentile), percentile, values)


@dataclass(frozen=True)
class SearchResult:
    scenario: str
    best: dict
    table: list[dict]


def search_scenario_params(
    scenario: str,
    t: int,
    target_bits: float,
    n_values: Iterable[int],
    w_values: Iterable[int],
    samples: int = 50,
    percentile: float = 0.2,
    seed: int = 0,
    alpha: float | None = None,
    p_mode: str = "exact",
) -> SearchResult:
    """Scan QC parameters (n = 2p, v = w/2) for the smallest n meeting a scenario.

    Scenario I needs floor(v/2s) >= t.  The others need the scenario bound,
    capped at probability 1, to be at most 2^-target_bits.  ``s`` is the
    percentile estimate over ``samples`` random keys.  The scan stops after
    the first n (ascending) that has a feasible w; rows for every evaluated
    point are returned in ``table``.
    """
    if scenario not in ("I", "II", "III", "IV"):
        raise ParameterError(f"unknown scenario {scenario!r}")
    table = []
    for n in sorted(set(n_values)):
        found = None
        for w in sorted(set(w_values)):
            if n % 2 or w % 2 or w // 2 > n // 2 or w < 4:
                continue
            v = w // 2
            est = estimate_s_percentile(QcParams(n // 2, v, seed), samples, percentile)
            s = est.s0
            radius = guaranteed_radius(v, s)
            row = {
                "schema_version": CSV_SCHEMA_VERSION,
                "scenario": scenario,
                "n": n,
                "w": w,
                "v": v,
                "t": t,
                "s": s,
                "radius": radius,
                "t_prime": None,
                "log2_bound": None,
            }
            if scenario == "I":
                row["feasible"] = radius >= t
                if row["feasible"]:
                    row["log2_bound"] = -math.inf
            else:
                res = scenario_dfr(n, w, t, scenario, s=s, alpha=alpha, v=v, p_mode=p_mode)
                if hasattr(res, "holds"):
                    row["log2_bound"] = -math.inf if res.holds else 0.0
                else:
                    row["t_prime"] = res.t_prime
                    row["log2_bound"] = min(res.log2_bound, 0.0)
                row["feasible"] = row["log2_bound"] <= -target_bits
            table.append(row)
            if row["feasible"] and found is None:
                found = row
        if found is not None:
            return SearchResult(scenario, found, table)
    raise ParameterError("no feasible parameters in the given ranges")
