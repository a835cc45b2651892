"""Sample, cluster, select, and the benchmark loop around it."""
import math
import os
import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from ._seeds import run_seed
from .baselines import DEFAULT_CAP, BaselineBudget, msls, yen_k_shortest, yen_ls
from .clustering import ClusterParams, micro_cluster
from .diversity import DEFAULT_BETA, SolowPolaskyConfig, d_avg, d_min, pairwise_matrix, solow_polasky
from .generators import problem_of
from .selection import SelectionCriterion, select, setup
from .sp import DEFAULT_LAMBDA, SpProblem
from .spp import SppProblem
from .tsp import TspProblem

ENV_PREFIX = "SCS_"
SCS_ALGOS = {"SCS-MIN": "min", "SCS-AVG": "avg", "SCS-SP": "sp"}
ALL_ALGOS = ("SCS-MIN", "SCS-AVG", "SCS-SP", "MSLS", "Yen", "Yen-LS")
MEASURES = ("Dmin", "Davg", "Dsp")


@dataclass(frozen=True)
class ScsParams:
    n: int = 1000
    delta: float = 0.1
    theta: float = 0.15
    min_clique: int = 5
    max_reps: int = 99
    lam: float = DEFAULT_LAMBDA
    beta: float = DEFAULT_BETA
    criterion: str = "sp"
    scope: str = "all"
    seed: int = 0
    cap: int = DEFAULT_CAP
    spp_view: str = "sets"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two samples")
        SolowPolaskyConfig(self.beta)
        SelectionCriterion(self.criterion, scope=self.scope)

    @property
    def cluster(self):
        return ClusterParams(self.delta, self.theta, self.min_clique, self.max_reps)

    def selection(self, tag=None):
        return SelectionCriterion(tag or self.criterion, SolowPolaskyConfig(self.beta), self.scope)

    @classmethod
    def from_env(cls, env=None, **overrides):
        """Defaults, then SCS_<FIELD> environment variables, then non-None overrides."""
        env = os.environ if env is None else env
        vals = {}
        for f in fields(cls):
            key = ENV_PREFIX + ("LAMBDA" if f.name == "lam" else f.name.upper())
            if key in env:
                vals[f.name] = _cast(f, env[key])
        vals.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**vals)


def _cast(f, raw):
    default = f.default
    if isinstance(default, bool):
        return raw.strip().lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw.strip()


def make_problem(instance, params=None):
    params = params or ScsParams()
    kind = problem_of(instance)
    if kind.startswith("sp-"):
        return SpProblem(instance, params.lam)
    if kind == "tsp":
        return TspProblem(instance)
    return SppProblem(instance, params.spp_view)


def sample(problem, n, seed):
    return [problem.sample(run_seed(seed, i)) for i in range(n)]


@dataclass
class ScsResult:
    solutions: list
    elements: list
    matrix: np.ndarray
    cliques: list
    clusters: list
    selected: list
    timings: dict = field(default_factory=dict)

    @property
    def n_s(self):
        return len(self.selected)


def cluster_stage(elements, params):
    matrix = pairwise_matrix(elements)
    cliques = micro_cluster(matrix, params.cluster)
    return matrix, cliques, setup(elements, cliques)


def run_scs(instance, params=None, solutions=None, problem=None):
    """Full pipeline on one instance; ``solutions`` skips the sampling stage."""
    params = params or ScsParams()
    problem = problem or make_problem(instance, params)
    timings = {}
    t0 = time.perf_counter()
    if solutions is None:
        solutions = sample(problem, params.n, params.seed)
    t1 = time.perf_counter()
    elements = [problem.element_set(s) for s in solutions]
    matrix = pairwise_matrix(elements)
    t2 = time.perf_counter()
    cliques = micro_cluster(matrix, params.cluster)
    clusters = setup(elements, cliques)
    t3 = time.perf_counter()
    selected = select(clusters, matrix, params.selection())
    t4 = time.perf_counter()
    timings.update(sample=t1 - t0, matrix=t2 - t1, cluster=t3 - t2, select=t4 - t3)
    return ScsResult(solutions, elements, matrix, cliques, clusters, selected, timings)


def measures(element_sets, beta):
    """(Dmin, Davg, Dsp) of a solution set; NaN when fewer than two solutions."""
    if len(element_sets) < 2:
        return (math.nan, math.nan, math.nan)
    m = pairwise_matrix(element_sets)
    try:
        dsp = solow_polasky(m, cfg=SolowPolaskyConfig(beta))
    except ValueError:
        dsp = math.nan
    return (d_min(m), d_avg(m), dsp)


def improvement(value, base):
    """Relative change against the MSLS value, in percent."""
    if not (math.isfinite(value) and math.isfinite(base)) or base == 0:
        return math.nan
    return 100.0 * (value - base) / base


@dataclass
class BenchRow:
    algorithm: str
    Dmin: float
    Davg: float
    Dsp: float
    ns: int
    time_s: float
    instance: str = ""
    flag: str = ""
    impr: dict = field(default_factory=dict)


@dataclass
class BenchReport:
    instance: str
    n_s: int
    rows: list

    def row(self, algorithm):
        return next(r for r in self.rows if r.algorithm == algorithm)


def measure_row(name, algo, elements, beta, elapsed, ns_target=None):
    vals = measures(elements, beta)
    flag = ""
    if len(elements) < 2:
        flag = "fewer than two solutions"
    elif ns_target is not None and len(elements) < ns_target:
        flag = f"short: {len(elements)} of {ns_target}"
    elif any(math.isnan(v) for v in vals):
        flag = "measure undefined"
    return BenchRow(algo, *vals, len(elements), elapsed, instance=name, flag=flag)


def bench_instance(instance, params=None, algorithms=ALL_ALGOS, name="", eval_beta=None):
    """SCS variants first to fix n_s, then the baselines with that budget."""
    params = params or ScsParams()
    beta = params.beta if eval_beta is None else eval_beta
    problem = make_problem(instance, params)
    is_sp = problem_of(instance).startswith("sp-")
    rows = []

    t0 = time.perf_counter()
    solutions = sample(problem, params.n, params.seed)
    t_sample = time.perf_counter() - t0
    t0 = time.perf_counter()
    elements = [problem.element_set(s) for s in solutions]
    matrix, _, clusters = cluster_stage(elements, params)
    t_cluster = time.perf_counter() - t0
    n_s = len(clusters)

    for algo in algorithms:
        if algo not in SCS_ALGOS:
            continue
        t0 = time.perf_counter()
        sel = select(clusters, matrix, params.selection(SCS_ALGOS[algo]))
        elapsed = t_sample + t_cluster + time.perf_counter() - t0
        rows.append(measure_row(name, algo, [elements[i] for i in sel], beta, elapsed))

    budget = BaselineBudget(max(n_s, 1), max(params.cap, n_s, 1))
    for algo in algorithms:
        if algo in SCS_ALGOS:
            continue
        t0 = time.perf_counter()
        if algo == "MSLS":
            # MSLS re-runs the same sampler; reuse the runs already done
            out = msls(problem, budget, params.seed, prefix=solutions)
            elapsed = time.perf_counter() - t0 + t_sample * min(1.0, _runs_used(problem, out, solutions) / len(solutions))
        elif algo in ("Yen", "Yen-LS"):
            if not is_sp:
                continue
            if algo == "Yen":
                out = yen_k_shortest(instance, budget)
            else:
                out = yen_ls(instance, problem.relaxed, budget, seed=params.seed)
            elapsed = time.perf_counter() - t0
        else:
            raise ValueError(f"unknown algorithm {algo!r}")
        rows.append(measure_row(name, algo, [problem.element_set(s) for s in out], beta, elapsed, n_s))

    base = next((r for r in rows if r.algorithm == "MSLS"), None)
    for r in rows:
        for m in MEASURES:
            r.impr[m] = improvement(getattr(r, m), getattr(base, m)) if base else math.nan
    return BenchReport(name, n_s, rows)


def _runs_used(problem, out, solutions):
    """Number of sampler runs MSLS needed to collect ``out``."""
    if not out:
        return len(solutions)
    last = problem.element_set(out[-1])
    for i, s in enumerate(solutions):
        if problem.element_set(s) == last:
            return i + 1
    return len(solutions)


def bench(instances, params=None, algorithms=ALL_ALGOS, names=None, eval_beta=None):
    names = names or [f"inst{i}" for i in range(len(instances))]
    return [bench_instance(inst, params, algorithms, nm, eval_beta) for inst, nm in zip(instances, names)]


def average(reports):
    """Per-algorithm means over instances, ignoring undefined entries."""
    algos = []
    for rep in reports:
        for r in rep.rows:
            if r.algorithm not in algos:
                algos.append(r.algorithm)
    out = []
    for algo in algos:
        rows = [r for rep in reports for r in rep.rows if r.algorithm == algo]

        def mean(vals):
            vals = [v for v in vals if math.isfinite(v)]
            return float(np.mean(vals)) if vals else math.nan

        row = BenchRow(
            algo,
            mean([r.Dmin for r in rows]),
            mean([r.Davg for r in rows]),
            mean([r.Dsp for r in rows]),
            mean([r.ns for r in rows]),
            mean([r.time_s for r in rows]),
            instance="mean",
            flag=f"{sum(1 for r in rows if r.flag)} flagged" if any(r.flag for r in rows) else "",
        )
        row.impr = {m: mean([r.impr.get(m, math.nan) for r in rows]) for m in MEASURES}
        out.append(row)
    return out


def with_overrides(params, **kw):
    return replace(params, **{k: v for k, v in kw.items() if v is not None})
