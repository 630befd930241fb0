"""Seeded experiment drivers producing per-trial records and a JSON summary.

Trial ``t`` of a run with master seed ``s`` uses the generator seeded by
``trial_seed(s, t)``, so serial and parallel execution give identical
output. Wall-clock times are only recorded when asked for, which keeps
reruns byte-identical by default.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from qpac.concepts import (Classifier, ConceptClass, Distribution, distance, junta_class,
                           junta_vc_bounds, load_problem, perturbed_delta, problem_from_dict,
                           sample, vc_dimension)
from qpac.eqlearn import pac_learn
from qpac.grover import (SUCCESS_FLOOR, GoodSubset, SingularAngleError, closed_form_ps,
                         exact_success_probability, grover_angles, grover_search,
                         iteration_cap)
from qpac.reduction import BitString, reduction_check
from qpac.sim import build_sample_oracle, make_rng, trial_seed

EXPERIMENTS = ("grover-stats", "learn", "scaling", "reduction-check", "vc", "junta")
CSV_COLUMNS = ("experiment", "epsilon", "delta", "seed", "oracle_calls", "success",
               "distance", "wall_ms")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    concept_class: dict = field(default_factory=lambda: {"name": "full", "domain_size": 8})
    distribution: dict = field(default_factory=lambda: {"name": "perturbed-delta", "x0": 0})
    epsilons: list = field(default_factory=lambda: [0.05])
    delta: float = 0.2
    trials: int = 25
    seed: int = 0
    scenarios: int = 3
    d: int = 4
    samples: int = 100
    workers: int = 1
    timing: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        try:
            self.epsilons = [float(e) for e in self.epsilons]
            self.delta = float(self.delta)
            self.trials = int(self.trials)
            self.seed = int(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed numeric field: {exc}") from None
        if not self.epsilons:
            raise ConfigError("epsilon grid is empty")
        if any(b >= a for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise ConfigError("epsilon grid must be strictly decreasing")
        if any(not 0 < e < 1 for e in self.epsilons):
            raise ConfigError("every epsilon must lie in (0, 1)")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")

    @classmethod
    def from_dict(cls, doc: dict, experiment: str | None = None) -> ExperimentConfig:
        doc = dict(doc)
        if experiment is not None:
            if doc.get("experiment", experiment) != experiment:
                raise ConfigError(f"config is for {doc['experiment']!r}, not {experiment!r}")
            doc["experiment"] = experiment
        if "class" in doc:
            doc["concept_class"] = doc.pop("class")
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in doc:
            raise ConfigError("config names no experiment")
        return cls(**doc)

    @classmethod
    def load(cls, path, experiment: str | None = None) -> ExperimentConfig:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(doc, experiment)


@dataclass
class RunRecord:
    experiment: str
    epsilon: float
    delta: float
    seed: int
    oracle_calls: int
    success: bool
    distance: float | None
    wall_ms: float


@dataclass
class ExperimentResult:
    summary: dict
    records: list[RunRecord] = field(default_factory=list)
    passed: bool = True


def build_class(spec: dict) -> ConceptClass:
    name = spec.get("name", "full")
    try:
        if name == "full":
            return ConceptClass.full(int(spec["domain_size"]))
        if name == "points":
            return ConceptClass.point_functions(int(spec["domain_size"]))
        if name == "junta":
            return junta_class(int(spec["n"]), int(spec["k"]))
        if name == "file":
            return load_problem(spec["path"])[0]
        if name == "inline":
            return problem_from_dict(spec)[0]
    except KeyError as exc:
        raise ConfigError(f"class spec {name!r} is missing {exc}") from None
    except (OSError, ValueError) as exc:
        raise ConfigError(f"invalid class spec: {exc}") from None
    raise ConfigError(f"unknown concept class {name!r}")


def build_distribution(spec: dict, n: int, epsilon: float, rng: np.random.Generator) -> Distribution:
    name = spec.get("name", "uniform")
    try:
        if name == "uniform":
            return Distribution.uniform(n)
        if name == "perturbed-delta":
            support = spec.get("support", list(range(n)))
            return perturbed_delta(support, int(spec.get("x0", 0)), epsilon, domain_size=n)
        if name == "random":
            return Distribution.random(n, rng)
        if name == "explicit":
            dist = Distribution(spec["probs"])
            if len(dist) != n:
                raise ValueError(f"distribution has {len(dist)} entries, domain has {n}")
            return dist
    except KeyError as exc:
        raise ConfigError(f"distribution spec {name!r} is missing {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"invalid distribution: {exc}") from None
    raise ConfigError(f"unknown distribution family {name!r}")


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def _map_trials(fn, jobs, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


class _Clock:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.t0 = time.perf_counter()

    def ms(self) -> float:
        return round((time.perf_counter() - self.t0) * 1e3, 3) if self.enabled else 0.0


# -- grover-stats -----------------------------------------------------------

def _grover_scenarios(cfg: ExperimentConfig, epsilon: float, rng: np.random.Generator):
    """Scenarios cycling through: good mass exactly epsilon, zero mass, random mass >= epsilon."""
    n = build_class(cfg.concept_class).domain_size
    for i in range(cfg.scenarios):
        c = Classifier(rng.integers(0, 2, n))
        kind = ("mass-eq-eps", "mass-zero", "random")[i % 3]
        if kind == "mass-eq-eps":
            x_star = int(rng.integers(n))
            rest = rng.dirichlet(np.ones(n - 1)) * (1 - epsilon)
            dist = Distribution(np.insert(rest, x_star, epsilon))
            good = GoodSubset([(x_star, c[x_star])])
        elif kind == "mass-zero":
            dist = Distribution.random(n, rng)
            good = GoodSubset.counterexamples(c)
        else:
            while True:
                dist = Distribution.random(n, rng)
                good = GoodSubset((x, int(rng.integers(2))) for x in range(n) if rng.random() < 0.5)
                if good.mass(c, dist) >= epsilon:
                    break
        yield kind, c, dist, good


def cmd_grover_stats(cfg: ExperimentConfig) -> ExperimentResult:
    rng = make_rng(cfg.seed)
    records, rows, passed = [], [], True
    for epsilon in cfg.epsilons:
        for sid, (kind, c, dist, good) in enumerate(_grover_scenarios(cfg, epsilon, rng)):
            oracle = build_sample_oracle(c, dist)
            mass = good.mass(c, dist)
            exact = exact_success_probability(oracle, good, epsilon)
            angles = grover_angles(oracle, good, epsilon)
            try:
                closed = closed_form_ps(angles.theta, angles.M)
            except SingularAngleError:
                closed = None
            hits = 0
            for t in range(cfg.trials):
                seed = trial_seed(cfg.seed, len(records))
                clock = _Clock(cfg.timing)
                out = grover_search(oracle, good, epsilon, make_rng(seed))
                hits += out.succeeded
                records.append(RunRecord("grover-stats", epsilon, cfg.delta, seed,
                                         out.oracle_calls, out.succeeded, None, clock.ms()))
            empirical = hits / cfg.trials
            ok = abs(empirical - exact) <= 4 * binomial_sigma(min(exact, 1.0), cfg.trials) + 1e-12
            if mass >= epsilon:
                ok = ok and exact >= SUCCESS_FLOOR
            if mass == 0:
                ok = ok and exact < 1e-12 and hits == 0
            passed &= ok
            rows.append({
                "epsilon": epsilon, "scenario": sid, "kind": kind, "good_mass": mass,
                "exact": exact, "closed_form": closed, "empirical": empirical,
                "worst_case_calls": 1 + 2 * (iteration_cap(epsilon) - 1),
                "oracle_calls_total": oracle.forward_calls + oracle.inverse_calls,
                "ok": ok,
            })
    return ExperimentResult({"experiment": "grover-stats", "scenarios": rows, "passed": passed},
                            records, passed)


# -- learn / junta ----------------------------------------------------------

def _learn_trial(job):
    cfg, epsilon, trial = job
    seed = trial_seed(cfg.seed, trial)
    rng = make_rng(seed)
    cls = build_class(cfg.concept_class)
    c = cls[int(rng.integers(len(cls)))]
    dist = build_distribution(cfg.distribution, cls.domain_size, epsilon, rng)
    oracle = build_sample_oracle(c, dist)
    clock = _Clock(cfg.timing)
    res = pac_learn(cls, oracle, epsilon, cfg.delta, rng)
    wall = clock.ms()
    if res.oracle_calls != oracle.forward_calls + oracle.inverse_calls:
        raise AssertionError("oracle call audit failed")
    report = res.report(c, dist, seed)
    report.update(epsilon=epsilon, delta=cfg.delta, inner_epsilon=res.epsilon,
                  inner_delta=res.delta, truth_bits=c.bits)
    dist_to_truth = report["distance_to_truth"]
    record = RunRecord(cfg.experiment, epsilon, cfg.delta, seed, res.oracle_calls,
                       dist_to_truth <= epsilon, dist_to_truth, wall)
    return record, report


def _learn(cfg: ExperimentConfig) -> tuple[list, list, list, bool]:
    records, reports, rows, passed = [], [], [], True
    for k, epsilon in enumerate(cfg.epsilons):
        jobs = [(cfg, epsilon, k * cfg.trials + t) for t in range(cfg.trials)]
        out = _map_trials(_learn_trial, jobs, cfg.workers)
        recs = [r for r, _ in out]
        records += recs
        reports += [rep for _, rep in out]
        frac = sum(r.success for r in recs) / len(recs)
        threshold = 1 - cfg.delta - 3 * binomial_sigma(cfg.delta, len(recs))
        ok = frac >= threshold
        passed &= ok
        rows.append({
            "epsilon": epsilon, "delta": cfg.delta, "trials": len(recs),
            "success_fraction": frac, "threshold": threshold,
            "median_oracle_calls": float(np.median([r.oracle_calls for r in recs])),
            "ok": ok,
        })
    return records, reports, rows, passed


def cmd_learn(cfg: ExperimentConfig) -> ExperimentResult:
    records, reports, rows, passed = _learn(cfg)
    return ExperimentResult({"experiment": cfg.experiment, "grid": rows, "trials": reports,
                             "passed": passed}, records, passed)


def cmd_junta(cfg: ExperimentConfig) -> ExperimentResult:
    spec = cfg.concept_class
    if spec.get("name") != "junta":
        raise ConfigError("the junta experiment needs a junta class spec")
    result = cmd_learn(cfg)
    result.summary["vc"] = _vc_summary(spec)
    result.passed &= result.summary["vc"]["ok"]
    result.summary["passed"] = result.passed
    return result


# -- scaling ----------------------------------------------------------------

def classical_sample_count(class_size: int, epsilon: float, delta: float) -> int:
    """``ceil((ln|C| + ln(1/delta)) / epsilon)`` labelled examples."""
    return math.ceil((math.log(class_size) + math.log(1 / delta)) / epsilon)


def classical_baseline(cls: ConceptClass, c: Classifier, dist: Distribution, epsilon: float,
                       delta: float, rng: np.random.Generator) -> tuple[Classifier, int]:
    """Consistent learner: first concept in class order agreeing with every sample."""
    m = classical_sample_count(len(cls), epsilon, delta)
    xs = np.array([sample(dist, rng) for _ in range(m)])
    consistent = np.all(cls.table[:, xs] == c.table[xs], axis=1)
    return cls[int(np.flatnonzero(consistent)[0])], m


def _scaling_trial(job):
    cfg, epsilon, trial = job
    record, _ = _learn_trial(job)
    record.experiment = "scaling-quantum"
    rng = make_rng(trial_seed(cfg.seed + 1, trial))
    cls = build_class(cfg.concept_class)
    c = cls[int(rng.integers(len(cls)))]
    dist = build_distribution(cfg.distribution, cls.domain_size, epsilon, rng)
    clock = _Clock(cfg.timing)
    h, m = classical_baseline(cls, c, dist, epsilon, cfg.delta, rng)
    d = distance(h, c, dist)
    classical = RunRecord("scaling-classical", epsilon, cfg.delta, record.seed, m,
                          d <= epsilon, d, clock.ms())
    return record, classical


def cmd_scaling(cfg: ExperimentConfig) -> ExperimentResult:
    eps = cfg.epsilons
    if len(eps) < 3 or eps[0] / eps[-1] < 8 * (1 - 1e-9):
        raise ConfigError("scaling needs at least 3 epsilons spanning 3 octaves")
    cls = build_class(cfg.concept_class)
    records, rows = [], []
    for k, epsilon in enumerate(eps):
        jobs = [(cfg, epsilon, k * cfg.trials + t) for t in range(cfg.trials)]
        out = _map_trials(_scaling_trial, jobs, cfg.workers)
        quantum = [q for q, _ in out]
        classical = [c for _, c in out]
        records += quantum + classical
        rows.append({
            "epsilon": epsilon,
            "median_quantum_calls": float(np.median([r.oracle_calls for r in quantum])),
            "median_classical_samples": float(np.median([r.oracle_calls for r in classical])),
            "quantum_success_fraction": sum(r.success for r in quantum) / len(quantum),
            "classical_success_fraction": sum(r.success for r in classical) / len(classical),
            "T_E": len(cls).bit_length(),
        })
    q_slope = loglog_slope(eps, [r["median_quantum_calls"] for r in rows])
    c_slope = loglog_slope(eps, [r["median_classical_samples"] for r in rows])
    passed = -0.70 <= q_slope <= -0.35 and -1.20 <= c_slope <= -0.85
    summary = {
        "experiment": "scaling",
        "grid": rows,
        "quantum_slope": q_slope,
        "classical_slope": c_slope,
        "classical_baseline": "consistent learner with ceil((ln|C| + ln(1/delta))/epsilon) samples",
        "passed": passed,
    }
    return ExperimentResult(summary, records, passed)


# -- reduction-check --------------------------------------------------------

def cmd_reduction_check(cfg: ExperimentConfig) -> ExperimentResult:
    if not 1 <= cfg.d <= 8:
        raise ConfigError(f"reduction check supports 1 <= d <= 8, got {cfg.d}")
    rng = make_rng(cfg.seed)
    if cfg.d <= 4:
        strings = [BitString(bits) for bits in itertools.product((0, 1), repeat=cfg.d)]
    else:
        strings = [BitString(rng.integers(0, 2, cfg.d)) for _ in range(cfg.samples)]
    checks = []
    for epsilon in cfg.epsilons:
        if epsilon > 0.25:
            raise ConfigError("reduction epsilons must not exceed 1/4")
        checks += [reduction_check(u, epsilon) for u in strings]
    min_fid = min(ch["fidelity"] for ch in checks)
    calls_ok = all(ch["controlled_forward_calls"] == 1 and ch["controlled_inverse_calls"] == 1
                   for ch in checks)
    passed = min_fid >= 1 - 1e-9 and calls_ok
    return ExperimentResult({"experiment": "reduction-check", "d": cfg.d, "min_fidelity": min_fid,
                             "call_audit_ok": calls_ok, "checks": checks, "passed": passed},
                            [], passed)


# -- vc ---------------------------------------------------------------------

def _vc_summary(spec: dict) -> dict:
    cls = build_class(spec)
    try:
        d = vc_dimension(cls)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = {"class": spec, "size": len(cls), "domain_size": cls.domain_size, "vc_dimension": d,
           "ok": True}
    if spec.get("name") == "junta":
        tight, loose = junta_vc_bounds(int(spec["n"]), int(spec["k"]))
        out.update(bound_log_binomial=tight, bound_sauer=loose, ok=d <= tight <= loose)
    return out


def cmd_vc(cfg: ExperimentConfig) -> ExperimentResult:
    summary = _vc_summary(cfg.concept_class)
    summary["experiment"] = "vc"
    summary["passed"] = summary["ok"]
    return ExperimentResult(summary, [], summary["ok"])


COMMANDS = {
    "grover-stats": cmd_grover_stats,
    "learn": cmd_learn,
    "scaling": cmd_scaling,
    "reduction-check": cmd_reduction_check,
    "vc": cmd_vc,
    "junta": cmd_junta,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return COMMANDS[cfg.experiment](cfg)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        row = asdict(rec)
        writer.writerow([_fmt(row[col]) for col in CSV_COLUMNS])
    return buf.getvalue()


def summary_to_json(summary: dict) -> str:
    return json.dumps(summary, indent=2, sort_keys=True, allow_nan=False) + "\n"
