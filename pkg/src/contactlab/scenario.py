"""Scenario files: loading, validation and execution.

A scenario is a YAML mapping with top-level keys ``model``, ``seed``,
``tolerances``, ``tasks`` and ``output``. The schema is documented in the
README. Unknown keys anywhere are rejected.
"""
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional

import numpy as np
import yaml

from .config import DEFAULT_TOLERANCES
from .errors import ConfigError, ContactLabError, ParseError, ValidationError
from .flow import (
    FIELD_KINDS,
    FlowSpec,
    atomic_write_text,
    bracket_residual_matrix,
    conservation_drift,
    constraint_violation,
    frequency_estimate,
    independence_rank,
    integrate,
    max_unwrap_dt,
    trajectory_csv,
)
from .models.brieskorn import BrieskornModel, UstilovskyModel, brieskorn_bracket_closed_form
from .models.hess_appelrot import HessAppelrotModel
from .models.isoenergetic import gelfand_cetlin_model, oscillator_model
from .models.sphere import WeightedSphereModel
from .reduction import check_admissible, intrinsic_restricted_bracket, restricted_bracket, submanifold
from .verification import CHECKS, hess_appelrot_start, run_check

THREADS_ENV = "CONTACTLAB_THREADS"


@dataclass
class ModelContext:
    """Everything a task needs to know about the chosen model."""

    name: str
    model: Any
    manifold: Any  # contact manifold flows live on; None for the flat chart
    fields: Dict[str, Any]
    constraints: Any = None  # Dirac constraint set, when the model has one
    frequencies: Optional[np.ndarray] = None

    @property
    def sample_manifold(self):
        if self.constraints is not None:
            return submanifold(self.manifold, self.constraints)
        return self.manifold

    def sample(self, rng, count, sigma=False):
        m = self.model
        if isinstance(m, WeightedSphereModel):
            return m.sample(rng, count, min_modulus=0.1)
        if isinstance(m, BrieskornModel):
            return m.sample(rng, count)
        if isinstance(m, UstilovskyModel):
            return m.brieskorn.sample(rng, count)
        if isinstance(m, HessAppelrotModel):
            if sigma:
                return np.array([hess_appelrot_start(m, rng) for _ in range(count)])
            return m.sample(rng, count)
        return m.sample(rng, count)


def _sphere(p, tol):
    m = WeightedSphereModel(tuple(p["weights"]))
    return ModelContext("weighted_sphere", m, m.manifold(tol), m.fields(), frequencies=m.frequencies)


def _brieskorn(p, tol):
    m = BrieskornModel(tuple(p["exponents"]))
    return ModelContext(
        "brieskorn", m, m.manifold(tol), m.fields(), m.constraint_set(), m.sphere.frequencies
    )


def _ustilovsky(p, tol):
    m = UstilovskyModel(p["p"], p["m"], tuple(p["epsilons"]))
    b = m.brieskorn
    return ModelContext("ustilovsky", m, b.manifold(tol), m.fields(), b.constraint_set())


def _oscillator(p, tol):
    m = oscillator_model(tuple(p["weights"]), p["h"])
    return ModelContext("oscillator_isoenergetic", m, m.manifold(tol), m.fields())


def _gelfand_cetlin(p, tol):
    m = gelfand_cetlin_model(p["n"], p["h"], p.get("lambdas"))
    return ModelContext("gelfand_cetlin", m, m.manifold(tol), m.fields())


def _hess_appelrot(p, tol):
    m = HessAppelrotModel(**p)
    return ModelContext("hess_appelrot", m, None, m.fields())


# name -> (builder, required params, optional params)
MODELS = {
    "weighted_sphere": (_sphere, ("weights",), ()),
    "brieskorn": (_brieskorn, ("exponents",), ()),
    "ustilovsky": (_ustilovsky, ("p", "m", "epsilons"), ()),
    "oscillator_isoenergetic": (_oscillator, ("weights", "h"), ()),
    "gelfand_cetlin": (_gelfand_cetlin, ("n", "h"), ("lambdas",)),
    "hess_appelrot": (_hess_appelrot, (), ("a", "b", "c", "k", "theta_margin")),
}

TASK_DEFAULTS = {
    "flow": {
        "field": "reeb",
        "function": None,
        "dt": 1e-3,
        "t_end": 1.0,
        "monitors": [],
        "projection_every_step": True,
        "start": "sample",
        "max_drift": 1e-6,
        "max_violation": 1e-10,
    },
    "bracket_matrix": {"functions": None, "bracket": "jacobi", "points": 10, "threshold": 1e-8},
    "rank": {"functions": None, "points": 5, "expected": None, "restrict": True},
    "frequencies": {"dt": 1e-3, "t_end": 10.0, "expected": None, "tolerance": 1e-4},
    "dirac_check": {"functions": None, "points": 10, "threshold": 1e-7},
    "verify_identity": {"identity": None},
}
TASK_KINDS = tuple(TASK_DEFAULTS)
TOP_KEYS = ("model", "seed", "tolerances", "tasks", "output")
OUTPUT_DEFAULTS = {"format": "csv", "directory": "out"}


@dataclass
class ScenarioConfig:
    model_name: str
    model_params: Dict[str, Any]
    seed: int
    tolerances: Any
    tasks: List[Dict[str, Any]]
    output_format: str = "csv"
    output_dir: str = "out"
    context: Optional[ModelContext] = field(default=None, repr=False, compare=False)

    def to_dict(self):
        return {
            "model": {"name": self.model_name, "params": _plain(self.model_params)},
            "seed": self.seed,
            "tolerances": self.tolerances.as_dict(),
            "tasks": [_plain(t) for t in self.tasks],
            "output": {"format": self.output_format, "directory": self.output_dir},
        }


@dataclass
class TaskResult:
    index: int
    kind: str
    status: str  # pass | fail | error
    metrics: Dict[str, Any]
    paper_anchor: str
    artifacts: List[str] = field(default_factory=list)
    wall_time: float = 0.0

    def to_dict(self):
        return {
            "index": self.index,
            "kind": self.kind,
            "status": self.status,
            "metrics": _plain(self.metrics),
            "paper_anchor": self.paper_anchor,
            "artifacts": list(self.artifacts),
        }


@dataclass
class RunResult:
    config: ScenarioConfig
    tasks: List[TaskResult]
    report_path: Optional[str] = None
    wall_time: float = 0.0

    @property
    def passed(self):
        return all(t.status == "pass" for t in self.tasks)

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def summary(self):
        counts = {s: sum(t.status == s for t in self.tasks) for s in ("pass", "fail", "error")}
        return {**counts, "total": len(self.tasks), "all_passed": self.passed}

    def report(self):
        return {
            "config": self.config.to_dict(),
            "tasks": [t.to_dict() for t in self.tasks],
            "summary": self.summary(),
        }


def _plain(obj):
    """numpy-free copy suitable for JSON."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# ---------------------------------------------------------------- loading


def _mapping(value, where):
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ValidationError(where, "expected a mapping")
    return value


def _reject_unknown(data, allowed, where):
    for key in data:
        if key not in allowed:
            raise ValidationError(f"{where}.{key}" if where else str(key), "unknown key")


def _number(value, where, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(where, "expected a number")
    if positive and not value > 0:
        raise ValidationError(where, "must be positive")
    return float(value)


def _resolve_functions(names, ctx, where):
    if names is None:
        return None
    if not isinstance(names, list) or not names:
        raise ValidationError(where, "expected a nonempty list of field names")
    for n in names:
        if n not in ctx.fields:
            raise ValidationError(where, f"field {n!r} is not defined by model {ctx.name}")
    return names


def _validate_task(raw, idx, ctx):
    where = f"tasks[{idx}]"
    raw = _mapping(raw, where)
    kind = raw.get("kind")
    if kind not in TASK_DEFAULTS:
        raise ValidationError(f"{where}.kind", f"unknown task kind {kind!r}; expected one of {TASK_KINDS}")
    defaults = TASK_DEFAULTS[kind]
    _reject_unknown(raw, ("kind",) + tuple(defaults), where)
    task = {"kind": kind, **defaults, **{k: v for k, v in raw.items() if k != "kind"}}
    for key in ("functions", "monitors"):
        if key in task and task[key] not in (None, []):
            _resolve_functions(task[key], ctx, f"{where}.{key}")
    for key in ("dt", "t_end", "threshold", "tolerance", "max_drift", "max_violation"):
        if key in task:
            task[key] = _number(task[key], f"{where}.{key}", positive=True)
    if "points" in task:
        if isinstance(task["points"], bool) or not isinstance(task["points"], int) or task["points"] < 1:
            raise ValidationError(f"{where}.points", "expected a positive integer")

    if kind == "flow":
        if task["field"] not in FIELD_KINDS:
            raise ValidationError(f"{where}.field", f"expected one of {FIELD_KINDS}")
        if task["field"] != "reeb":
            if task["function"] is None:
                raise ValidationError(f"{where}.function", "required for this field")
            _resolve_functions([task["function"]], ctx, f"{where}.function")
        if ctx.manifold is None and task["field"] != "symplectic_hamiltonian":
            raise ValidationError(f"{where}.field", f"model {ctx.name} only supports symplectic_hamiltonian flows")
        if task["field"] == "constrained" and ctx.constraints is None:
            raise ValidationError(f"{where}.field", f"model {ctx.name} has no constraint set")
        if task["dt"] > task["t_end"]:
            raise ValidationError(f"{where}.dt", "dt exceeds t_end")
        start = task["start"]
        if not (start in ("sample", "sigma") or isinstance(start, list)):
            raise ValidationError(f"{where}.start", "expected 'sample', 'sigma' or a coordinate list")
    elif kind == "bracket_matrix":
        if task["functions"] is None:
            raise ValidationError(f"{where}.functions", "required")
        if task["bracket"] not in ("jacobi", "restricted", "canonical_poisson"):
            raise ValidationError(f"{where}.bracket", "expected jacobi, restricted or canonical_poisson")
        if task["bracket"] == "restricted" and ctx.constraints is None:
            raise ValidationError(f"{where}.bracket", f"model {ctx.name} has no constraint set")
        if task["bracket"] == "jacobi" and ctx.manifold is None:
            raise ValidationError(f"{where}.bracket", f"model {ctx.name} has no contact manifold")
    elif kind == "rank":
        if task["functions"] is None:
            raise ValidationError(f"{where}.functions", "required")
        if task["expected"] is not None and not isinstance(task["expected"], int):
            raise ValidationError(f"{where}.expected", "expected an integer")
    elif kind == "frequencies":
        if ctx.manifold is None:
            raise ValidationError(f"{where}", f"model {ctx.name} has no Reeb flow")
        if task["dt"] > task["t_end"]:
            raise ValidationError(f"{where}.dt", "dt exceeds t_end")
        expected = task["expected"]
        if expected is None and ctx.frequencies is not None:
            expected = task["expected"] = [float(w) for w in ctx.frequencies]
        if expected is not None and task["dt"] > max_unwrap_dt(expected):
            raise ValidationError(
                f"{where}.dt", f"dt above the unwrap cap {max_unwrap_dt(expected):.4g}"
            )
    elif kind == "dirac_check":
        if ctx.constraints is None:
            raise ValidationError(f"{where}", f"model {ctx.name} has no constraint set")
        if task["functions"] is None:
            task["functions"] = [f"f{j}" for j in range(ctx.manifold.ambient_dim // 2)]
    elif kind == "verify_identity":
        if task["identity"] not in CHECKS:
            raise ValidationError(f"{where}.identity", f"unknown identity; expected one of {tuple(CHECKS)}")
    return task


def validate_scenario(data):
    data = _mapping(data, "scenario")
    _reject_unknown(data, TOP_KEYS, "")
    if "model" not in data:
        raise ValidationError("model", "required")
    model = _mapping(data["model"], "model")
    _reject_unknown(model, ("name", "params"), "model")
    name = model.get("name")
    if name not in MODELS:
        raise ValidationError("model.name", f"unknown model {name!r}; expected one of {tuple(MODELS)}")
    builder, required, optional = MODELS[name]
    params = _mapping(model.get("params"), "model.params")
    _reject_unknown(params, required + optional, "model.params")
    for key in required:
        if key not in params:
            raise ValidationError(f"model.params.{key}", "required")

    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ValidationError("seed", "expected a nonnegative integer")

    overrides = _mapping(data.get("tolerances"), "tolerances")
    _reject_unknown(overrides, tuple(DEFAULT_TOLERANCES.as_dict()), "tolerances")
    for key, value in overrides.items():
        _number(value, f"tolerances.{key}", positive=True)
    try:
        tol = DEFAULT_TOLERANCES.updated(**overrides)
    except (TypeError, ValueError) as exc:
        raise ValidationError("tolerances", str(exc)) from exc

    try:
        ctx = builder(params, tol)
    except (ValueError, TypeError, KeyError) as exc:
        raise ValidationError("model.params", str(exc)) from exc

    tasks_raw = data.get("tasks")
    if not isinstance(tasks_raw, list) or not tasks_raw:
        raise ValidationError("tasks", "expected a nonempty list")
    tasks = [_validate_task(t, i, ctx) for i, t in enumerate(tasks_raw)]

    output = {**OUTPUT_DEFAULTS, **_mapping(data.get("output"), "output")}
    _reject_unknown(output, tuple(OUTPUT_DEFAULTS), "output")
    if output["format"] not in ("csv", "json"):
        raise ValidationError("output.format", "expected csv or json")
    if not isinstance(output["directory"], str) or not output["directory"]:
        raise ValidationError("output.directory", "expected a nonempty path")
    return ScenarioConfig(
        name, dict(params), seed, tol, tasks, output["format"], output["directory"], ctx
    )


def parse_scenario(text):
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        raise ParseError(exc.problem or str(exc), line, col) from exc
    except yaml.YAMLError as exc:
        raise ParseError(str(exc), None, None) from exc
    return validate_scenario(data)


def load_scenario(path):
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


# ---------------------------------------------------------------- tasks


def _start_point(task, ctx, rng):
    start = task["start"]
    if isinstance(start, list):
        return np.asarray(start, dtype=float)
    return ctx.sample(rng, 1, sigma=start == "sigma")[0]


def _run_flow(task, ctx, rng, cfg, idx, out_dir):
    F = ctx.fields
    spec = FlowSpec(
        task["field"],
        task["dt"],
        task["t_end"],
        function=F[task["function"]] if task["function"] else None,
        constraints=ctx.constraints if task["field"] == "constrained" else None,
        monitors=[F[m] for m in task["monitors"]],
        projection_every_step=task["projection_every_step"],
    )
    traj = integrate(ctx.manifold, spec, _start_point(task, ctx, rng))
    drift = conservation_drift(traj, spec.monitors) if spec.monitors else {}
    metrics = {"steps": len(traj) - 1, "conservation_drift": drift}
    ok = all(v <= task["max_drift"] for v in drift.values())
    if ctx.manifold is not None:
        target = submanifold(ctx.manifold, ctx.constraints) if task["field"] == "constrained" else ctx.manifold
        metrics["constraint_violation"] = constraint_violation(traj, target)
        ok = ok and metrics["constraint_violation"] <= task["max_violation"]
    artifacts = []
    if out_dir is not None:
        if cfg.output_format == "csv":
            path = os.path.join(out_dir, f"task{idx:02d}_flow.csv")
            atomic_write_text(path, trajectory_csv(traj))
        else:
            path = os.path.join(out_dir, f"task{idx:02d}_flow.json")
            payload = {
                "times": traj.times.tolist(),
                "points": traj.points.tolist(),
                "monitors": {k: v.tolist() for k, v in traj.monitor_values.items()},
            }
            atomic_write_text(path, json.dumps(payload))
        artifacts.append(os.path.basename(path))
    return ok, metrics, "contact Hamiltonian equation ẋ = Y_f", artifacts


def _run_bracket_matrix(task, ctx, rng, cfg, idx, out_dir, restricted):
    funcs = [ctx.fields[n] for n in task["functions"]]
    pts = ctx.sample(rng, task["points"])
    R = bracket_residual_matrix(
        ctx.manifold, pts, funcs, task["bracket"], constraints=ctx.constraints, restricted=restricted
    )
    worst = float(np.max(R))
    return (
        worst < task["threshold"],
        {"functions": task["functions"], "matrix": R, "max_entry": worst},
        "involutivity [1, f_i] = 0, [f_i, f_j] = 0",
        [],
    )


def _run_rank(task, ctx, rng, cfg, idx, out_dir):
    funcs = [ctx.fields[n] for n in task["functions"]]
    M = ctx.sample_manifold if task["restrict"] else None
    ranks, spectra = [], []
    for x in ctx.sample(rng, task["points"]):
        r, s = independence_rank(M, x, funcs, restrict=task["restrict"])
        ranks.append(r)
        spectra.append(s)
    expected = task["expected"]
    ok = expected is None or all(r == expected for r in ranks)
    return (
        ok,
        {"ranks": ranks, "min_singular_value": float(min(s[-1] for s in spectra))},
        "independence of differentials df_1 ∧ … ∧ df_k ≠ 0",
        [],
    )


def _run_frequencies(task, ctx, rng, cfg, idx, out_dir):
    M = ctx.sample_manifold
    x0 = ctx.sample(rng, 1)[0]
    traj = integrate(M, FlowSpec("reeb", task["dt"], task["t_end"]), x0)
    est = frequency_estimate(traj, chart_floor=cfg.tolerances.chart_floor)
    omega = [e.omega for e in est]
    metrics = {"omega": omega, "fit_residual": [e.residual for e in est]}
    if task["expected"] is not None:
        err = float(np.max(np.abs(np.array(omega) - np.array(task["expected"]))))
        metrics["max_error"] = err
        ok = err < task["tolerance"]
    else:
        ok = max(e.residual for e in est) < task["tolerance"]
    return ok, metrics, "torus winding θ_j(t) = θ_j(0) + t ω_j with ω_j = 4/a_j", []


def _run_dirac_check(task, ctx, rng, cfg, idx, out_dir, restricted):
    M, G = ctx.manifold, ctx.constraints
    N = submanifold(M, G)
    funcs = [ctx.fields[n] for n in task["functions"]]
    closed = isinstance(ctx.model, BrieskornModel) and all(
        n.startswith("f") and n[1:].isdigit() for n in task["functions"]
    )
    cross = closed_err = 0.0
    min_det = np.inf
    for x in ctx.sample(rng, task["points"]):
        data = check_admissible(M, G, x)
        min_det = min(min_det, abs(np.linalg.det(data.gram)))
        for i, j in combinations(range(len(funcs)), 2):
            a = restricted(M, G, x, funcs[i], funcs[j], data=data)
            b = intrinsic_restricted_bracket(M, G, x, funcs[i], funcs[j], N=N)
            cross = max(cross, abs(a - b))
            if closed:
                ji, jj = int(task["functions"][i][1:]), int(task["functions"][j][1:])
                closed_err = max(closed_err, abs(a - brieskorn_bracket_closed_form(ctx.model, x, ji, jj)))
    metrics = {"max_cross_check_error": cross, "min_abs_gram_det": float(min_det)}
    ok = cross < task["threshold"]
    if closed:
        metrics["max_closed_form_error"] = closed_err
        ok = ok and closed_err < task["threshold"]
    return ok, metrics, "Dirac-type restricted bracket [f, g]_N with Gram-inverse correction", []


def _run_verify(task, ctx, rng, cfg, idx, out_dir, restricted):
    res = run_check(task["identity"], rng, restricted=restricted)
    return res.passed, {"check": res.name, **res.metrics}, res.anchor, []


RUNNERS = {
    "flow": _run_flow,
    "bracket_matrix": _run_bracket_matrix,
    "rank": _run_rank,
    "frequencies": _run_frequencies,
    "dirac_check": _run_dirac_check,
    "verify_identity": _run_verify,
}
NEEDS_RESTRICTED = {"bracket_matrix", "dirac_check", "verify_identity"}


def _execute(cfg, idx, task, out_dir, restricted):
    rng = np.random.default_rng([cfg.seed, idx])
    t0 = time.perf_counter()
    runner = RUNNERS[task["kind"]]
    kwargs = {"restricted": restricted} if task["kind"] in NEEDS_RESTRICTED else {}
    try:
        ok, metrics, anchor, artifacts = runner(task, cfg.context, rng, cfg, idx, out_dir, **kwargs)
        status = "pass" if ok else "fail"
    except (ContactLabError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        status, metrics, anchor, artifacts = "error", {"error": f"{type(exc).__name__}: {exc}"}, "", []
    return TaskResult(idx, task["kind"], status, metrics, anchor, artifacts, time.perf_counter() - t0)


def thread_count():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc


def run_scenario(cfg, out_dir=None, write=True, restricted=restricted_bracket):
    """Run every task; task failures and errors never abort siblings."""
    if cfg.context is None:
        cfg = validate_scenario(cfg.to_dict())
    out_dir = cfg.output_dir if out_dir is None else out_dir
    if write:
        if not out_dir:
            raise ValidationError("output.directory", "expected a nonempty path")
        os.makedirs(out_dir, exist_ok=True)
    target = out_dir if write else None
    t0 = time.perf_counter()
    jobs = list(enumerate(cfg.tasks))
    workers = thread_count()
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda j: _execute(cfg, j[0], j[1], target, restricted), jobs))
    else:
        results = [_execute(cfg, i, t, target, restricted) for i, t in jobs]
    result = RunResult(cfg, results, wall_time=time.perf_counter() - t0)
    if write:
        path = os.path.join(out_dir, "report.json")
        atomic_write_text(path, json.dumps(result.report(), indent=2, sort_keys=True) + "\n")
        result.report_path = path
    return result


def paper_suite_config(seed=0, out_dir="verify-out"):
    data = {
        "model": {"name": "weighted_sphere", "params": {"weights": [1.0, 2.0]}},
        "seed": seed,
        "tasks": [{"kind": "verify_identity", "identity": name} for name in CHECKS],
        "output": {"format": "csv", "directory": out_dir},
    }
    return validate_scenario(data)


def verify_paper_suite(out_dir, seed=0, restricted=restricted_bracket, write=True):
    if not isinstance(out_dir, str) or not out_dir.strip():
        raise ValidationError("out_dir", "expected a nonempty path")
    cfg = paper_suite_config(seed, out_dir)
    return run_scenario(cfg, out_dir=out_dir, write=write, restricted=restricted)
