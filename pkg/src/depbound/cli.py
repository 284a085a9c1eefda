"""Command-line front end: subcommands, scenario files and run manifests.

Every subcommand builds a task record and hands it to the same executor the
scenario runner uses, so a scenario and the equivalent command line give
identical output.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import re
import sys
import time
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from . import __version__
from . import dependence_measures as dm
from . import matrix_bounds as mb
from . import mixing_counterexample as mc
from . import ustat_vstat as uv
from . import verification_harness as vh
from .process_models import (
    LinearProcessSpec,
    MatrixSeriesSpec,
    SpecError,
    VarSpec,
    simulate,
    spec_from_dict,
    spec_to_dict,
)
from .registry import LIST_SCHEMA, REGISTRY, derive_params, list_bounds, lookup, validate_params

EXIT_OK, EXIT_INTERNAL, EXIT_VALIDATION, EXIT_VIOLATION = 0, 1, 2, 3
SCHEMA_VERSION = 1
DEFAULT_REPS = 10_000


class ValidationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# scenario schema

_INT_POS = {"type": "integer", "minimum": 1}
_NUM_LIST = {"type": "array", "items": {"type": "number"}, "minItems": 1}

_TASK_SCHEMAS = {
    "simulate": {
        "properties": {"n": _INT_POS},
        "required": ["n"],
    },
    "measure": {
        "properties": {
            "what": {"enum": ["fdm", "fdm_monte_carlo", "uniform_fdm", "tau", "nu2"]},
            "p": {"type": "number", "minimum": 1},
            "max_lag": {"type": "integer", "minimum": 0},
            "window": {"type": "integer", "minimum": 0},
            "alphas": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
            "alpha": {"type": "number", "exclusiveMinimum": 0},
            "m": {"type": "integer", "minimum": 0},
            "window_sizes": {"type": "array", "items": _INT_POS, "minItems": 1},
        },
        "required": ["what"],
    },
    "bound": {
        "properties": {
            "bound_id": {"type": "string"},
            "params": {"type": "object"},
            "batch": {"type": "array", "items": {"type": "object"}},
            "consts": {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
        },
        "required": ["bound_id"],
    },
    "compare": {
        "properties": {
            "bound_id": {"type": "string"},
            "params": {"type": "object"},
            "derive": {"type": "boolean"},
            "n": {"oneOf": [_INT_POS, {"type": "array", "items": _INT_POS, "minItems": 1}]},
            "x_grid": _NUM_LIST,
            "consts": {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
            "kernel": {"type": "object"},
        },
        "required": ["bound_id", "x_grid"],
    },
    "counterexample": {
        "properties": {
            "d": {"type": "array", "items": _INT_POS, "minItems": 1},
            "kappa": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            "m": _INT_POS,
        },
        "required": ["d", "kappa", "m"],
    },
    "ustat": {
        "properties": {
            "kernel": {"enum": list(uv.BUILTIN_KERNELS)},
            "bandwidth": {"type": "number", "exclusiveMinimum": 0},
            "arity": {"type": "integer", "minimum": 1, "maximum": uv.MAX_ARITY},
            "n": _INT_POS,
            "law": {
                "type": "object",
                "properties": {"atoms": _NUM_LIST, "probabilities": _NUM_LIST},
                "required": ["atoms", "probabilities"],
            },
        },
        "required": ["kernel"],
    },
    "autocov": {
        "properties": {
            "n": {"type": "integer", "minimum": 2, "maximum": 2048},
            "u_grid": {"type": "array", "items": {"type": "number"}},
            "q": {"type": "number", "exclusiveMinimum": 2},
            "alpha": {"type": "number", "exclusiveMinimum": 0},
            "slack": {"type": "number", "minimum": 0},
            "consts": {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
        },
        "required": ["n"],
    },
}

_COMMON_TASK = {
    "type": {"enum": sorted(_TASK_SCHEMAS)},
    "name": {"type": "string", "pattern": "^[A-Za-z0-9_-]{1,64}$"},
    "spec": {"type": "object"},
    "reps": _INT_POS,
    "seed": {"type": "integer", "minimum": 0},
}


def _task_schema(kind: str) -> dict:
    s = _TASK_SCHEMAS[kind]
    return {
        "type": "object",
        "properties": {**_COMMON_TASK, **s["properties"]},
        "required": ["type", *s["required"]],
        "additionalProperties": False,
    }


SCENARIO_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string", "minLength": 1},
        "seed": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string", "minLength": 1},
        "reps": _INT_POS,
        "workers": _INT_POS,
        "spec": {"type": "object"},
        "tasks": {"type": "array", "items": {"type": "object", "required": ["type"],
                                             "properties": {"type": {"enum": sorted(_TASK_SCHEMAS)}}}},
    },
    "required": ["schema_version", "name", "seed", "output_dir", "tasks"],
    "additionalProperties": False,
}


def _where(err: jsonschema.ValidationError, prefix: str) -> str:
    path = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
    return f"{prefix}{path}: {err.message}"


def _spec_or_fail(d, where: str):
    try:
        return spec_from_dict(d)
    except (SpecError, KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"{where}: {e}") from e


def validate_task(task: dict, spec_dict: dict | None, where: str = "task"):
    """Check a task record against its schema and the target operation's preconditions."""
    try:
        jsonschema.validate(task, _task_schema(task.get("type")) if task.get("type") in _TASK_SCHEMAS
                            else {"required": ["type"], "properties": {"type": _COMMON_TASK["type"]}})
    except jsonschema.ValidationError as e:
        raise ValidationError(_where(e, where)) from e
    kind = task["type"]
    sd = task.get("spec", spec_dict)
    spec = None
    if sd is not None:
        spec = _spec_or_fail(sd, f"{where}.spec")
    needs_spec = kind in ("simulate", "measure", "compare", "autocov") or (kind == "ustat" and "law" not in task)
    if needs_spec and spec is None:
        raise ValidationError(f"{where}: a process spec is required (scenario-level or task-level 'spec')")
    if kind in ("bound", "compare"):
        bid = task["bound_id"]
        try:
            entry = lookup(bid)
        except KeyError as e:
            raise ValidationError(f"{where}.bound_id: {e.args[0]}") from e
        if kind == "compare" and bid not in REGISTRY:
            raise ValidationError(f"{where}.bound_id: {bid} is a moment bound; nothing to compare")
        if kind == "compare" and entry.statistic is None:
            raise ValidationError(f"{where}.bound_id: {bid} has no simulated counterpart")
        if kind == "bound":
            records = task.get("batch") or [task.get("params", {})]
            for i, rec in enumerate(records):
                _validate_params(bid, rec, f"{where}.{'batch[%d]' % i if 'batch' in task else 'params'}")
        else:
            for n in _ns(task):
                params = _compare_params(task, spec, n, where)
                _validate_params(bid, {**params, "x": 0.0}, f"{where}.params")
    if kind == "measure":
        _validate_measure(task, spec, where)
    if kind == "autocov" and not (isinstance(spec, LinearProcessSpec) or
                                  (isinstance(spec, VarSpec) and spec.dimension == 1)):
        raise ValidationError(f"{where}.spec: autocov needs a scalar causal process")
    if kind == "ustat":
        _kernel(task)
        if "law" in task:
            try:
                uv.FiniteSupportLaw(tuple(task["law"]["atoms"]), tuple(task["law"]["probabilities"]))
            except ValueError as e:
                raise ValidationError(f"{where}.law: {e}") from e
    return spec


def _validate_params(bid, params, where):
    try:
        validate_params(bid, params)
    except jsonschema.ValidationError as e:
        raise ValidationError(_where(e, where)) from e


def _validate_measure(task, spec, where):
    what = task["what"]
    ok = {
        "fdm": LinearProcessSpec,
        "fdm_monte_carlo": LinearProcessSpec,
        "uniform_fdm": VarSpec,
        "tau": (LinearProcessSpec, VarSpec),
        "nu2": MatrixSeriesSpec,
    }[what]
    if not isinstance(spec, ok):
        raise ValidationError(f"{where}.what: '{what}' does not apply to a {type(spec).__name__}")
    if what in ("fdm", "fdm_monte_carlo", "uniform_fdm") and "p" not in task:
        raise ValidationError(f"{where}: '{what}' needs p")
    if what == "uniform_fdm" and "alpha" not in task:
        raise ValidationError(f"{where}: 'uniform_fdm' needs alpha")
    if what == "tau" and "m" not in task:
        raise ValidationError(f"{where}: 'tau' needs m")


def _ns(task) -> list[int]:
    n = task.get("n", task.get("params", {}).get("n"))
    if n is None:
        raise ValidationError("compare needs n (task-level or in params)")
    return [int(v) for v in (n if isinstance(n, list) else [n])]


def _compare_params(task, spec, n, where="task") -> dict:
    bid = task["bound_id"]
    params = {}
    if task.get("derive"):
        try:
            params = derive_params(bid, spec, n, **task.get("params", {}))
        except ValueError as e:
            raise ValidationError(f"{where}.derive: {e}") from e
    params.update(task.get("params", {}))
    params["n"] = n
    if bid == "nagaev_fdm" and params.get("variant") == "i" and "process" not in params:
        params["process"] = spec_to_dict(spec)
    return params


def _kernel(task) -> uv.KernelSpec:
    try:
        return uv.builtin_kernel(task["kernel"], task.get("bandwidth", 1.0), task.get("arity", 2))
    except ValueError as e:
        raise ValidationError(f"kernel: {e}") from e


# ---------------------------------------------------------------------------
# execution


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


class TaskOutput:
    def __init__(self, result: dict, table: str | None = None, violation: bool = False):
        self.result = result
        self.table = table
        self.violation = violation


def _bound_csv(bid: str, records: list[dict], results) -> str:
    keys: list[str] = []
    for r in records:
        keys += [k for k in r if k not in keys]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys + ["raw", "clamped", "vacuous"])
    for rec, res in zip(records, results):
        w.writerow([json.dumps(rec[k]) if isinstance(rec.get(k), (dict, list)) else rec.get(k, "") for k in keys]
                   + [repr(res.raw_value), repr(res.clamped), res.vacuous])
    return buf.getvalue()


def execute_task(task: dict, spec, seed: int, reps: int, workers: int = 1) -> TaskOutput:
    kind = task["type"]
    seed = int(task.get("seed", seed))
    reps = int(task.get("reps", reps))
    if kind == "simulate":
        frag = simulate(spec, task["n"], seed)
        if isinstance(spec, MatrixSeriesSpec):
            return TaskOutput({"spec": spec_to_dict(spec, seed), "n": task["n"], "matrices": frag})
        return TaskOutput(frag.to_dict())
    if kind == "measure":
        return _measure(task, spec, seed, reps, workers)
    if kind == "bound":
        entry = lookup(task["bound_id"])
        consts = task.get("consts")
        if "batch" in task:
            results = [entry.evaluate(rec, consts) for rec in task["batch"]]
            return TaskOutput({"bound_id": entry.bound_id, "results": [r.to_dict() for r in results]},
                              _bound_csv(entry.bound_id, task["batch"], results))
        return TaskOutput(entry.evaluate(task.get("params", {}), consts).to_dict())
    if kind == "compare":
        reports = []
        for n in _ns(task):
            params = _compare_params(task, spec, n)
            kernel = _kernel(task["kernel"]) if "kernel" in task else None
            reports.append(vh.compare(task["bound_id"], spec, params, task["x_grid"], reps, seed,
                                      kernel, workers, task.get("consts")))
        table = reports[0].to_csv() + "".join(r.to_csv().split("\n", 1)[1] for r in reports[1:])
        return TaskOutput({"reports": [r.to_dict() for r in reports]}, table,
                          any(r.violations for r in reports))
    if kind == "counterexample":
        rows, wit = mc.d_sweep(task["d"], task["kappa"], task["m"], reps, seed, workers)
        return TaskOutput({"witnesses": [w.to_dict() for w in wit], "sweep": [r.__dict__ for r in rows]},
                          mc.sweep_csv(rows))
    if kind == "ustat":
        return _ustat(task, spec, seed)
    if kind == "autocov":
        chk = vh.autocov_eigen_check(spec, task["n"], reps, seed, task.get("slack", 1e-8),
                                     task.get("u_grid", ()), task.get("q", 4.0), task.get("alpha", 1.0),
                                     task.get("consts"), workers)
        table = None
        if chk.tail_rows:
            rep = vh.ComparisonReport("autocov_lambda_max", spec_to_dict(spec), {}, "toeplitz_lambda_max",
                                      None, chk.tail_rows)
            table = rep.to_csv()
        viol = not chk.all_hold or any(r.verdict == "violation_flag" for r in chk.tail_rows)
        return TaskOutput(chk.to_dict(), table, viol)
    raise ValidationError(f"unknown task type {kind!r}")


def _measure(task, spec, seed, reps, workers) -> TaskOutput:
    what = task["what"]
    max_lag = int(task.get("max_lag", 20))
    if what == "fdm":
        prof = dm.fdm_analytic_linear(spec, task["p"], max_lag)
        alphas = task.get("alphas", [])
        out = prof.to_dict()
        if alphas and prof.tail is not None:
            out["dan"] = [dm.dan(prof, a).to_dict() for a in alphas]
        return TaskOutput(out, prof.to_csv(alphas))
    if what == "fdm_monte_carlo":
        window = int(task.get("window", max(max_lag, spec.truncation_lag)))
        g = dm.linear_map(spec.weights[: window + 1])
        prof = dm.fdm_monte_carlo(g, spec.innovation, task["p"], max_lag, window, reps, seed, workers)
        return TaskOutput(prof.to_dict(), prof.to_csv(task.get("alphas", [])))
    if what == "uniform_fdm":
        u = dm.uniform_fdm(spec, task["p"], task["alpha"], max_lag, reps, seed, workers)
        return TaskOutput(u.to_dict(), u.vector_profile.to_csv())
    if what == "tau":
        return TaskOutput(dm.tau_coupling_bound(spec, task["m"], reps, seed, workers).to_dict())
    if what == "nu2":
        out = {"certified_upper": mb.nu2_upper_bound(spec).to_dict()}
        if spec.var.transition_norm == 0:
            out["exact_iid"] = mb.variance_proxy_iid(spec).to_dict()
        if "window_sizes" in task:
            out["window_monte_carlo"] = mb.variance_proxy(spec, task["window_sizes"], reps, seed,
                                                          workers=workers).to_dict()
        return TaskOutput(out)
    raise ValidationError(f"unknown measure {what!r}")


def _ustat(task, spec, seed) -> TaskOutput:
    kernel = _kernel(task)
    out: dict[str, Any] = {"kernel": kernel.to_dict()}
    if "law" in task:
        law = uv.FiniteSupportLaw(tuple(task["law"]["atoms"]), tuple(task["law"]["probabilities"]))
        dec = uv.hoeffding_decompose(kernel, law)
        recon = dec.reconstruct()
        s = law.size
        grid = np.array(np.meshgrid(*[np.arange(s)] * kernel.arity, indexing="ij")).reshape(kernel.arity, -1)
        atoms = np.asarray(law.atoms)
        H = kernel(*[atoms[g] for g in grid]).reshape((s,) * kernel.arity)
        out["decomposition"] = {
            "law": law.to_dict(),
            "theta": dec.theta,
            "h": {str(p): dec.h[p].tolist() for p in dec.h},
            "reconstruction_error": float(np.max(np.abs(recon + dec.theta - H))),
            "degeneracy_residuals": {str(k): v for k, v in dec.degeneracy_residuals().items()},
        }
    if spec is not None:
        n = int(task.get("n", 200))
        frag = simulate(spec, n, seed)
        out["n"] = n
        out["seed"] = seed
        out["u_statistic"] = uv.u_statistic(frag, kernel)
        out["v_statistic"] = uv.v_statistic(frag, kernel)
    return TaskOutput(out)


# ---------------------------------------------------------------------------
# scenarios and manifests


def bundled_scenarios() -> list[str]:
    return sorted(f.name[:-5] for f in (resources.files("depbound") / "scenarios").iterdir() if f.name.endswith(".json"))


def load_scenario(path: Path) -> tuple[dict, bytes]:
    """Read a scenario or manifest file; a bare bundled name such as ``paper_demo`` also works."""
    path = Path(path)
    if not path.exists() and path.name in bundled_scenarios() and len(path.parts) == 1:
        raw = (resources.files("depbound") / "scenarios" / f"{path.name}.json").read_bytes()
    else:
        raw = path.read_bytes()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: not valid JSON ({e})") from e
    if isinstance(doc, dict) and "scenario" in doc and "input_sha256" in doc:
        # a manifest: re-run its embedded scenario
        doc = doc["scenario"]
    return doc, _canonical(doc)


def _canonical(doc) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()


def validate_scenario(doc: dict) -> list:
    try:
        jsonschema.validate(doc, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as e:
        raise ValidationError(_where(e, "scenario")) from e
    specs = []
    for i, task in enumerate(doc["tasks"]):
        specs.append(validate_task(task, doc.get("spec"), f"tasks[{i}]"))
    return specs


def run_scenario(doc: dict, raw: bytes, out_dir: Path | None = None, workers: int | None = None,
                 log=sys.stderr) -> int:
    specs = validate_scenario(doc)
    root = Path(out_dir if out_dir is not None else doc["output_dir"]).resolve()
    root.mkdir(parents=True, exist_ok=True)
    seed = doc["seed"]
    reps = doc.get("reps", DEFAULT_REPS)
    workers = workers or doc.get("workers", 1)
    t0 = time.perf_counter()
    outputs = []
    violation = False
    for i, (task, spec) in enumerate(zip(doc["tasks"], specs)):
        stem = f"{i:02d}_{task.get('name', task['type'])}"
        res = execute_task(task, spec, seed, reps, workers)
        violation |= res.violation
        files = [(root / f"{stem}.json", _dumps(res.result))]
        if res.table is not None:
            files.append((root / f"{stem}.csv", res.table))
        for path, text in files:
            if path.resolve().parent != root:
                raise ValidationError(f"refusing to write outside {root}: {path}")
            path.write_text(text)
            outputs.append({"file": path.name, "sha256": hashlib.sha256(text.encode()).hexdigest()})
        print(f"[{i + 1}/{len(doc['tasks'])}] {task['type']} -> {stem}", file=log)
    manifest = {
        "tool": "depbound",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "workers": workers,
        "wall_time_s": time.perf_counter() - t0,
        "input_sha256": hashlib.sha256(raw).hexdigest(),
        "outputs": outputs,
        "violation": violation,
        "scenario": doc,
    }
    (root / "manifest.json").write_text(_dumps(manifest))
    return EXIT_VIOLATION if violation else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _kv(text: str) -> tuple[str, Any]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k, json.loads(v)
    except json.JSONDecodeError:
        return k, v


def _json_arg(text: str):
    """Inline JSON, or ``@path`` / a path to a JSON file."""
    p = Path(text[1:] if text.startswith("@") else text)
    if text.startswith("@") or (not text.lstrip().startswith(("{", "[")) and p.exists()):
        return json.loads(p.read_text())
    return json.loads(text)


def _grid(text: str) -> list[float]:
    m = re.fullmatch(r"\s*([^:]+):([^:]+):(\d+)\s*", text)
    if m:
        lo, hi, k = float(m[1]), float(m[2]), int(m[3])
        return np.linspace(lo, hi, k).tolist()
    return [float(v) for v in text.split(",") if v.strip()]


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--reps", type=int, default=None, help=f"Monte Carlo replications (default {DEFAULT_REPS})")
    p.add_argument("--out", type=Path, default=None, help="output directory (default: print to stdout)")
    p.add_argument("--json", action="store_true", help="print JSON instead of the CSV table")
    p.add_argument("--workers", type=int, default=1, help="worker threads; results do not depend on it")


def _spec_arg(p, required=True):
    p.add_argument("--spec", type=_json_arg, required=required, help="process spec as JSON or a path to a JSON file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="depbound", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"depbound {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate one fragment of a process")
    _common(p); _spec_arg(p)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("measure", help="dependence measures of a process")
    _common(p); _spec_arg(p)
    p.add_argument("what", choices=["fdm", "fdm_monte_carlo", "uniform_fdm", "tau", "nu2"])
    p.add_argument("--p", type=float)
    p.add_argument("--max-lag", type=int, default=20)
    p.add_argument("--window", type=int)
    p.add_argument("--alphas", type=lambda s: [float(v) for v in s.split(",")], default=None)
    p.add_argument("--alpha", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--window-sizes", type=lambda s: [int(v) for v in s.split(",")])

    p = sub.add_parser("bound", help="evaluate a tail or moment bound")
    _common(p)
    p.add_argument("bound_id")
    p.add_argument("--param", type=_kv, action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--params-json", type=_json_arg, help="parameter record as JSON or a file path")
    p.add_argument("--const", type=_kv, action="append", default=[], metavar="NAME=VALUE",
                   help="user-supplied constant (default 1)")
    p.add_argument("--batch", type=_json_arg, help="JSON array of parameter records; emits CSV")

    p = sub.add_parser("compare", help="compare a bound with the simulated tail")
    _common(p); _spec_arg(p)
    p.add_argument("bound_id")
    p.add_argument("--n", type=int, action="append", required=True)
    p.add_argument("--x-grid", type=_grid, required=True, help="comma list or lo:hi:count")
    p.add_argument("--param", type=_kv, action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--const", type=_kv, action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--derive", action="store_true", help="derive bound inputs from the spec")

    p = sub.add_parser("counterexample", help="alpha versus beta mixing separation witness")
    _common(p)
    p.add_argument("--d", type=int, nargs="+", required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--m", type=int, required=True)

    p = sub.add_parser("ustat", help="exact U/V statistics and Hoeffding decompositions")
    _common(p); _spec_arg(p, required=False)
    p.add_argument("--kernel", required=True, choices=uv.BUILTIN_KERNELS)
    p.add_argument("--bandwidth", type=float, default=1.0)
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--atoms", type=lambda s: [float(v) for v in s.split(",")])
    p.add_argument("--probs", type=lambda s: [float(v) for v in s.split(",")])

    p = sub.add_parser("autocov", help="autocovariance eigenvalue versus periodogram maximum")
    _common(p); _spec_arg(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--u-grid", type=_grid, default=[])
    p.add_argument("--q", type=float, default=4.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--const", type=_kv, action="append", default=[], metavar="NAME=VALUE")

    p = sub.add_parser("run", help="run a scenario file (or re-run a manifest)")
    p.add_argument("scenario", type=Path, help="scenario or manifest path, or a bundled name (paper_demo)")
    p.add_argument("--out", type=Path, default=None, help="override the scenario's output_dir")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("list-bounds", help="registered bounds and their parameters")
    p.add_argument("--json", action="store_true")
    p.add_argument("--all", action="store_true", help="include moment bounds")
    return ap


def _task_from_args(a) -> tuple[dict, dict | None]:
    spec = getattr(a, "spec", None)
    cmd = a.command
    if cmd == "simulate":
        return {"type": "simulate", "n": a.n}, spec
    if cmd == "measure":
        t = {"type": "measure", "what": a.what, "max_lag": a.max_lag}
        for k in ("p", "window", "alphas", "alpha", "m", "window_sizes"):
            if getattr(a, k) is not None:
                t[k] = getattr(a, k)
        return t, spec
    if cmd == "bound":
        t = {"type": "bound", "bound_id": a.bound_id}
        params = dict(a.params_json or {})
        params.update(dict(a.param))
        if a.batch is not None:
            t["batch"] = [{**params, **rec} for rec in a.batch]
        else:
            t["params"] = params
        if a.const:
            t["consts"] = dict(a.const)
        return t, None
    if cmd == "compare":
        t = {"type": "compare", "bound_id": a.bound_id, "n": a.n if len(a.n) > 1 else a.n[0],
             "x_grid": a.x_grid, "params": dict(a.param)}
        if a.derive:
            t["derive"] = True
        if a.const:
            t["consts"] = dict(a.const)
        return t, spec
    if cmd == "counterexample":
        return {"type": "counterexample", "d": a.d, "kappa": a.kappa, "m": a.m}, None
    if cmd == "ustat":
        t = {"type": "ustat", "kernel": a.kernel, "bandwidth": a.bandwidth, "arity": a.arity, "n": a.n}
        if a.atoms is not None:
            t["law"] = {"atoms": a.atoms, "probabilities": a.probs or [1 / len(a.atoms)] * len(a.atoms)}
        return t, spec
    if cmd == "autocov":
        t = {"type": "autocov", "n": a.n, "u_grid": a.u_grid, "q": a.q, "alpha": a.alpha}
        if a.const:
            t["consts"] = dict(a.const)
        return t, spec
    raise ValidationError(f"unknown command {cmd}")


def _emit(a, res: TaskOutput, stdout) -> None:
    if a.out is not None:
        a.out.mkdir(parents=True, exist_ok=True)
        (a.out / f"{a.command}.json").write_text(_dumps(res.result))
        if res.table is not None:
            (a.out / f"{a.command}.csv").write_text(res.table)
        return
    if res.table is not None and not a.json:
        stdout.write(res.table)
    else:
        stdout.write(_dumps(res.result))


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_VALIDATION if e.code else EXIT_OK
    try:
        if a.command == "list-bounds":
            rows = list_bounds(include_moments=a.all)
            jsonschema.validate(rows, LIST_SCHEMA)
            if a.json:
                stdout.write(_dumps(rows))
            else:
                for r in rows:
                    consts = ", ".join(f"{c['name']}:{c['source']}" for c in r["constants"]) or "-"
                    stdout.write(f"{r['bound_id']:24s} {r['module']:14s} "
                                 f"params={','.join(r['parameters']['required'])}  constants={consts}\n")
            return EXIT_OK
        if a.command == "run":
            doc, raw = load_scenario(a.scenario)
            return run_scenario(doc, raw, a.out, a.workers, log=stderr)
        task, spec_dict = _task_from_args(a)
        spec = validate_task(task, spec_dict, a.command)
        res = execute_task(task, spec, a.seed, a.reps or DEFAULT_REPS, a.workers)
        _emit(a, res, stdout)
        return EXIT_VIOLATION if res.violation else EXIT_OK
    except (ValidationError, SpecError, jsonschema.ValidationError, ValueError, uv.BudgetExceededError) as e:
        print(f"depbound: validation error: {e}", file=stderr)
        return EXIT_VALIDATION
    except Exception as e:  # noqa: BLE001
        print(f"depbound: internal error: {type(e).__name__}: {e}", file=stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
