"""Scenario files: parsing, validation, and execution.

A scenario is a JSON document naming groups, couplings, and multipliers, plus
an ordered task list.  The schema is versioned and strict: unknown fields are
rejected so that archived reports stay reproducible.
"""
from __future__ import annotations

import hashlib
import json
import time
import zlib

import numpy as np

from . import __version__
from .actions import (ActionError, AlgebraShape, CouplingRecord, TraceAction,
                      build_diagonal_coupling, build_me_product_coupling,
                      build_wstar_coupling, coupling_index, koopman)
from .algebra import AlgebraElement
from .groups import GroupError, GroupFunction, build_group
from .induction import induction_kernel, induce_multiplier, verify_lemma
from .multipliers import b2_norm, q_norm
from .sdp import SdpError

__all__ = ["ScenarioError", "Scenario", "run_scenario"]

SCHEMA_VERSION = 1

_TOP_FIELDS = {"schema", "name", "seed", "tolerances", "groups", "couplings",
               "multipliers", "tasks"}
_TOL_FIELDS = {"tol", "max_iter"}
_TASK_TYPES = {"norm", "induce", "verify", "kernel", "koopman_check"}


class ScenarioError(ValueError):
    """Malformed scenario file or unresolved reference."""


def _require_fields(obj, allowed, required, where):
    unknown = set(obj) - allowed
    if unknown:
        raise ScenarioError(f"{where}: unknown fields {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ScenarioError(f"{where}: missing fields {sorted(missing)}")


def _as_complex(v, where):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(v[0], v[1])
    raise ScenarioError(f"{where}: expected a number or [re, im] pair")


def _complex_matrix(data, where):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: bad matrix data ({exc})") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ScenarioError(f"{where}: matrices are nested arrays of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


class Scenario:
    """A parsed and validated scenario."""

    def __init__(self, doc, digest=None, source=None):
        if not isinstance(doc, dict):
            raise ScenarioError("scenario root must be an object")
        _require_fields(doc, _TOP_FIELDS, {"schema", "tasks"}, "scenario")
        if doc["schema"] != SCHEMA_VERSION:
            raise ScenarioError(f"unsupported schema version {doc['schema']!r}")
        self.doc = doc
        self.digest = digest
        self.source = source
        self.name = doc.get("name", source or "scenario")
        self.seed = doc.get("seed")
        tolerances = doc.get("tolerances", {})
        _require_fields(tolerances, _TOL_FIELDS, set(), "tolerances")
        self.tol = float(tolerances.get("tol", 1e-7))
        self.max_iter = int(tolerances.get("max_iter", 200))

        self.groups = {}
        for name, spec in doc.get("groups", {}).items():
            try:
                self.groups[name] = build_group(spec)
            except GroupError as exc:
                raise ScenarioError(f"group {name!r}: {exc}") from exc

        self.couplings = {}
        for name, spec in doc.get("couplings", {}).items():
            try:
                self.couplings[name] = self._build_coupling(name, spec)
            except (GroupError, ActionError) as exc:
                raise ScenarioError(f"coupling {name!r}: {exc}") from exc

        self.multipliers = {}
        for name, spec in doc.get("multipliers", {}).items():
            self.multipliers[name] = self._build_multiplier(name, spec)

        self.tasks = []
        for i, task in enumerate(doc["tasks"]):
            self.tasks.append(self._check_task(i, task))

    # -- construction helpers -------------------------------------------------

    def _group(self, name, where):
        if name not in self.groups:
            raise ScenarioError(f"{where}: unknown group {name!r}")
        return self.groups[name]

    def _build_coupling(self, name, spec):
        where = f"coupling {name!r}"
        kind = spec.get("type")
        if kind == "diagonal":
            _require_fields(spec, {"type", "group"}, {"type", "group"}, where)
            return build_diagonal_coupling(self._group(spec["group"], where))
        if kind == "me_product":
            _require_fields(spec, {"type", "gamma", "lambda"}, {"type", "gamma", "lambda"}, where)
            return build_me_product_coupling(self._group(spec["gamma"], where),
                                             self._group(spec["lambda"], where))
        if kind == "wstar":
            _require_fields(spec, {"type", "gamma", "lambda", "pairing"},
                            {"type", "gamma", "lambda"}, where)
            return build_wstar_coupling(self._group(spec["gamma"], where),
                                        self._group(spec["lambda"], where),
                                        pairing=spec.get("pairing"))
        if kind == "explicit":
            return self._build_explicit_coupling(spec, where)
        raise ScenarioError(f"{where}: unknown coupling type {kind!r}")

    def _build_explicit_coupling(self, spec, where):
        fields = {"type", "gamma", "lambda", "shape", "gamma_action",
                  "lambda_action", "q", "p"}
        _require_fields(spec, fields, fields, where)
        shape_spec = spec["shape"]
        _require_fields(shape_spec, {"blocks"}, {"blocks"}, f"{where}.shape")
        shape = AlgebraShape([(blk["dim"], blk["weight"]) for blk in shape_spec["blocks"]])

        def action(group_name, data, label):
            group = self._group(group_name, where)
            _require_fields(data, {"block_perm", "unitaries"},
                            {"block_perm", "unitaries"}, f"{where}.{label}")
            unitaries = [[_complex_matrix(u, f"{where}.{label}") for u in row]
                         for row in data["unitaries"]]
            return TraceAction(group, shape, data["block_perm"], unitaries)

        def element(data, label):
            return AlgebraElement(shape, [_complex_matrix(b, f"{where}.{label}")
                                          for b in data])

        return CouplingRecord(
            action(spec["gamma"], spec["gamma_action"], "gamma_action"),
            action(spec["lambda"], spec["lambda_action"], "lambda_action"),
            element(spec["q"], "q"), element(spec["p"], "p"),
            label=f"explicit({spec['gamma']},{spec['lambda']})")

    def _build_multiplier(self, name, spec):
        where = f"multiplier {name!r}"
        kind = spec.get("type")
        if kind == "delta":
            _require_fields(spec, {"type", "group", "at"}, {"type", "group"}, where)
            return GroupFunction.delta(self._group(spec["group"], where),
                                       int(spec.get("at", 0)))
        if kind == "constant":
            _require_fields(spec, {"type", "group", "value"}, {"type", "group"}, where)
            return GroupFunction.constant(self._group(spec["group"], where),
                                          _as_complex(spec.get("value", 1.0), where))
        if kind == "explicit":
            _require_fields(spec, {"type", "group", "values"}, {"type", "group", "values"}, where)
            group = self._group(spec["group"], where)
            values = [_as_complex(v, where) for v in spec["values"]]
            if len(values) != group.order:
                raise ScenarioError(f"{where}: expected {group.order} values")
            return GroupFunction(group, values)
        if kind == "random":
            _require_fields(spec, {"type", "group", "positive_definite"},
                            {"type", "group"}, where)
            if self.seed is None:
                raise ScenarioError(f"{where}: random multipliers need a scenario seed")
            rng = np.random.default_rng([self.seed, zlib.crc32(name.encode())])
            group = self._group(spec["group"], where)
            if spec.get("positive_definite", False):
                return GroupFunction.random_positive_definite(group, rng)
            return GroupFunction.random_complex(group, rng)
        raise ScenarioError(f"{where}: unknown multiplier type {kind!r}")

    def _check_task(self, i, task):
        where = f"task {i}"
        if not isinstance(task, dict):
            raise ScenarioError(f"{where}: must be an object")
        kind = task.get("type")
        if kind not in _TASK_TYPES:
            raise ScenarioError(f"{where}: unknown task type {kind!r}")
        allowed = {"type", "name"}
        required = {"type"}
        if kind in ("norm",):
            allowed |= {"multiplier"}
            required |= {"multiplier"}
        if kind in ("induce", "verify"):
            allowed |= {"coupling", "multiplier"}
            required |= {"coupling", "multiplier"}
        if kind in ("kernel", "koopman_check"):
            allowed |= {"coupling"}
            required |= {"coupling"}
        _require_fields(task, allowed, required, where)
        if "multiplier" in required and task["multiplier"] not in self.multipliers:
            raise ScenarioError(f"{where}: unknown multiplier {task['multiplier']!r}")
        if "coupling" in required and task["coupling"] not in self.couplings:
            raise ScenarioError(f"{where}: unknown coupling {task['coupling']!r}")
        out = dict(task)
        out.setdefault("name", f"task-{i:02d}-{kind}")
        return out

    @classmethod
    def load(cls, path):
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise ScenarioError(f"cannot read {path}: {exc}") from exc
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        return cls(doc, digest=hashlib.sha256(raw).hexdigest(), source=str(path))


# -- execution ----------------------------------------------------------------

def _run_task(scenario, task):
    kind = task["type"]
    result = {"name": task["name"], "type": kind}
    tol = scenario.tol
    if kind == "norm":
        phi = scenario.multipliers[task["multiplier"]]
        result["multiplier"] = task["multiplier"]
        result["b2_norm"] = b2_norm(phi, tol=tol, max_iter=scenario.max_iter)
        result["q_norm"] = q_norm(phi, tol=tol, max_iter=scenario.max_iter)
        result["sup_norm"] = phi.sup_norm()
        result["l1_norm"] = phi.l1_norm()
    elif kind == "kernel":
        c = scenario.couplings[task["coupling"]]
        kernel = induction_kernel(c)
        result["coupling"] = c.label
        result["kernel"] = [list(row) for row in kernel.K]
        result["row_sum_defect"] = float(np.max(np.abs(kernel.K.sum(axis=1) - 1.0)))
        result["min_entry"] = float(kernel.K.min())
        result["trace_form_defect"] = kernel.trace_form_defect
        result["index"] = coupling_index(c)
        if c.pairing is not None:
            result["pairing"] = list(c.pairing)
    elif kind == "induce":
        c = scenario.couplings[task["coupling"]]
        phi = scenario.multipliers[task["multiplier"]]
        kernel = induction_kernel(c)
        phi_hat = induce_multiplier(kernel, phi)
        result["coupling"] = c.label
        result["multiplier"] = task["multiplier"]
        result["induced_values"] = [complex(v) for v in phi_hat.values]
        if c.pairing is not None:
            result["pairing"] = list(c.pairing)
    elif kind == "verify":
        c = scenario.couplings[task["coupling"]]
        phi = scenario.multipliers[task["multiplier"]]
        report = verify_lemma(c, phi, tol=tol, norm_tol=min(tol, 1e-7))
        result.update(report)
        result["multiplier"] = task["multiplier"]
        result["pass"] = bool(report["passed"])
        del result["passed"]
    elif kind == "koopman_check":
        c = scenario.couplings[task["coupling"]]
        result["coupling"] = c.label
        for label, action in (("gamma", c.gamma_action), ("lambda", c.lambda_action)):
            koop = koopman(action)
            traces = [abs(np.trace(koop.matrix(g))) for g in range(action.group.order)]
            result[f"{label}_koopman_traces"] = traces
            result[f"{label}_offidentity_max"] = float(max(traces[1:], default=0.0))
            result[f"{label}_identity_trace"] = traces[0]
        off = max(result["gamma_offidentity_max"], result["lambda_offidentity_max"])
        result["pass"] = off <= 1e-8
    return result


def run_scenario(scenario, include_timing=True):
    """Execute every task in order; solver failures become failed task entries."""
    report = {
        "schema": SCHEMA_VERSION,
        "tool": "vnelab",
        "version": __version__,
        "scenario": scenario.name,
        "scenario_digest": scenario.digest,
        "seed": scenario.seed,
        "tol": scenario.tol,
        "tasks": [],
    }
    if include_timing:
        report["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    solver_failure = False
    for task in scenario.tasks:
        start = time.perf_counter()
        try:
            result = _run_task(scenario, task)
        except SdpError as exc:
            result = {"name": task["name"], "type": task["type"],
                      "pass": False, "solver_failure": str(exc)}
            solver_failure = True
        if include_timing:
            result["wall_clock_s"] = time.perf_counter() - start
        report["tasks"].append(result)
    verdicts = [t["pass"] for t in report["tasks"] if "pass" in t]
    report["all_passed"] = all(verdicts) if verdicts else True
    report["solver_failure"] = solver_failure
    return report
