"""Versioned JSON forms for kernels, plans and reports.

Complex vectors are stored as parallel ``*_re`` / ``*_im`` arrays.  Sensor
locations are ints on a cyclic group and ``[i1, i2, ...]`` lists otherwise.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .constructors import ConstructionRecipe, PeriodicPlan2D
from .frames import FrameReport, PeriodicPlan, SamplingPlan
from .groups import FiniteGroup, make_group
from .recon import ReconstructionResult
from .spectral import Kernel

SCHEMA = "dynsamp/1"


class SchemaError(ValueError):
    pass


def _check(obj: dict, kind: str | None = None) -> None:
    if not isinstance(obj, dict):
        raise SchemaError("expected a JSON object")
    schema = obj.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise SchemaError(f"unsupported schema {schema!r}")
    if kind is not None and obj.get("type", kind) != kind:
        raise SchemaError(f"expected a {kind!r} document, got {obj.get('type')!r}")


def complex_to_json(v) -> tuple[list[float], list[float]]:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return [float(x) for x in v.real], [float(x) for x in v.imag]


def complex_from_json(re, im) -> np.ndarray:
    re = np.asarray(re, dtype=float)
    im = np.zeros_like(re) if im is None else np.asarray(im, dtype=float)
    if re.shape != im.shape:
        raise SchemaError("real and imaginary parts differ in length")
    return re + 1j * im


def point_to_json(group: FiniteGroup, i: int):
    return int(i) if group.ndim == 1 else list(group.multi(i))


def _group(obj: dict) -> FiniteGroup:
    try:
        return make_group([int(x) for x in obj["factors"]])
    except KeyError as exc:
        raise SchemaError("missing 'factors'") from exc


def kernel_to_dict(k: Kernel) -> dict:
    re, im = complex_to_json(k.symbol)
    return {"schema": SCHEMA, "type": "kernel", "factors": list(k.group.factors),
            "symbol_re": re, "symbol_im": im}


def kernel_from_dict(obj: dict) -> Kernel:
    _check(obj, "kernel")
    group = _group(obj)
    if "symbol_re" in obj:
        return Kernel(group, complex_from_json(obj["symbol_re"], obj.get("symbol_im")))
    if "space_re" in obj:
        from .spectral import kernel_from_space

        return kernel_from_space(group, complex_from_json(obj["space_re"], obj.get("space_im")))
    raise SchemaError("kernel needs 'symbol_re' (and optionally 'symbol_im')")


def _recipe_to_dict(r: ConstructionRecipe | None):
    if r is None:
        return None
    return {"kind": r.kind, "params": r.params, "claimed_depth": r.claimed_depth}


def _recipe_from_dict(obj) -> ConstructionRecipe | None:
    if not obj:
        return None
    return ConstructionRecipe(obj["kind"], dict(obj.get("params", {})), obj.get("claimed_depth"))


def plan_to_dict(plan: SamplingPlan | PeriodicPlan | PeriodicPlan2D) -> dict:
    if isinstance(plan, PeriodicPlan):
        base = plan_to_dict(plan.induced_plan())
        base.update(kind="periodic", m=plan.m, W=list(plan.W), depth=plan.depth)
        return base
    if isinstance(plan, PeriodicPlan2D):
        base = plan_to_dict(plan.induced_plan())
        base.update(kind="periodic2d", m=plan.m, W=[list(w) for w in plan.W], depth=plan.depth)
        return base
    out = {
        "schema": SCHEMA,
        "type": "plan",
        "kind": "plan",
        "factors": list(plan.group.factors),
        "omega": [point_to_json(plan.group, i) for i in plan.omega],
        "depths": None if plan.depths is None else list(plan.depths),
    }
    if plan.recipe is not None:
        out["recipe"] = _recipe_to_dict(plan.recipe)
    return out


def plan_from_dict(obj: dict) -> SamplingPlan | PeriodicPlan | PeriodicPlan2D:
    _check(obj, "plan")
    kind = obj.get("kind", "plan")
    recipe = _recipe_from_dict(obj.get("recipe"))
    if kind == "periodic":
        d = _group(obj).factors[0] if "factors" in obj else int(obj["d"])
        return PeriodicPlan(d, int(obj["m"]), tuple(obj["W"]), obj.get("depth"))
    if kind == "periodic2d":
        d = _group(obj).factors[0] if "factors" in obj else int(obj["d"])
        return PeriodicPlan2D(d, int(obj["m"]), tuple(tuple(w) for w in obj["W"]), obj.get("depth"), recipe)
    if kind != "plan":
        raise SchemaError(f"unknown plan kind {kind!r}")
    group = _group(obj)
    if "omega" not in obj:
        raise SchemaError("plan needs 'omega'")
    omega = [int(i) if isinstance(i, (int, float)) else tuple(int(x) for x in i) for i in obj["omega"]]
    depths = obj.get("depths")
    if isinstance(depths, list):
        depths = [int(x) for x in depths]
    elif depths is not None:
        depths = int(depths)
    return SamplingPlan.make(group, omega, depths, recipe)


def as_sampling_plan(plan) -> SamplingPlan:
    return plan if isinstance(plan, SamplingPlan) else plan.induced_plan()


def report_to_dict(r: FrameReport) -> dict:
    return {
        "verdict": r.verdict,
        "rank": r.rank,
        "required_rank": r.required_rank,
        "lower_frame_bound": r.lower_frame_bound,
        "upper_frame_bound": r.upper_frame_bound,
        "condition_number": r.condition_number,
        "failing_class": r.failing_class,
        "failing_slice": r.failing_slice,
        "min_cardinality_bound": r.min_cardinality_bound,
        "method": r.method,
        "kernel_role": r.kernel_role,
        "ambiguous": r.ambiguous,
        "notes": list(r.notes),
    }


def report_from_dict(obj: dict) -> FrameReport:
    fields = {k: obj[k] for k in ("verdict", "rank", "required_rank", "min_cardinality_bound")}
    extra = {k: obj.get(k) for k in ("lower_frame_bound", "upper_frame_bound", "failing_class", "failing_slice")}
    return FrameReport(**fields, **extra, method=obj.get("method", "direct"),
                       kernel_role=obj.get("kernel_role", "original"), ambiguous=bool(obj.get("ambiguous")),
                       notes=list(obj.get("notes", [])))


def reconstruction_to_dict(res: ReconstructionResult) -> dict:
    re, im = complex_to_json(res.estimate)
    out: dict[str, Any] = {
        "schema": SCHEMA,
        "type": "reconstruction",
        "estimate_re": re,
        "estimate_im": im,
        "residual_norm": res.residual_norm,
        "condition_number": res.condition_number,
        "exact_flag": res.exact_flag,
        "rank": res.rank,
        "required_rank": res.required_rank,
    }
    if res.frame_report is not None:
        out["frame_report"] = report_to_dict(res.frame_report)
    return out


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def load_json(source: str) -> Any:
    """Parse ``source`` as inline JSON, or read it as a file path when it is not JSON."""
    text = source.strip()
    if text[:1] in "{[":
        return json.loads(text)
    return json.loads(Path(source).read_text(encoding="utf-8"))
