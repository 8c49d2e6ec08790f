#!/usr/bin/env python

"""
Scenario files (schema "v1").

A scenario is a JSON object:

    {
      "schema": "v1",
      "name": "key_door_simple",
      "start": [0.5, 0.5],
      "formula": "!door U key & F goal",
      "regions": [
        {"name": "hall", "labels": [], "box": {"lo": [0, 0], "hi": [4, 1]}},
        {"name": "key", "labels": ["key"], "A": [[1, 0], ...], "b": [...]}
      ],
      "options": {"order": 4, "smoothness": 2, "norm": "l2",
                  "derivative_penalties": [[2, 0.1]], "seed": 0,
                  "max_round_paths": 10, "strict": false,
                  "loop_pinning": "full"}
    }

Instead of "regions" a scenario may give "synthetic": {"n": 8, "count": 6,
"seed": 0}, which expands to a chain of boxes (see synthetic).
"""

import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ltlgcs import config
from ltlgcs.error import (
    DimensionError,
    FormulaSyntaxError,
    PlanningError,
    ScenarioError,
    UnknownAtomError,
)
from ltlgcs.gcs.graph import CostSpec, Norm
from ltlgcs.geometry import HPolytope, LabeledRegion
from ltlgcs.ltl.formula import Formula
from ltlgcs.ltl.parser import parse_with_offsets
from ltlgcs.planner import LOOP_PINNING, PlanRequest

OPTIONS = {
    "order": int,
    "smoothness": int,
    "norm": str,
    "derivative_penalties": list,
    "seed": int,
    "max_round_paths": int,
    "strict": bool,
    "loop_pinning": str,
    "length_weight": float,
}


@dataclass
class ScenarioFile:
    name: str
    regions: List[LabeledRegion]
    q0: np.ndarray
    text: str  # the formula as written
    formula: Formula
    options: Dict[str, Any] = field(default_factory=dict)
    path: Optional[str] = None

    @property
    def n(self) -> int:
        return int(self.q0.size)

    def request(self, **overrides: Any) -> PlanRequest:
        """
        A PlanRequest from the scenario options, with `overrides` (any
        option name; None leaves the scenario's value) taking precedence.
        """
        opts = dict(self.options)
        opts.update({k: v for k, v in overrides.items() if v is not None})
        _check_options(opts)
        cost = CostSpec(
            Norm(opts.get("norm", config.DEFAULT_NORM)),
            float(opts.get("length_weight", 1.0)),
            tuple(
                (int(order), float(weight))
                for order, weight in opts.get("derivative_penalties", [])
            ),
        )
        return PlanRequest(
            self.formula,
            list(self.regions),
            self.q0,
            order=int(opts.get("order", config.DEFAULT_ORDER)),
            smoothness=int(opts.get("smoothness", config.DEFAULT_SMOOTHNESS)),
            cost=cost,
            max_round_paths=int(opts.get("max_round_paths", config.DEFAULT_MAX_ROUND_PATHS)),
            seed=opts.get("seed", 0),
            strict=bool(opts.get("strict", False)),
            loop_pinning=str(opts.get("loop_pinning", "full")),
            name=self.name,
        )


def _check_options(opts: Dict[str, Any]) -> None:
    for key, value in opts.items():
        if key not in OPTIONS:
            raise ScenarioError(f"unknown option {key!r}")
        kind = OPTIONS[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            continue
        if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
            raise ScenarioError(f"option {key!r} must be {kind.__name__}, got {value!r}")
    norm = opts.get("norm", config.DEFAULT_NORM)
    if norm not in {member.value for member in Norm}:
        raise ScenarioError(f"unknown norm {norm!r}")
    if opts.get("loop_pinning", "full") not in LOOP_PINNING:
        raise ScenarioError(f"unknown loop pinning {opts['loop_pinning']!r}")
    for item in opts.get("derivative_penalties", []):
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ScenarioError(f"derivative penalty {item!r} is not [order, weight]")


def _region(item: Any, index: int) -> LabeledRegion:
    if not isinstance(item, dict):
        raise ScenarioError(f"region {index} is not an object")
    name = item.get("name")
    if not isinstance(name, str) or not name:
        raise ScenarioError(f"region {index} has no name")
    labels = item.get("labels", [])
    if not isinstance(labels, list) or not all(isinstance(label, str) for label in labels):
        raise ScenarioError(f"labels of region {name} must be a list of strings")
    if "box" in item:
        box = item["box"]
        if not isinstance(box, dict) or "lo" not in box or "hi" not in box:
            raise ScenarioError(f"box of region {name} needs lo and hi")
        return LabeledRegion.box(name, box["lo"], box["hi"], labels)
    if "A" in item and "b" in item:
        return LabeledRegion(name, HPolytope(item["A"], item["b"]), frozenset(labels))
    raise ScenarioError(f"region {name} needs a box or A and b")


def from_dict(data: Any, path: Optional[str] = None) -> ScenarioFile:
    if not isinstance(data, dict):
        raise ScenarioError("a scenario is a JSON object")
    schema = data.get("schema", config.SCENARIO_SCHEMA)
    if schema != config.SCENARIO_SCHEMA:
        raise ScenarioError(f"unsupported schema {schema!r}")
    name = data.get("name") or (
        os.path.splitext(os.path.basename(path))[0] if path else "scenario"
    )
    text = data.get("formula")
    if not isinstance(text, str):
        raise ScenarioError("formula must be a string")
    options = data.get("options", {})
    if not isinstance(options, dict):
        raise ScenarioError("options must be an object")

    if "synthetic" in data:
        spec = data["synthetic"]
        if not isinstance(spec, dict) or "n" not in spec:
            raise ScenarioError("synthetic needs at least n")
        generated = synthetic(
            int(spec["n"]), int(spec.get("count", 6)), int(spec.get("seed", 0)), name
        )
        regions, q0 = generated.regions, generated.q0
    else:
        items = data.get("regions")
        if not isinstance(items, list) or not items:
            raise ScenarioError("regions must be a nonempty list")
        regions = [_region(item, i) for i, item in enumerate(items)]
        if "start" not in data:
            raise ScenarioError("start is missing")
        q0 = np.asarray(data["start"], dtype=float).reshape(-1)

    dims = {region.n for region in regions}
    if len(dims) != 1:
        raise DimensionError(f"regions span dimensions {sorted(dims)}")
    if "dimension" in data and int(data["dimension"]) not in dims:
        raise DimensionError(f"dimension is {data['dimension']}, regions are in R^{dims.pop()}")
    if q0.size not in dims:
        raise DimensionError(f"start has dimension {q0.size}")

    formula, offsets = parse_with_offsets(text)
    known = set().union(*(region.labels for region in regions))
    for atom in sorted(offsets, key=offsets.get):  # type: ignore[arg-type]
        if atom not in known:
            raise UnknownAtomError(f"atom {atom!r} labels no region", offsets[atom])
    _check_options(options)
    return ScenarioFile(name, regions, q0, text, formula, dict(options), path)


def load(path: str) -> ScenarioFile:
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as why:
        raise ScenarioError(f"cannot read {path}: {why.strerror}") from why
    except json.JSONDecodeError as why:
        raise ScenarioError(f"{path}: {why.msg} at line {why.lineno}") from why
    try:
        return from_dict(data, path)
    except (FormulaSyntaxError, UnknownAtomError):
        raise
    except PlanningError as why:
        why.detail = f"{path}: {why.detail or why.desc}"
        raise
    except (TypeError, ValueError) as why:
        raise ScenarioError(f"{path}: {why}") from why


def corpus(directory: str) -> List[str]:
    "Scenario files in a directory, sorted by name."
    if not os.path.isdir(directory):
        raise ScenarioError(f"{directory} is not a directory")
    return sorted(
        os.path.join(directory, entry)
        for entry in os.listdir(directory)
        if entry.endswith(".json")
    )


def synthetic(n: int, count: int = 6, seed: int = 0, name: Optional[str] = None) -> ScenarioFile:
    """
    A chain of `count` unit boxes in R^n. Each box is the previous one
    shifted by 3/4 along a randomly chosen axis, so consecutive boxes
    overlap. The middle box is labeled `a`, the last `goal`, and the task
    is F (a & F goal) from the center of the first box.
    """
    if n < 1 or count < 3:
        raise ScenarioError("synthetic scenarios need n ≥ 1 and at least 3 boxes")
    rng = np.random.default_rng(seed)
    corner = np.zeros(n)
    regions = []
    for i in range(count):
        labels = ["goal"] if i == count - 1 else ["a"] if i == count // 2 else []
        regions.append(LabeledRegion.box(f"box{i}", corner, corner + 1.0, labels))
        corner = corner.copy()
        corner[int(rng.integers(n))] += 0.75
    text = "F (a & F goal)"
    formula, _ = parse_with_offsets(text)
    return ScenarioFile(
        name or f"synthetic_n{n}", regions, np.full(n, 0.5), text, formula, {"seed": seed}
    )
