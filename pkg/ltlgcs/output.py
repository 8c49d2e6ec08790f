#!/usr/bin/env python

"""
Artifacts of a run: `<name>.plan.json` and, for planar scenarios,
`<name>.svg` with the regions, the spline and its control points.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # pylint: disable=wrong-import-position
from matplotlib.patches import Polygon  # pylint: disable=wrong-import-position

import numpy as np  # pylint: disable=wrong-import-position

from ltlgcs.geometry import LabeledRegion  # pylint: disable=wrong-import-position
from ltlgcs.planner import Plan  # pylint: disable=wrong-import-position

log = logging.getLogger(__name__)

SAMPLES_PER_SEGMENT = 100
REGION_COLOR = "#dddddd"
LABELED_COLOR = "#9ecae1"


def plan_document(plan: Plan, name: str, formula: str) -> Dict[str, Any]:
    doc = plan.to_json()
    doc["name"] = name
    doc["formula"] = formula
    return doc


def write_plan(plan: Plan, name: str, formula: str, directory: str) -> str:
    path = os.path.join(directory, f"{name}.plan.json")
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(plan_document(plan, name, formula), handle, indent=2)
        handle.write("\n")
    log.info("wrote %s", path)
    return path


def read_plan(path: str) -> Plan:
    with open(path, encoding="utf-8") as handle:
        return Plan.from_json(json.load(handle))


def polygons(regions: List[LabeledRegion]) -> List[np.ndarray]:
    "Counter-clockwise vertices of each planar region (empty if unbounded)."
    return [region.polytope.vertices_2d() for region in regions]


def write_svg(
    plan: Plan, regions: List[LabeledRegion], name: str, directory: str
) -> Optional[str]:
    """
    Draw a planar plan: regions as filled polygons with their labels, the
    spline sampled at SAMPLES_PER_SEGMENT points per segment, and the
    control points as red dots. Returns None for other dimensions.
    """
    if plan.spline.segments[0].curve.n != 2:
        return None
    fig, ax = plt.subplots(figsize=(6, 6))
    try:
        for region, corners in zip(regions, polygons(regions)):
            if not len(corners):
                log.debug("region %s is not drawable", region.name)
                continue
            color = LABELED_COLOR if region.labels else REGION_COLOR
            ax.add_patch(
                Polygon(corners, closed=True, facecolor=color, edgecolor="#555555", alpha=0.6)
            )
            if region.labels:
                center = corners.mean(axis=0)
                ax.annotate(
                    ",".join(sorted(region.labels)), center, ha="center", va="center"
                )
        samples = plan.spline.sample(SAMPLES_PER_SEGMENT)
        ax.plot(samples[:, 0], samples[:, 1], color="black", linewidth=1.5)
        points = np.vstack([seg.curve.points for seg in plan.spline.segments])
        ax.scatter(points[:, 0], points[:, 1], color="red", s=8, zorder=3)
        ax.plot(*plan.spline.start, marker="o", color="green", zorder=4)
        ax.set_aspect("equal")
        ax.autoscale_view()
        ax.set_title(name)
        path = os.path.join(directory, f"{name}.svg")
        fig.savefig(path, format="svg", bbox_inches="tight")
    finally:
        plt.close(fig)
    log.info("wrote %s", path)
    return path
