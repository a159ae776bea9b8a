"""Run artifacts: CSV tables and an SVG sketch of the solved configuration.

Numbers are written with 12 significant digits, so repeated runs with the
same inputs produce byte-identical files.
"""
from __future__ import annotations

import csv
import math
import os
from xml.sax.saxutils import quoteattr

import numpy as np

from . import geometry, objective, soft
from .eikonal import DistanceField
from .objective import Scenario
from .optimize import OptimizationReport

VIEWBOX = (-0.2, 0.8, -1.1, 0.2)  # xmin, xmax, ymin, ymax in world units
SVG_SCALE = 500.0  # pixels per unit


def fmt(x) -> str:
    return "%.12g" % float(x)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, (str, int, np.integer)) else fmt(v) for v in row])


def arclengths(scenario: Scenario) -> np.ndarray:
    """Arclength of every configuration sample, tip included."""
    if scenario.model == "soft":
        return scenario.arm.nodes
    arm = scenario.arm
    m = scenario.samples_per_link
    s_joint = arm.joint_arclengths()
    lam = np.arange(m) / m
    body = (s_joint[:-1, None] + lam[None, :] * arm.lengths[:, None]).ravel()
    return np.concatenate([body, [1.0]])


def write_run(out_dir, scenario: Scenario, report: OptimizationReport) -> list:
    """Write controls, configuration, curvature (soft only) and trace CSVs.
    Returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    u = report.u_star
    written = []

    p = os.path.join(out_dir, "controls.csv")
    write_csv(p, ["index", "u"], ((i, v) for i, v in enumerate(u)))
    written.append(p)

    pts = objective.configuration(scenario, u)
    s = arclengths(scenario)
    p = os.path.join(out_dir, "configuration.csv")
    write_csv(p, ["s", "x", "y"], zip(s, pts[:, 0], pts[:, 1]))
    written.append(p)

    if scenario.model == "soft":
        curve = soft.forward_curve(scenario.arm, u)
        kappa, upper, lower = soft.curvature_profile(curve, scenario.arm)
        p = os.path.join(out_dir, "curvature.csv")
        write_csv(p, ["s", "kappa", "omega_bar_plus", "omega_bar_minus"],
                  zip(curve.s, kappa, upper, lower))
        written.append(p)

    p = os.path.join(out_dir, "trace.csv")
    write_csv(p, ["round", "tau", "inner_iterations", "cost", "max_penetration", "converged"],
              ((r.round, r.tau, r.inner_iterations, r.cost, r.max_penetration, int(r.converged))
               for r in report.rounds))
    written.append(p)
    return written


def write_field(path, field: DistanceField) -> None:
    """Distance field as (x, y, d) rows over all grid nodes; d = 0 outside."""
    nodes = field.grid.nodes().reshape(-1, 2)
    vals = np.where(field.inside_mask & np.isfinite(field.values), field.values, 0.0).ravel()
    write_csv(path, ["x", "y", "d"], zip(nodes[:, 0], nodes[:, 1], vals))


# ---------------------------------------------------------------- SVG

def _px(x, y):
    xmin, _, _, ymax = VIEWBOX
    return (x - xmin) * SVG_SCALE, (ymax - y) * SVG_SCALE


def _num(v) -> str:
    return "%.6g" % v


def _outline(ob) -> list:
    """SVG elements tracing the boundary of an analytic obstacle."""
    style = 'fill="#d9d9d9" stroke="#555555" stroke-width="1"'
    if isinstance(ob, geometry.Sampled):
        if ob.source is None:
            return []
        return _outline(ob.source)
    if isinstance(ob, geometry.Circle):
        return [_ellipse_path(ob.center, ob.radius, ob.radius, 0.0, style)]
    if isinstance(ob, geometry.Ellipse):
        return [_ellipse_path(ob.center, ob.a, ob.b, ob.rotation, style)]
    if isinstance(ob, geometry.Square):
        cx, cy = _px(*ob.center)
        side = ob.side * SVG_SCALE
        # y is flipped on screen, so a CCW world angle is a CW screen angle
        deg = -math.degrees(ob.rotation)
        return [f'<rect x="{_num(cx - side / 2)}" y="{_num(cy - side / 2)}" width="{_num(side)}" '
                f'height="{_num(side)}" transform="rotate({_num(deg)} {_num(cx)} {_num(cy)})" {style}/>']
    raise TypeError(f"unsupported obstacle type {type(ob).__name__}")


def _ellipse_path(center, a, b, rotation, style) -> str:
    cx, cy = center
    c, s = math.cos(rotation), math.sin(rotation)
    # two half arcs between the ends of the major axis
    p0 = _px(cx + a * c, cy + a * s)
    p1 = _px(cx - a * c, cy - a * s)
    rx, ry = a * SVG_SCALE, b * SVG_SCALE
    deg = -math.degrees(rotation)
    d = (f"M {_num(p0[0])} {_num(p0[1])} "
         f"A {_num(rx)} {_num(ry)} {_num(deg)} 1 0 {_num(p1[0])} {_num(p1[1])} "
         f"A {_num(rx)} {_num(ry)} {_num(deg)} 1 0 {_num(p0[0])} {_num(p0[1])} Z")
    return f'<path d="{d}" {style}/>'


def render_svg(points, obstacle=geometry.EMPTY, target=None, title: str = "") -> str:
    """SVG 1.1 document with the arm polyline, obstacle outlines, target cross
    and anchor, on a fixed window covering [-0.2, 0.8] x [-1.1, 0.2]."""
    xmin, xmax, ymin, ymax = VIEWBOX
    w, h = (xmax - xmin) * SVG_SCALE, (ymax - ymin) * SVG_SCALE
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(w)}" height="{_num(h)}" '
           f'viewBox="0 0 {_num(w)} {_num(h)}">']
    if title:
        out.append(f"<title>{title.replace('&', '&amp;').replace('<', '&lt;')}</title>")
    out.append(f'<rect x="0" y="0" width="{_num(w)}" height="{_num(h)}" fill="white"/>')
    for ob in geometry.members(obstacle):
        out.extend(_outline(ob))
    pts = np.asarray(points, dtype=float)
    coords = " ".join(f"{_num(x)},{_num(y)}" for x, y in (_px(*p) for p in pts))
    out.append(f'<polyline points={quoteattr(coords)} fill="none" stroke="#1f4e99" stroke-width="3"/>')
    if target is not None:
        tx, ty = _px(*target)
        r = 8
        out.append(f'<path d="M {_num(tx - r)} {_num(ty - r)} L {_num(tx + r)} {_num(ty + r)} '
                   f'M {_num(tx - r)} {_num(ty + r)} L {_num(tx + r)} {_num(ty - r)}" '
                   'stroke="#c0392b" stroke-width="2" class="target"/>')
    ax, ay = _px(0.0, 0.0)
    out.append(f'<circle cx="{_num(ax)}" cy="{_num(ay)}" r="5" fill="black" class="anchor"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(path, scenario: Scenario, u) -> None:
    pts = objective.configuration(scenario, u)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_svg(pts, scenario.obstacle, scenario.target, scenario.name))
