"""Scenario files: a small sectioned key/value format.

Grammar (version 1)::

    # reach-scenario v1            first non-blank line, mandatory
    [arm]
    model = discrete | soft
    profile = paper-discrete | paper-soft     optional, fills every array
    N = 8                                      links (discrete) or intervals (soft)
    alpha_mode = table | curvature             discrete profile only
    samples_per_link = 13                      discrete only
    lengths = 0.125, 0.125, ...                discrete arrays, one value per joint
    alpha = ...   eps = ...   mu = ...   nu = ...   ell0 = 0.125
    eps = ...   mu = ...   omega = ...         soft arrays, N+1 nodal values
    [task]
    target = (0.368, -0.085)
    delta = 1e-8
    tau = 1e-10
    distance = penetration | boundary
    name = test2
    [optimizer]
    step = 1e-8   tol = 1e-9   tol_mode = relative   tol_tau = 1e-10
    tau0 = 1e-2   max_inner = 2000   max_outer = 64   line_search = backtracking
    [obstacles]
    circle r=0.08 center=(0.1,-0.35)
    square side=0.2 center=(0.2,-0.35) rot=25
    ellipse a=0.18 b=0.08 center=(0.2,-0.35) rot=25
    [output]
    svg = true

``rot`` is clockwise in degrees; ``rot_rad`` gives the internal
counter-clockwise angle in radians instead.  Adding ``grid=H`` to an obstacle
line replaces it by a fast-marched distance field of spacing H.  Text after
``#`` is a comment; one key per line.
"""
from __future__ import annotations

import math
import os
import re
import warnings
from dataclasses import dataclass, fields
from importlib import resources

import numpy as np

from . import discrete, eikonal, geometry, soft
from .errors import ParseError, ValidationError
from .objective import Scenario
from .optimize import GdSettings

HEADER = "# reach-scenario v1"
SECTIONS = ("arm", "task", "optimizer", "obstacles", "output")
DEFAULT_TARGET = (0.368, -0.085)

_ARM_KEYS = {"model", "profile", "N", "alpha_mode", "samples_per_link",
             "lengths", "alpha", "eps", "mu", "nu", "ell0", "omega"}
_TASK_KEYS = {"target", "delta", "tau", "distance", "name"}
_OPT_KEYS = {f.name for f in fields(GdSettings)} - {"verbose"}
_OUTPUT_KEYS = {"svg"}
_OBSTACLE_KEYS = {
    "circle": ({"r", "center"}, {"grid"}),
    "square": ({"side", "center"}, {"rot", "rot_rad", "grid"}),
    "ellipse": ({"a", "b", "center"}, {"rot", "rot_rad", "grid"}),
}


@dataclass(frozen=True, eq=False)
class ScenarioFile:
    """A parsed scenario: the problem, the optimizer settings, output options."""

    scenario: Scenario
    settings: GdSettings
    svg: bool = False

    def __eq__(self, other):
        if not isinstance(other, ScenarioFile):
            return NotImplemented
        return (self.scenario == other.scenario and self.settings == other.settings
                and self.svg == other.svg)

    __hash__ = None


# ---------------------------------------------------------------- parsing

class _Reader:
    def __init__(self, path):
        self.path = path

    def fail(self, msg, line):
        raise ParseError(msg, line, self.path)

    def number(self, text, line, key):
        try:
            v = float(text)
        except ValueError:
            self.fail(f"{key}: expected a number, got {text!r}", line)
        if not math.isfinite(v):
            self.fail(f"{key}: value must be finite", line)
        return v

    def integer(self, text, line, key):
        try:
            return int(text)
        except ValueError:
            self.fail(f"{key}: expected an integer, got {text!r}", line)

    def array(self, text, line, key):
        parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
        if not parts:
            self.fail(f"{key}: empty array", line)
        return np.array([self.number(p, line, key) for p in parts])

    def pair(self, text, line, key):
        m = re.fullmatch(r"\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)", text.strip())
        if not m:
            self.fail(f"{key}: expected (x, y), got {text!r}", line)
        return (self.number(m.group(1), line, key), self.number(m.group(2), line, key))

    def boolean(self, text, line, key):
        t = text.strip().lower()
        if t in ("true", "yes", "1"):
            return True
        if t in ("false", "no", "0"):
            return False
        self.fail(f"{key}: expected true or false, got {text!r}", line)


def _strip_comment(raw: str) -> str:
    return raw.split("#", 1)[0].strip()


def _tokenize(text: str, rd: _Reader):
    """Split into {section: [(line, payload)]}."""
    lines = text.splitlines()
    first = next((i for i, ln in enumerate(lines) if ln.strip()), None)
    if first is None or lines[first].strip() != HEADER:
        rd.fail(f"missing header line {HEADER!r}", (first or 0) + 1)
    out = {name: [] for name in SECTIONS}
    current = None
    for no, raw in enumerate(lines[first + 1:], start=first + 2):
        body = _strip_comment(raw)
        if not body:
            continue
        m = re.fullmatch(r"\[(\w+)\]", body)
        if m:
            current = m.group(1)
            if current not in out:
                rd.fail(f"unknown section [{current}]", no)
            continue
        if current is None:
            rd.fail("content before the first section", no)
        out[current].append((no, body))
    return out


def _key_values(entries, allowed, section, rd: _Reader):
    kv = {}
    for no, body in entries:
        if "=" not in body:
            rd.fail(f"[{section}] expected key = value", no)
        key, value = (p.strip() for p in body.split("=", 1))
        if key not in allowed:
            rd.fail(f"[{section}] unknown key {key!r}", no)
        if key in kv:
            rd.fail(f"[{section}] duplicate key {key!r}", no)
        kv[key] = (no, value)
    return kv


def _arm(kv, rd: _Reader):
    def get(key, conv, default=None):
        if key not in kv:
            return default
        no, value = kv[key]
        return conv(value, no, key)

    def text(v, no, key):
        return v

    if "model" not in kv:
        rd.fail("[arm] missing key 'model'", None)
    model = kv["model"][1]
    if model not in ("discrete", "soft"):
        rd.fail(f"model must be 'discrete' or 'soft', got {model!r}", kv["model"][0])
    profile = get("profile", text)
    extra = {"discrete": {"omega"}, "soft": {"alpha_mode", "samples_per_link", "lengths", "alpha", "nu", "ell0"}}
    for key in extra[model]:
        if key in kv:
            rd.fail(f"key {key!r} does not apply to a {model} arm", kv[key][0])

    try:
        if model == "discrete":
            if profile not in (None, "paper-discrete"):
                rd.fail(f"unknown discrete profile {profile!r}", kv["profile"][0])
            m = get("samples_per_link", rd.integer, 13)
            if profile:
                with warnings.catch_warnings():
                    # the final construction below warns once
                    warnings.simplefilter("ignore", discrete.AngleBoundWarning)
                    base = discrete.table_params(get("N", rd.integer, 8), get("alpha_mode", text, "table"))
                arrays = {n: getattr(base, n) for n in ("lengths", "alpha", "eps", "mu", "nu")}
                ell0 = base.ell0
            else:
                for key in ("lengths", "alpha", "eps", "mu"):
                    if key not in kv:
                        rd.fail(f"[arm] missing key {key!r} (or give a profile)", None)
                arrays = {"nu": None}
                ell0 = None
            for key in ("lengths", "alpha", "eps", "mu", "nu"):
                arrays[key] = get(key, rd.array, arrays.get(key))
            ell0 = get("ell0", rd.number, ell0)
            n = len(arrays["lengths"])
            for key in ("alpha", "eps", "mu", "nu"):
                if arrays[key] is not None and len(arrays[key]) != n:
                    rd.fail(f"{key} needs {n} values, got {len(arrays[key])}", kv[key][0] if key in kv else None)
            if "N" in kv and int(kv["N"][1]) != n:
                rd.fail(f"N = {kv['N'][1]} disagrees with {n} link lengths", kv["N"][0])
            arm = discrete.DiscreteArmParams(arrays["lengths"], arrays["alpha"], arrays["eps"],
                                             arrays["mu"], arrays["nu"], ell0)
            return arm, m
        if profile not in (None, "paper-soft"):
            rd.fail(f"unknown soft profile {profile!r}", kv["profile"][0])
        if profile:
            base = soft.table_params(get("N", rd.integer, 100))
            arrays = {n: base.__getattribute__(n) for n in ("eps", "mu", "omega")}
        else:
            arrays = {}
            for key in ("eps", "mu", "omega"):
                if key not in kv:
                    rd.fail(f"[arm] missing key {key!r} (or give a profile)", None)
        for key in ("eps", "mu", "omega"):
            arrays[key] = get(key, rd.array, arrays.get(key))
        arm = soft.SoftArmParams(arrays["eps"], arrays["mu"], arrays["omega"])
        if "N" in kv and int(kv["N"][1]) != arm.N:
            rd.fail(f"N = {kv['N'][1]} disagrees with {arm.N + 1} nodal values", kv["N"][0])
        return arm, 13
    except ValidationError as exc:
        raise ValidationError(f"{rd.path or '<scenario>'}: [arm] {exc}") from None
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ValidationError(f"{rd.path or '<scenario>'}: [arm] {exc}") from None


def _obstacle(no, body, rd: _Reader):
    parts = body.split(None, 1)
    kind = parts[0].lower()
    if kind not in _OBSTACLE_KEYS:
        rd.fail(f"unknown obstacle type {parts[0]!r}", no)
    required, optional = _OBSTACLE_KEYS[kind]
    rest = parts[1] if len(parts) > 1 else ""
    kv = {}
    for m in re.finditer(r"(\w+)\s*=\s*(\([^)]*\)|[^\s]+)", rest):
        key = m.group(1)
        if key not in required | optional:
            rd.fail(f"{kind}: unknown attribute {key!r}", no)
        if key in kv:
            rd.fail(f"{kind}: duplicate attribute {key!r}", no)
        kv[key] = m.group(2)
    leftover = re.sub(r"(\w+)\s*=\s*(\([^)]*\)|[^\s]+)", "", rest).strip()
    if leftover:
        rd.fail(f"{kind}: cannot parse {leftover!r}", no)
    missing = required - kv.keys()
    if missing:
        rd.fail(f"{kind}: missing attribute(s) {', '.join(sorted(missing))}", no)
    if "rot" in kv and "rot_rad" in kv:
        rd.fail(f"{kind}: give rot or rot_rad, not both", no)
    center = rd.pair(kv["center"], no, "center")
    rotation = 0.0
    if "rot" in kv:
        rotation = geometry.clockwise_degrees(rd.number(kv["rot"], no, "rot"))
    elif "rot_rad" in kv:
        rotation = rd.number(kv["rot_rad"], no, "rot_rad")
    try:
        if kind == "circle":
            ob = geometry.Circle(center, rd.number(kv["r"], no, "r"))
        elif kind == "square":
            ob = geometry.Square(center, rd.number(kv["side"], no, "side"), rotation)
        else:
            ob = geometry.Ellipse(center, rd.number(kv["a"], no, "a"), rd.number(kv["b"], no, "b"), rotation)
        if "grid" in kv:
            h = rd.number(kv["grid"], no, "grid")
            ob = geometry.Sampled(eikonal.distance_field(ob, h), source=ob)
    except ParseError:
        raise
    except ValueError as exc:
        raise ValidationError(f"{rd.path or '<scenario>'}:{no}: {kind}: {exc}") from None
    return ob


def parse_scenario(text: str, path=None) -> ScenarioFile:
    """Parse scenario text; ``path`` is only used in error messages."""
    rd = _Reader(path)
    sec = _tokenize(text, rd)
    arm_kv = _key_values(sec["arm"], _ARM_KEYS, "arm", rd)
    arm, m = _arm(arm_kv, rd)

    task = _key_values(sec["task"], _TASK_KEYS, "task", rd)
    t = {}
    t["target"] = rd.pair(task["target"][1], task["target"][0], "target") if "target" in task else DEFAULT_TARGET
    for key, default in (("delta", 1e-8), ("tau", 1e-10)):
        t[key] = rd.number(task[key][1], task[key][0], key) if key in task else default
    t["distance"] = task["distance"][1] if "distance" in task else "penetration"
    t["name"] = task["name"][1] if "name" in task else ""

    obstacles = [_obstacle(no, body, rd) for no, body in sec["obstacles"]]
    obstacle = obstacles[0] if len(obstacles) == 1 else geometry.Union(tuple(obstacles))

    try:
        scenario = Scenario(arm, obstacle, t["target"], t["delta"], t["tau"], m, t["distance"], t["name"])
    except ValidationError as exc:
        raise ValidationError(f"{path or '<scenario>'}: [task] {exc}") from None

    opt = _key_values(sec["optimizer"], _OPT_KEYS, "optimizer", rd)
    kw = {}
    for key, (no, value) in opt.items():
        if key in ("max_inner", "max_outer"):
            kw[key] = rd.integer(value, no, key)
        elif key in ("tol_mode", "line_search"):
            kw[key] = value
        else:
            kw[key] = rd.number(value, no, key)
    try:
        settings = GdSettings(**kw)
    except ValidationError as exc:
        raise ValidationError(f"{path or '<scenario>'}: [optimizer] {exc}") from None

    out = _key_values(sec["output"], _OUTPUT_KEYS, "output", rd)
    svg = rd.boolean(out["svg"][1], out["svg"][0], "svg") if "svg" in out else False
    return ScenarioFile(scenario, settings, svg)


def load_scenario(path) -> ScenarioFile:
    """Read and parse a scenario file.  Raises OSError when it cannot be read."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_scenario(text, os.fspath(path))


# ---------------------------------------------------------------- writing

def _fmt(x: float) -> str:
    return repr(float(x))


def _fmt_array(a) -> str:
    return ", ".join(_fmt(v) for v in np.asarray(a).ravel())


def _fmt_pair(p) -> str:
    return f"({_fmt(p[0])}, {_fmt(p[1])})"


def _rotation(rot: float) -> str:
    deg = -math.degrees(rot)
    if geometry.clockwise_degrees(deg) == rot:
        return f"rot={_fmt(deg)}"
    return f"rot_rad={_fmt(rot)}"


def _obstacle_line(ob) -> str:
    grid = ""
    if isinstance(ob, geometry.Sampled):
        if ob.source is None:
            raise ValidationError("a grid-sampled obstacle without its source cannot be written")
        grid = f" grid={_fmt(ob.field.grid.spacing)}"
        ob = ob.source
    if isinstance(ob, geometry.Circle):
        line = f"circle r={_fmt(ob.radius)} center={_fmt_pair(ob.center)}"
    elif isinstance(ob, geometry.Square):
        line = f"square side={_fmt(ob.side)} center={_fmt_pair(ob.center)} {_rotation(ob.rotation)}"
    elif isinstance(ob, geometry.Ellipse):
        line = f"ellipse a={_fmt(ob.a)} b={_fmt(ob.b)} center={_fmt_pair(ob.center)} {_rotation(ob.rotation)}"
    else:
        raise ValidationError(f"cannot write obstacle of type {type(ob).__name__}")
    return line + grid


def format_scenario(sf: ScenarioFile) -> str:
    """Scenario text with every array spelled out, so parsing it back is exact."""
    sc, st = sf.scenario, sf.settings
    arm = sc.arm
    lines = [HEADER, "", "[arm]", f"model = {sc.model}"]
    if sc.model == "discrete":
        lines.append(f"samples_per_link = {sc.samples_per_link}")
        for key in ("lengths", "alpha", "eps", "mu", "nu"):
            lines.append(f"{key} = {_fmt_array(getattr(arm, key))}")
        lines.append(f"ell0 = {_fmt(arm.ell0)}")
    else:
        for key in ("eps", "mu", "omega"):
            lines.append(f"{key} = {_fmt_array(getattr(arm, key))}")
    lines += ["", "[task]", f"target = {_fmt_pair(sc.target)}", f"delta = {_fmt(sc.delta)}",
              f"tau = {_fmt(sc.tau)}", f"distance = {sc.distance}"]
    if sc.name:
        lines.append(f"name = {sc.name}")
    lines += ["", "[optimizer]"]
    for f in fields(GdSettings):
        if f.name == "verbose":
            continue
        v = getattr(st, f.name)
        if v is None:
            continue
        lines.append(f"{f.name} = {_fmt(v) if isinstance(v, float) else v}")
    lines += ["", "[obstacles]"]
    lines += [_obstacle_line(ob) for ob in geometry.members(sc.obstacle)]
    lines += ["", "[output]", f"svg = {'true' if sf.svg else 'false'}", ""]
    return "\n".join(lines)


def write_scenario(sf: ScenarioFile, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_scenario(sf))


# ---------------------------------------------------------------- bundled files

def bundled_names() -> list:
    """Names of the bundled scenarios, e.g. ``test5-discrete``."""
    root = resources.files("reachplan") / "scenarios"
    return sorted(p.name[:-len(".scenario")] for p in root.iterdir() if p.name.endswith(".scenario"))


def bundled_path(name: str):
    path = resources.files("reachplan") / "scenarios" / f"{name}.scenario"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled scenario named {name!r}")
    return path


def bundled_scenario(name: str) -> ScenarioFile:
    path = bundled_path(name)
    return parse_scenario(path.read_text(encoding="utf-8"), f"<bundled {name}>")
