"""Obstacle-aware reachability for planar hyper-redundant and soft manipulators.

Modules:
    geometry    analytic penetration depth of circles, squares, ellipses, unions
    eikonal     grid distance fields by fast marching
    discrete    N-link arm equilibrium
    soft        continuum arm equilibrium
    objective   penalised cost and its gradient
    optimize    projected gradient descent with tau continuation
    scenario    scenario files;  output: CSV and SVG;  cli: command line
"""
from .errors import (DimensionMismatch, GridTooCoarse, InvalidAxes, ParseError,
                     ReachplanError, ValidationError)
from .geometry import (EMPTY, Circle, Ellipse, Sampled, Square, Union, clockwise_degrees,
                       ellipse_distance_approx, ellipse_distance_exact, penetration)
from .eikonal import DistanceField, Grid2D, distance_field, fast_march, rasterize
from .discrete import AngleBoundWarning, DiscreteArmParams, forward_joints
from .soft import SoftArmParams, forward_curve
from .objective import CostBreakdown, Scenario, check_gradient, cost, grad_cost, total_cost
from .optimize import GdSettings, OptimizationReport, descend
from .scenario import ScenarioFile, bundled_scenario, load_scenario, write_scenario

__version__ = "0.1.0"
