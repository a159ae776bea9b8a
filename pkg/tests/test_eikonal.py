import math

import numpy as np
import pytest

from reachplan import eikonal as E
from reachplan import geometry as G
from reachplan.errors import GridTooCoarse

from conftest import OBSTACLES

UNIT = G.Circle((0.0, 0.0), 1.0)


def circle_error(h):
    field = E.distance_field(UNIT, h)
    nodes = field.grid.nodes()
    exact = np.maximum(1.0 - np.hypot(nodes[..., 0], nodes[..., 1]), 0.0)
    m = field.inside_mask
    return float(np.max(np.abs(field.values[m] - exact[m])))


def test_unit_circle_error_and_rate():
    e1, e2 = circle_error(0.05), circle_error(0.025)
    assert e1 <= 2 * 0.05
    assert e2 <= 2 * 0.025
    assert e2 / e1 <= 0.7


def test_frozen_layer_seeded_with_exact_depth():
    grid = E.Grid2D.covering(G.bounding_box(UNIT), 0.1)
    r = E.rasterize(UNIT, grid)
    nodes = grid.nodes()
    exact = 1.0 - np.hypot(nodes[..., 0], nodes[..., 1])
    assert r.frozen.any()
    assert np.allclose(r.frozen_values[r.frozen], exact[r.frozen])
    assert not np.any(r.frozen & ~r.inside)


def test_inside_mask_matches_penetration():
    field = E.distance_field(OBSTACLES[5], 0.01)
    nodes = field.grid.nodes().reshape(-1, 2)
    assert np.array_equal(field.inside_mask.ravel(), G.penetration(nodes, OBSTACLES[5]) > 0)


def test_values_nonnegative_and_zero_outside():
    field = E.distance_field(OBSTACLES[6], 0.01)
    assert np.all(field.values >= 0)
    assert np.all(field.values[~field.inside_mask] == 0)
    assert np.all(np.isfinite(field.values))


def test_causality_of_acceptance_order():
    field = E.distance_field(OBSTACLES[4], 0.01)
    accepted = field.values.ravel()[field.order]
    assert np.all(np.diff(accepted) >= 0)
    # every inside node finalised exactly once
    assert len(field.order) == len(set(field.order.tolist())) == int(field.inside_mask.sum())


@pytest.mark.parametrize("test", [2, 4, 5])
def test_sampled_field_tracks_analytic_depth(test, rng):
    ob = OBSTACLES[test]
    h = 0.005
    field = E.distance_field(ob, h)
    box = G.bounding_box(ob)
    q = rng.uniform(box[:2], box[2:], size=(5000, 2))
    q = q[G.penetration(q, ob) > 0][:1000]
    assert np.max(np.abs(E.sample(field, q) - G.penetration(q, ob))) <= 3 * h


def test_sampled_obstacle_in_distance_kernel():
    ob = OBSTACLES[2]
    s = G.Sampled(E.distance_field(ob, 0.005), source=ob)
    q = np.array([[0.1, -0.35], [0.13, -0.33], [0.5, 0.0]])
    d, g = G.distance_and_grad(q, s)
    assert np.allclose(d, G.penetration(q, ob), atol=0.015)
    assert d[2] == 0 and np.all(g[2] == 0)


def test_empty_union_gives_empty_field():
    grid = E.Grid2D((0.0, 0.0), 0.1, 5, 5)
    r = E.rasterize(G.EMPTY, grid)
    assert not r.inside.any()
    field = E.fast_march(r)
    assert np.all(field.values == 0)


def test_grid_too_coarse():
    tiny = G.Circle((0.05, 0.05), 0.001)
    with pytest.raises(GridTooCoarse):
        E.rasterize(tiny, E.Grid2D((0.0, 0.0), 0.1, 3, 3))


def test_grid_covering_margin():
    g = E.Grid2D.covering((0.0, 0.0, 1.0, 0.5), 0.1)
    assert g.origin == pytest.approx((-0.2, -0.2))
    assert (g.nx, g.ny) == (15, 10)


def test_upwind_update_two_sided():
    # symmetric neighbours a = b = 0 give h / sqrt(2)
    vals = np.zeros((3, 3))
    acc = np.zeros((3, 3), bool)
    acc[0, 1] = acc[1, 0] = True
    assert E._upwind(vals, acc, 1, 1, 1.0) == pytest.approx(math.sqrt(0.5))
