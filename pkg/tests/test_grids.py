import math

import numpy as np
import pytest

from corank.exceptions import ConfigurationError, InvalidInputError
from corank.grids import (
    Grid,
    grid_for_size,
    halton,
    make_grid,
    make_symmetric_grid,
    score_sum,
    sphere_from_unit_cube,
)
from corank.scores import SIGN, WILCOXON
from corank.statdist import RngState


def test_halton_examples():
    np.testing.assert_array_equal(halton(3, 1)[:, 0], [0.5, 0.25, 0.75])
    np.testing.assert_allclose(halton(2, 2), [[1 / 2, 1 / 3], [1 / 4, 2 / 3]], rtol=0, atol=1e-15)
    np.testing.assert_allclose(halton(1, 3), [[1 / 2, 1 / 3, 1 / 5]], rtol=0, atol=1e-15)


def test_halton_radical_inverse_base_5():
    # 7 = 12 in base 5 -> 0.21 in base 5 = 2/5 + 1/25
    assert halton(7, 3)[6, 2] == pytest.approx(2 / 5 + 1 / 25, abs=1e-15)


def test_halton_limits():
    assert halton(4, 50).shape == (4, 50)
    with pytest.raises(ConfigurationError):
        halton(4, 51)
    with pytest.raises(InvalidInputError):
        halton(0, 2)


def test_sphere_map_examples():
    np.testing.assert_allclose(sphere_from_unit_cube([0.0]), [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(sphere_from_unit_cube([0.25]), [0.0, 1.0], atol=1e-15)
    v = sphere_from_unit_cube([0.5, 0.5])
    assert v.shape == (3,)
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


def test_sphere_map_rejects_outside_cube():
    with pytest.raises(InvalidInputError):
        sphere_from_unit_cube([1.0])


@pytest.mark.parametrize("d", [2, 3, 4])
def test_sphere_map_uniformity(d):
    v = sphere_from_unit_cube(halton(10_000, d - 1))
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-12)
    assert np.linalg.norm(v.mean(axis=0)) < 0.05
    np.testing.assert_allclose(v.T @ v / len(v), np.eye(d) / d, atol=0.05)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_half_sphere_map(d):
    v = sphere_from_unit_cube(halton(2000, d - 1), half=True)
    assert np.all(v[:, -1] >= 0)
    both = np.vstack([v, -v])
    np.testing.assert_allclose(both.T @ both / len(both), np.eye(d) / d, atol=0.05)


def test_h_grid_collinear_example():
    g = make_grid("H", 2, 6, 1)
    assert g.n == 6
    np.testing.assert_allclose(np.linalg.norm(g.points, axis=1), np.arange(1, 7) / 7, atol=1e-15)
    assert np.linalg.matrix_rank(g.points) == 1


def test_regular2d_example():
    g = make_grid("REGULAR2D", 2, 1, 4)
    expected = {(0.5, 0.0), (0.0, 0.5), (-0.5, 0.0), (0.0, -0.5)}
    got = {tuple(np.round(p, 12) + 0.0) for p in g.points}
    assert got == expected


@pytest.mark.parametrize("kind", ["R1", "R2", "H"])
def test_single_origin(kind):
    g = make_grid(kind, 3, 2, 5, n_0=1, rng=np.random.default_rng(0))
    assert np.sum(~g.points.any(axis=1)) == 1
    assert g.n == 11


@pytest.mark.parametrize("kind", ["R1", "R2", "H", "REGULAR2D"])
def test_factorized_norms(kind):
    n_R = 5
    g = make_grid(kind, 2, n_R, 7, n_0=2, rng=np.random.default_rng(1))
    norms = np.linalg.norm(g.points, axis=1)
    assert np.all(norms <= 1.0)
    nz = norms[norms > 0]
    levels = np.arange(1, n_R + 1) / (n_R + 1)
    assert np.all(np.min(np.abs(nz[:, None] - levels[None, :]), axis=1) < 1e-14)
    assert g.n == 2 + n_R * 7


def test_r1_shares_and_r2_redraws_directions():
    r1 = make_grid("R1", 3, 3, 4, rng=np.random.default_rng(2))
    d1 = r1.directions.reshape(3, 4, 3)
    assert np.allclose(d1[0], d1[1]) and np.allclose(d1[1], d1[2])
    r2 = make_grid("R2", 3, 3, 4, rng=np.random.default_rng(2))
    d2 = r2.directions.reshape(3, 4, 3)
    assert not np.allclose(d2[0], d2[1])


def test_invalid_kind_dimension():
    with pytest.raises(ConfigurationError):
        make_grid("REGULAR2D", 3, 2, 4)
    with pytest.raises(ConfigurationError):
        make_grid("nope", 2, 2, 4)
    with pytest.raises(ConfigurationError):
        make_grid("R2*", 2, 2, 4)
    with pytest.raises(ConfigurationError):
        make_symmetric_grid("H", 2, 2, 4)


def _multiset(P):
    return sorted(map(tuple, np.round(P, 15) + 0.0))


@pytest.mark.parametrize("kind", ["R2*", "H*"])
@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_symmetric_grids_are_closed_under_negation(kind, d):
    g = make_symmetric_grid(kind, d, 3, 5, rng=np.random.default_rng(3))
    assert g.symmetric and g.n == 30
    np.testing.assert_array_equal(g.points[g.antipode], -g.points)
    assert _multiset(g.points) == _multiset(-g.points)
    half = g.n // 2
    assert np.all((g.points[:half] + g.points[half:]).sum(axis=0) == 0)
    np.testing.assert_allclose(g.points.sum(axis=0), 0.0, atol=1e-13)


def test_r2_star_from_five_points():
    g = make_symmetric_grid("R2*", 2, 1, 5, rng=np.random.default_rng(4))
    assert g.n == 10
    np.testing.assert_array_equal(g.points[:5] + g.points[5:], 0.0)


def test_h_star_minimal():
    g = make_symmetric_grid("H*", 2, 1, 1)
    assert g.n == 2
    s = g.points[0]
    assert s[1] >= 0 and np.linalg.norm(s) == pytest.approx(0.5)
    np.testing.assert_array_equal(g.points[1], -s)


@pytest.mark.parametrize("kind", ["H", "H*"])
def test_halton_grids_are_deterministic(kind):
    if kind == "H":
        a, b = make_grid(kind, 3, 4, 9), make_grid(kind, 3, 4, 9)
    else:
        a, b = make_symmetric_grid(kind, 3, 4, 9), make_symmetric_grid(kind, 3, 4, 9)
    assert a.points.tobytes() == b.points.tobytes()


def test_random_grids_replay_from_rng_state():
    a = make_grid("R2", 4, 3, 6, rng=RngState(9, 2).generator())
    b = make_grid("R2", 4, 3, 6, rng=RngState(9, 2).generator())
    c = make_grid("R2", 4, 3, 6, rng=RngState(9, 3).generator())
    assert a.points.tobytes() == b.points.tobytes()
    assert a.points.tobytes() != c.points.tobytes()


def test_grid_for_size_absorbs_remainder():
    g = grid_for_size("H", 20, 2, 6)
    assert g.n == 20 and g.n_0 == 2 and g.n_S == 3
    assert "n_0 raised by 2" in g.note
    s = grid_for_size("H*", 26, 2, 6)
    assert s.n == 26 and s.n_0 == 2 and s.symmetric
    np.testing.assert_array_equal(s.points[s.antipode], -s.points)
    exact = grid_for_size("R2", 24, 2, 6, rng=np.random.default_rng(0))
    assert exact.n_0 == 0 and exact.note == ""


def test_grid_for_size_too_small():
    with pytest.raises(ConfigurationError):
        grid_for_size("H", 3, 2, 6)


@pytest.mark.parametrize("n_R", [6, 15])
def test_mean_norm_approaches_one_half(n_R):
    g = make_grid("H", 3, n_R, 40)
    assert abs(np.linalg.norm(g.points, axis=1).mean() - 0.5) <= 1.0 / (n_R + 1)


def test_score_sum_examples():
    one = Grid.from_points([[0.5, 0.0]], n_R=1)
    np.testing.assert_allclose(score_sum(one, WILCOXON), [0.5, 0.0])
    two = Grid.from_points([[0.5, 0.0], [0.0, 0.5]], n_R=1)
    np.testing.assert_allclose(score_sum(two, SIGN), [1.0, 1.0])
    for kind in ("R2*", "H*"):
        g = make_symmetric_grid(kind, 3, 4, 7, rng=np.random.default_rng(5), n_0=2)
        for J in (SIGN, WILCOXON, lambda u: np.exp(u)):
            assert np.all(score_sum(g, J) == 0)


def test_score_sum_origin_contributes_nothing():
    g = Grid.from_points([[0.0, 0.0], [0.5, 0.0]], n_R=1)
    np.testing.assert_allclose(score_sum(g, SIGN), [1.0, 0.0])


def test_from_points_checks():
    with pytest.raises(InvalidInputError):
        Grid.from_points([[2.0, 0.0]], n_R=1)
    with pytest.raises(InvalidInputError):
        Grid.from_points([[0.5, 0.0], [0.1, 0.1]], n_R=1, symmetric=True)
    g = Grid.from_points([[0.5, 0.0], [-0.5, 0.0], [0.0, 0.0], [0.0, 0.0]], n_R=1)
    assert g.symmetric and g.n_0 == 2
    np.testing.assert_array_equal(g.points[g.antipode], -g.points)
    assert g.antipode[2] == 3 and g.antipode[3] == 2
    assert math.isclose(g.ranks[0], 1.0)
