import random

import pytest

from latcode.errors import NotPrimePower, TooLarge
from latcode.geometry import geometry_make, incident, num_points, \
    project_multiset


def test_fano_counts():
    g = geometry_make(3, 2)
    assert g.n_points == 7
    assert len(g.hyperplanes) == 7
    for h in range(7):
        assert len(g.hyperplane_points[h]) == 3


def test_pg_2_4_counts():
    g = geometry_make(3, 4)
    assert g.n_points == 21
    for h in range(21):
        assert len(g.hyperplane_points[h]) == 5


def test_pg_6_2_counts():
    g = geometry_make(7, 2)
    assert g.n_points == 127
    assert len(g.hyperplanes) == 127


def test_not_prime_power_propagates():
    with pytest.raises(NotPrimePower):
        geometry_make(3, 6)


def test_too_large_guard():
    with pytest.raises(TooLarge):
        geometry_make(21, 2)


def test_incidence_examples():
    g = geometry_make(3, 2)
    p = g.point_index[(1, 0, 0)]
    h_yes = g.point_index[(0, 0, 1)]
    h_no = g.point_index[(1, 0, 0)]
    assert incident(g, p, h_yes)
    assert not incident(g, p, h_no)


@pytest.mark.parametrize("k,q", [(2, 2), (2, 3), (3, 2), (3, 3), (3, 4),
                                 (4, 2), (4, 3), (3, 5), (4, 5)])
def test_hyperplane_point_counts(k, q):
    g = geometry_make(k, q)
    per_h = num_points(k - 1, q)
    for h in range(g.n_points):
        assert len(g.hyperplane_points[h]) == per_h
    for p in range(g.n_points):
        assert len(g.point_hyperplanes[p]) == per_h


@pytest.mark.parametrize("k,q", [(3, 2), (3, 3), (4, 2), (3, 4), (4, 5)])
def test_double_counting(k, q):
    g = geometry_make(k, q)
    total = sum(len(g.hyperplane_points[h]) for h in range(g.n_points))
    assert total == g.n_points * num_points(k - 1, q)


@pytest.mark.parametrize("k,q", [(2, 2), (2, 5), (3, 3), (4, 2)])
def test_lines_by_point_shape(k, q):
    g = geometry_make(k, q)
    cells_expected = num_points(k - 1, q)
    for p in range(g.n_points):
        cells = g.lines_by_point[p]
        assert len(cells) == cells_expected
        for cell in cells:
            assert len(cell) == q
        covered = sorted(i for cell in cells for i in cell)
        assert covered == [i for i in range(g.n_points) if i != p]


def test_two_points_on_unique_line():
    g = geometry_make(3, 3)
    for p in range(g.n_points):
        cells = g.lines_by_point[p]
        for other in range(g.n_points):
            if other == p:
                continue
            assert sum(1 for cell in cells if other in cell) == 1


def test_projection_of_single_point_support():
    g = geometry_make(3, 2)
    mult = [0] * 7
    p = 3
    mult[p] = 5
    out = project_multiset(g, mult, p)
    assert sum(out) == 0


def test_projection_all_ones_fano():
    g = geometry_make(3, 2)
    out = project_multiset(g, [1] * 7, 0)
    assert sorted(out) == [2, 2, 2]


@pytest.mark.parametrize("k,q", [(3, 2), (3, 3), (4, 2), (3, 4)])
def test_projection_cardinality(k, q):
    rng = random.Random(99)
    g = geometry_make(k, q)
    for _ in range(10):
        mult = [rng.randrange(4) for _ in range(g.n_points)]
        p = rng.randrange(g.n_points)
        out = project_multiset(g, mult, p)
        assert sum(out) == sum(mult) - mult[p]


def test_projection_respects_lines():
    # image multiplicity of each point equals the line sum through P
    g = geometry_make(3, 3)
    rng = random.Random(5)
    mult = [rng.randrange(3) for _ in range(g.n_points)]
    p = 4
    out = project_multiset(g, mult, p)
    line_sums = sorted(sum(mult[i] for i in cell)
                       for cell in g.lines_by_point[p])
    assert sorted(out) == line_sums
