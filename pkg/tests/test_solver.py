import itertools
import random

import pytest

from latcode.codemodel import PointMultiset, weight_distribution
from latcode.extsys import (WeightSpectrum, build_extension_system,
                            linearize_min_extension)
from latcode.solver import (COMPLETED, FEASIBLE, INFEASIBLE, NODE_LIMIT,
                            LatticeProblem, Limits, check_feasible,
                            compile_system, enumerate_solutions, export_lp,
                            parse_verdict)


def brute_force_system(system):
    """Box enumeration of an ExtensionSystem, including all hyperplanes."""
    geom = system.geometry
    allowed = set(system.allowed_hyperplane_sums())
    domains = [system.domain(p) for p in range(geom.n_points)]
    sols = []
    for x in itertools.product(*domains):
        ok = all(sum(x[p] for p in members) == target
                 for _, target, members in system.fibres)
        if not ok:
            continue
        if all(sum(x[p] for p in geom.hyperplane_points[h]) in allowed
               for h in range(geom.n_points)):
            sols.append(tuple(x))
    return sorted(sols)


def enumerate_set(system):
    sols = []
    stats = enumerate_solutions(system, collect=sols)
    assert stats.status == COMPLETED
    return sorted(s.x for s in sols), stats


def test_toy_1_1_2_extension():
    M = PointMultiset(k=1, q=2, mult=(1,))
    sp = WeightSpectrum.from_weights([1, 2])
    system = build_extension_system(M, r=1, spectrum=sp, max_mult=2)
    got, stats = enumerate_set(system)
    assert got == brute_force_system(system)
    assert stats.solutions == len(got) == 1
    # the solution decodes to the full [2,2]_2 code
    sol = PointMultiset(k=2, q=2, mult=got[0])
    assert weight_distribution(sol).as_dict() == {1: 2, 2: 1}


@pytest.mark.parametrize("q,n,r,weights,cap", [
    (2, 3, 1, [1, 2, 3, 4], 3),
    (2, 3, 2, [2, 4], 3),
    (3, 4, 1, [2, 3, 4], 2),
    (3, 2, 2, [2, 4], 2),
    (4, 3, 1, [1, 2, 3, 4], 2),
])
def test_dim1_extensions_match_brute_force(q, n, r, weights, cap):
    M = PointMultiset(k=1, q=q, mult=(n,))
    sp = WeightSpectrum.from_weights(weights)
    system = build_extension_system(M, r=r, spectrum=sp, max_mult=cap,
                                    systematic=False)
    got, _ = enumerate_set(system)
    assert got == brute_force_system(system)


@pytest.mark.parametrize("mult,r,weights,cap", [
    ((2, 1, 1), 1, [1, 2, 3, 4], 2),
    ((1, 1, 1), 1, [2, 3], 1),
    ((2, 2, 2), 2, [2, 4, 6], 2),
])
def test_dim2_extensions_match_brute_force(mult, r, weights, cap):
    M = PointMultiset(k=2, q=2, mult=mult)
    sp = WeightSpectrum.from_weights(weights)
    system = build_extension_system(M, r=r, spectrum=sp, max_mult=cap,
                                    systematic=False)
    got, _ = enumerate_set(system)
    assert got == brute_force_system(system)


def test_min_extension_agrees_with_brute_force():
    M = PointMultiset(k=2, q=2, mult=(2, 2, 2))
    sp = WeightSpectrum.from_weights([2, 4, 6])
    system = build_extension_system(M, r=2, spectrum=sp, max_mult=3,
                                    systematic=False)
    system = linearize_min_extension(system, 2)
    got, _ = enumerate_set(system)
    assert got == brute_force_system(system)
    for x in got:
        assert all(v == 0 or v >= 2 for v in x)


def test_systematic_lower_bounds_enforced():
    M = PointMultiset(k=1, q=2, mult=(2,))
    sp = WeightSpectrum.from_weights([1, 2, 3])
    system = build_extension_system(M, r=1, spectrum=sp, max_mult=2,
                                    systematic=True)
    got, _ = enumerate_set(system)
    assert got == brute_force_system(system)
    units = system.geometry.unit_point_indices()
    for x in got:
        assert all(x[u] >= 1 for u in units)


def random_problem(rng):
    """Random bounded system: plain box variables and set-valued rows."""
    while True:
        nvars = rng.randrange(3, 13)
        domains = []
        for _ in range(nvars):
            hi = rng.randrange(1, 5)
            if rng.random() < 0.3 and hi >= 2:
                vals = tuple(v for v in range(hi + 1) if v == 0 or v >= 2)
            else:
                vals = tuple(range(hi + 1))
            domains.append(vals)
        box = 1
        for dom in domains:
            box *= len(dom)
        if box <= 1 << 18:  # keep the brute-force oracle affordable
            break
    rows = []
    for _ in range(rng.randrange(1, 6)):
        size = rng.randrange(1, nvars + 1)
        members = tuple(sorted(rng.sample(range(nvars), size)))
        coeffs = tuple(rng.choice([1, 1, 1, 2]) for _ in members)
        smax = sum(c * domains[v][-1] for v, c in zip(members, coeffs))
        if rng.random() < 0.25:
            allowed = frozenset((rng.randrange(smax + 1),))
        else:
            allowed = frozenset(v for v in range(smax + 1)
                                if rng.random() < 0.5)
        rows.append((tuple(zip(members, coeffs)), allowed))
    return LatticeProblem(domains=tuple(domains), rows=tuple(rows))


def brute_force_problem(problem):
    sols = []
    for x in itertools.product(*problem.domains):
        ok = True
        for vars_, allowed in problem.rows:
            s = sum(c * x[v] for v, c in vars_)
            if s not in allowed:
                ok = False
                break
        if ok:
            sols.append(tuple(x))
    return sorted(sols)


def test_random_problems_match_box_oracle():
    rng = random.Random(2024)
    checked = 0
    for _ in range(1000):
        problem = random_problem(rng)
        expect = brute_force_problem(problem)
        sols = []
        stats = enumerate_solutions(problem, collect=sols)
        assert stats.status == COMPLETED
        assert sorted(s.x for s in sols) == expect
        verdict = check_feasible(problem)
        assert (verdict.status == INFEASIBLE) == (len(expect) == 0)
        if verdict.status == FEASIBLE:
            assert verdict.witness.x in expect
        checked += 1
    assert checked == 1000


def test_enumeration_is_deterministic():
    M = PointMultiset(k=2, q=3, mult=(3, 2, 2, 1))
    sp = WeightSpectrum.from_weights([2, 4, 6])
    system = build_extension_system(M, r=2, spectrum=sp, max_mult=3,
                                    systematic=False)
    a, _ = enumerate_set(system)
    b, _ = enumerate_set(system)
    assert a == b
    seq1, seq2 = [], []
    enumerate_solutions(system, collect=seq1)
    enumerate_solutions(system, collect=seq2)
    assert [s.x for s in seq1] == [s.x for s in seq2]


def test_infeasible_single_variable_contradiction():
    # x0 = 5 with bound x0 <= 4
    problem = LatticeProblem(domains=((0, 1, 2, 3, 4),),
                             rows=((((0, 1),), frozenset((5,))),))
    verdict = check_feasible(problem)
    assert verdict.status == INFEASIBLE
    assert verdict.stats.nodes <= 5
    stats = enumerate_solutions(problem, collect=[])
    assert stats.status == COMPLETED and stats.solutions == 0


def test_node_limit_reported():
    M = PointMultiset(k=2, q=3, mult=(4, 4, 4, 4))
    sp = WeightSpectrum.from_weights(list(range(1, 17)))
    system = build_extension_system(M, r=1, spectrum=sp, max_mult=4,
                                    systematic=False)
    stats = enumerate_solutions(system, collect=[],
                                limits=Limits(max_nodes=10))
    assert stats.status == NODE_LIMIT
    assert stats.nodes >= 10


def test_solution_visitors_see_valid_assignments():
    M = PointMultiset(k=2, q=2, mult=(2, 1, 1))
    sp = WeightSpectrum.from_weights([1, 2, 3, 4])
    system = build_extension_system(M, r=1, spectrum=sp, max_mult=2,
                                    systematic=False)
    allowed = set(system.allowed_hyperplane_sums())
    geom = system.geometry

    def visitor(sol):
        for _, target, members in system.fibres:
            assert sum(sol.x[p] for p in members) == target
        for h in range(geom.n_points):
            assert sum(sol.x[p]
                       for p in geom.hyperplane_points[h]) in allowed

    stats = enumerate_solutions(system, visitor=visitor)
    assert stats.solutions > 0


def test_feasibility_agreement_on_extension_systems():
    rng = random.Random(5)
    for _ in range(40):
        k = rng.choice([1, 2])
        q = rng.choice([2, 3])
        geom_pts = 1 if k == 1 else q + 1
        mult = tuple(rng.randrange(0, 4) for _ in range(geom_pts))
        if k == 1 and mult[0] == 0:
            continue
        if k == 2 and sum(1 for m in mult if m) < 2:
            continue
        M = PointMultiset(k=k, q=q, mult=mult)
        weights = sorted(rng.sample(range(1, 10), rng.randrange(2, 5)))
        sp = WeightSpectrum.from_weights(weights)
        try:
            system = build_extension_system(M, r=rng.choice([1, 2]),
                                            spectrum=sp,
                                            max_mult=rng.choice([2, 3]),
                                            systematic=False)
        except Exception:
            continue
        sols, _ = enumerate_set(system)
        verdict = check_feasible(system)
        assert (verdict.status == INFEASIBLE) == (len(sols) == 0)


def test_export_lp_toy_counts():
    M = PointMultiset(k=1, q=2, mult=(1,))
    sp = WeightSpectrum.from_weights([1, 2])
    system = build_extension_system(M, r=1, spectrum=sp, max_mult=2)
    text = export_lp(system)
    assert text.startswith("\\ latcode extension system\nMinimize")
    assert text.count("fibre") == 1
    assert text.count("hyp") == 3
    assert " y0" in text and "Generals" in text and text.rstrip(
        ).endswith("End")


def test_export_lp_indicators_in_binaries():
    M = PointMultiset(k=1, q=2, mult=(4,))
    sp = WeightSpectrum.from_weights([2, 4])
    system = build_extension_system(M, r=2, spectrum=sp, max_mult=4,
                                    systematic=False)
    system = linearize_min_extension(system, 2)
    text = export_lp(system)
    assert "Binaries" in text
    assert " u1" in text or " u0" in text


def test_parse_verdict():
    assert parse_verdict("INFEASIBLE\n") == (INFEASIBLE, None)
    status, vals = parse_verdict("FEASIBLE 1 0 2\n")
    assert status == FEASIBLE and vals == (1, 0, 2)
    with pytest.raises(ValueError):
        parse_verdict("MAYBE\n")
