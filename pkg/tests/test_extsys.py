import itertools

import pytest

from latcode.codemodel import PointMultiset
from latcode.errors import (BlocksOverlap, BlocksRequired,
                            InconsistentBounds, SpectrumEmpty)
from latcode.extsys import (WeightSpectrum, apply_gap_reformulation,
                            build_extension_system, linearize_min_extension,
                            preprocess_line_feasibility)
from latcode.geometry import num_points


def test_spectrum_from_weights_single_block():
    sp = WeightSpectrum.from_weights([48, 56])
    assert sp.blocks == ((8, 6, 7),)
    assert sp.weights() == (48, 56)
    assert sp.delta == 8


def test_spectrum_from_weights_gapped():
    sp = WeightSpectrum.from_weights([76, 80, 92, 96, 100])
    assert sp.blocks == ((4, 19, 20), (4, 23, 25))
    assert sp.weights() == (76, 80, 92, 96, 100)


def test_spectrum_rejects_empty_and_overlap():
    with pytest.raises(SpectrumEmpty):
        WeightSpectrum.from_weights([])
    with pytest.raises(BlocksOverlap):
        WeightSpectrum(blocks=((4, 5, 7), (4, 6, 9)))
    with pytest.raises(BlocksOverlap):
        WeightSpectrum(blocks=((4, 5, 4),))


def test_spectrum_hull():
    sp = WeightSpectrum.from_weights([76, 80, 92, 96, 100])
    assert sp.hull().blocks == ((4, 19, 25),)


def test_build_toy_system_shape():
    M = PointMultiset(k=1, q=2, mult=(1,))
    sp = WeightSpectrum.from_weights([1, 2])
    sys = build_extension_system(M, r=1, spectrum=sp, max_mult=2)
    geom = sys.geometry
    assert geom.n_points == 3
    assert len(sys.fibres) == 1
    assert sys.lo[sys.fixed_index] == sys.hi[sys.fixed_index] == 1
    assert sys.allowed_hyperplane_sums() == (0, 1)


def test_build_sizes_for_paper_instances():
    # [34,3]_8 extension lives on PG(3,8); [74,3]_4 extension on PG(3,4)
    assert num_points(4, 8) == 585
    assert num_points(4, 4) == 85


def test_build_rejects_bad_bounds():
    M = PointMultiset(k=1, q=2, mult=(1,))
    sp = WeightSpectrum.from_weights([1, 2])
    with pytest.raises(InconsistentBounds):
        build_extension_system(M, r=0, spectrum=sp)
    with pytest.raises(InconsistentBounds):
        build_extension_system(M, r=3, spectrum=sp, max_mult=2)


def test_min_extension_vacuous_for_r1():
    M = PointMultiset(k=1, q=2, mult=(1,))
    sp = WeightSpectrum.from_weights([1, 2])
    sys = build_extension_system(M, r=1, spectrum=sp, max_mult=2)
    assert linearize_min_extension(sys, 1) is sys


def test_min_extension_restricts_domains():
    M = PointMultiset(k=1, q=3, mult=(4,))
    sp = WeightSpectrum.from_weights([2, 3, 4, 5, 6])
    sys = build_extension_system(M, r=2, spectrum=sp, max_mult=4,
                                 systematic=False)
    sys2 = linearize_min_extension(sys, 2)
    free = next(p for p in range(sys2.geometry.n_points)
                if p != sys2.fixed_index)
    assert sys2.domain(free) == (0, 2, 3, 4)
    assert sys.domain(free) == (0, 1, 2, 3, 4)


def test_gap_reformulation_requires_blocks():
    M = PointMultiset(k=1, q=2, mult=(1,))
    single = WeightSpectrum.from_weights([1, 2])
    sys = build_extension_system(M, r=1, spectrum=single, max_mult=2)
    with pytest.raises(BlocksRequired):
        apply_gap_reformulation(sys)


def test_gap_reformulation_flags_system():
    M = PointMultiset(k=1, q=2, mult=(4,))
    sp = WeightSpectrum.from_weights([1, 2, 4, 5])
    sys = build_extension_system(M, r=1, spectrum=sp, max_mult=4)
    sys2 = apply_gap_reformulation(sys)
    assert sys2.gap_mode
    # admissible hyperplane sums have the gap cut out exactly
    assert sys2.allowed_hyperplane_sums() == (0, 1, 3, 4)


def brute_line(q, r, cap, c):
    vals = [0] + list(range(r, cap + 1))
    return not any(sum(t) == c
                   for t in itertools.product(vals, repeat=q))


def test_line_feasibility_paper_instance():
    assert preprocess_line_feasibility(2, 3, 4, 5) is True


def test_line_feasibility_r1_never_triggers_within_reach():
    for cap in range(1, 6):
        for c in range(0, 2 * cap + 1):
            assert preprocess_line_feasibility(2, 1, cap, c) == \
                brute_line(2, 1, cap, c)


def test_line_feasibility_parity_instance():
    assert preprocess_line_feasibility(3, 2, 2, 3) is True
    assert brute_line(3, 2, 2, 3) is True


def test_line_feasibility_matches_brute_force_box():
    for q in range(1, 5):
        for cap in range(1, 6):
            for r in range(1, cap + 1):
                for c in range(0, 13):
                    assert preprocess_line_feasibility(q, r, cap, c) == \
                        brute_line(q, r, cap, c), (q, r, cap, c)
