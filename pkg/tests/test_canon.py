import random

import numpy as np
import pytest

from latcode.canon import (LINEAR, SEMILINEAR, automorphism_group_order,
                           canonical_form, explicit_point_group,
                           frobenius_point_perm, monomial_aut_order,
                           orbit_canonical_oracle, orbit_size_oracle,
                           pgl_order)
from latcode.codemodel import PointMultiset, weight_distribution
from latcode.errors import GroupTooLarge, NotSpanning
from latcode.geometry import geometry_make


def random_spanning(rng, k, q, max_mult=3):
    geom = geometry_make(k, q)
    while True:
        mult = tuple(rng.randrange(max_mult + 1)
                     for _ in range(geom.n_points))
        M = PointMultiset(k=k, q=q, mult=mult)
        if M.spans():
            return M


def apply_perm(M, perm):
    out = [0] * len(M.mult)
    for p, m in enumerate(M.mult):
        out[perm[p]] = m
    return PointMultiset(k=M.k, q=M.q, mult=tuple(out))


def test_pgl_orders():
    assert pgl_order(3, 2) == 168
    assert pgl_order(3, 4) == 60480
    assert pgl_order(4, 2) == 20160
    assert pgl_order(2, 5) == 120


def test_explicit_group_sizes():
    assert len(explicit_point_group(3, 2)) == 168
    assert len(explicit_point_group(3, 4, LINEAR)) == 60480
    assert len(explicit_point_group(3, 4, SEMILINEAR)) == 120960
    assert len(explicit_point_group(2, 4, SEMILINEAR)) == 120


def test_group_too_large_guard():
    with pytest.raises(GroupTooLarge):
        explicit_point_group(4, 8)


def test_fano_all_ones_full_group():
    M = PointMultiset(k=3, q=2, mult=(1,) * 7)
    assert automorphism_group_order(M, LINEAR) == 168
    assert automorphism_group_order(M, SEMILINEAR) == 168


def test_pg24_all_ones_full_group():
    M = PointMultiset(k=3, q=4, mult=(1,) * 21)
    assert automorphism_group_order(M, LINEAR) == 60480
    assert automorphism_group_order(M, SEMILINEAR) == 120960


def test_not_spanning_rejected():
    M = PointMultiset(k=3, q=2, mult=(1, 1, 0, 0, 0, 0, 0))
    with pytest.raises(NotSpanning):
        canonical_form(M)


@pytest.mark.parametrize("k,q,kind", [
    (3, 2, SEMILINEAR), (3, 3, SEMILINEAR),
    (3, 4, SEMILINEAR), (3, 4, LINEAR), (4, 2, SEMILINEAR),
])
def test_random_conjugates_share_canonical_form(k, q, kind):
    rng = random.Random(hash((k, q, kind)) & 0xFFFF)
    perms = explicit_point_group(k, q, kind)
    for _ in range(12):
        M = random_spanning(rng, k, q)
        cf = canonical_form(M, kind)
        for _ in range(12):
            g = perms[rng.randrange(len(perms))]
            M2 = apply_perm(M, g)
            cf2 = canonical_form(M2, kind)
            assert cf2.certificate == cf.certificate
            assert cf2.vector == cf.vector
            assert cf2.aut_order == cf.aut_order


@pytest.mark.parametrize("k,q", [(3, 2), (3, 3), (3, 4), (4, 2)])
def test_oracle_equivalence_matches_canonical(k, q):
    """Canonical-form equality must coincide with explicit orbit equality."""
    rng = random.Random(10 * k + q)
    for kind in (LINEAR, SEMILINEAR):
        sample = [random_spanning(rng, k, q, max_mult=2)
                  for _ in range(50 if q < 4 else 25)]
        for M in sample:
            oracle_vec = orbit_canonical_oracle(M, kind)
            cf = canonical_form(M, kind)
            # apply a random group element; both invariants must agree
            perms = explicit_point_group(k, q, kind)
            g = perms[rng.randrange(len(perms))]
            M2 = apply_perm(M, g)
            assert orbit_canonical_oracle(M2, kind) == oracle_vec
            assert canonical_form(M2, kind).certificate == cf.certificate
        # pairwise: equality classes must match exactly
        oracle_keys = [orbit_canonical_oracle(M, kind) for M in sample]
        canon_keys = [canonical_form(M, kind).certificate for M in sample]
        for i in range(len(sample)):
            for j in range(i + 1, len(sample)):
                assert (oracle_keys[i] == oracle_keys[j]) == \
                    (canon_keys[i] == canon_keys[j]), (i, j, kind, k, q)


@pytest.mark.parametrize("k,q", [(3, 2), (3, 3), (3, 4), (4, 2)])
def test_orbit_stabilizer_product(k, q):
    rng = random.Random(99 * k + q)
    f_e = {2: 1, 3: 1, 4: 2, 5: 1}[q]
    for kind in (LINEAR, SEMILINEAR):
        group = pgl_order(k, q) * (f_e if kind == SEMILINEAR else 1)
        for _ in range(10):
            M = random_spanning(rng, k, q, max_mult=2)
            orbit = orbit_size_oracle(M, kind)
            aut = automorphism_group_order(M, kind)
            assert orbit * aut == group, (M.mult, kind)


def test_weight_distribution_is_certificate_invariant():
    rng = random.Random(4)
    seen = {}
    for _ in range(40):
        M = random_spanning(rng, 3, 3)
        cf = canonical_form(M)
        wd = weight_distribution(M).counts
        if cf.certificate in seen:
            assert seen[cf.certificate] == wd
        else:
            seen[cf.certificate] = wd


def test_dim2_canonical_forms():
    # PG(1,5): profile alone does not decide equivalence; orbits do
    rng = random.Random(21)
    for _ in range(30):
        M = random_spanning(rng, 2, 5, max_mult=4)
        cf = canonical_form(M, LINEAR)
        assert cf.vector == orbit_canonical_oracle(M, LINEAR)
        assert cf.aut_order == \
            pgl_order(2, 5) // orbit_size_oracle(M, LINEAR)


def test_dim1_trivial():
    M = PointMultiset(k=1, q=3, mult=(6,))
    cf = canonical_form(M)
    assert cf.vector == (6,)
    assert cf.aut_order == 1


def test_frobenius_perm_is_collineation():
    geom = geometry_make(3, 4)
    perm = frobenius_point_perm(geom)
    inc = geom.incidence
    mapped = inc[:, perm]
    rows = {row.tobytes() for row in inc}
    assert all(row.tobytes() in rows for row in mapped)


def test_monomial_aut_order_simplex():
    # [7,3]_2 simplex: stabilizer is all of PGL(3,2); no repeated columns
    M = PointMultiset(k=3, q=2, mult=(1,) * 7)
    assert monomial_aut_order(M, LINEAR) == 168


def test_monomial_aut_order_counts_repeats():
    M = PointMultiset(k=3, q=2, mult=(2,) + (1,) * 6)
    stab = automorphism_group_order(M, LINEAR)
    assert monomial_aut_order(M, LINEAR) == 2 * stab
