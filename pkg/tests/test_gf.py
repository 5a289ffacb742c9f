import pytest

from latcode.errors import DivisionByZero, NotPrimePower
from latcode.gf import field_make, field_op

PRIME_POWERS = [2, 3, 4, 5, 7, 8, 9]


def test_field_make_prime_power_factorisation():
    f = field_make(4)
    assert (f.p, f.e) == (2, 2)
    f = field_make(9)
    assert (f.p, f.e) == (3, 2)
    f = field_make(8)
    assert (f.p, f.e) == (2, 3)


@pytest.mark.parametrize("q", [6, 10, 12, 15, 1, 0])
def test_field_make_rejects_non_prime_powers(q):
    with pytest.raises(NotPrimePower):
        field_make(q)


@pytest.mark.parametrize("q", PRIME_POWERS)
def test_field_axioms_exhaustive(q):
    f = field_make(q)
    els = range(q)
    for a in els:
        assert f.add(a, 0) == a
        assert f.mul(a, 1) == a
        assert f.mul(a, 0) == 0
        assert f.add(a, f.neg(a)) == 0
        for b in els:
            assert f.add(a, b) == f.add(b, a)
            assert f.mul(a, b) == f.mul(b, a)
            for c in els:
                assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
                assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
                assert f.mul(a, f.add(b, c)) == \
                    f.add(f.mul(a, b), f.mul(a, c))


@pytest.mark.parametrize("q", PRIME_POWERS)
def test_inverses(q):
    f = field_make(q)
    for a in range(1, q):
        assert f.mul(f.inv(a), a) == 1


@pytest.mark.parametrize("q", PRIME_POWERS)
def test_fermat(q):
    f = field_make(q)
    for a in range(1, q):
        assert f.pow(a, q - 1) == 1


@pytest.mark.parametrize("q", PRIME_POWERS)
def test_frobenius_is_automorphism(q):
    f = field_make(q)
    for a in range(q):
        for b in range(q):
            assert f.frobenius(f.add(a, b)) == \
                f.add(f.frobenius(a), f.frobenius(b))
            assert f.frobenius(f.mul(a, b)) == \
                f.mul(f.frobenius(a), f.frobenius(b))


@pytest.mark.parametrize("q", PRIME_POWERS)
def test_frobenius_order_and_fixed_points(q):
    f = field_make(q)
    for a in range(q):
        x = a
        for _ in range(f.e):
            x = f.frobenius(x)
        assert x == a
    fixed = [a for a in range(q) if f.frobenius(a) == a]
    assert len(fixed) == f.p


def test_gf4_nonprime_elements_multiply_to_one():
    f = field_make(4)
    # 2 and 3 encode the two elements outside GF(2)
    assert f.mul(2, 3) == 1
    assert f.mul(2, 2) == 3


def test_gf5_add():
    f = field_make(5)
    assert f.add(3, 4) == 2


def test_inverse_of_zero_raises():
    f = field_make(8)
    with pytest.raises(DivisionByZero):
        f.inv(0)
    with pytest.raises(ZeroDivisionError):
        f.inv(0)


def test_field_op_dispatch():
    f = field_make(9)
    assert field_op(f, "add", 1, 2) == f.add(1, 2)
    assert field_op(f, "mul", 4, 5) == f.mul(4, 5)
    assert field_op(f, "neg", 7) == f.neg(7)
    assert field_op(f, "inv", 2) == f.inv(2)
    assert field_op(f, "pow", 5, 3) == f.pow(5, 3)
    assert field_op(f, "frobenius", 6) == f.frobenius(6)
    with pytest.raises(ValueError):
        field_op(f, "sqrt", 2)


def test_gf9_frobenius_fixes_prime_subfield():
    f = field_make(9)
    fixed = [a for a in range(9) if f.frobenius(a) == a]
    assert len(fixed) == 3
