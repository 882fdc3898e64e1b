import random

import pytest

from ahweights.finite_field import field_create, frobenius, trace_to_prime
from ahweights.local_field import (
    BadRamification,
    BadUnramifiedDegree,
    PrecisionExceeded,
    UnitDigits,
    ah_unit,
    decompose_unit,
    digits_from_vector,
    galois_apply,
    is_pth_power,
    reconstruct,
    tower_create,
    tower_from_spec,
)
from ahweights.padic import artin_hasse_int

F9 = field_create(3, 2)
ALPHA = F9.gen()

# (p, f, g, e, u, N)
WILD_TOWER = (3, 2, 1, 8, 1, 3)
CYCLOTOMIC_TOWER = (3, 1, 1, 2, -1, 3)
CYCLOTOMIC_OVER_F9 = (3, 1, 2, 2, -1, 3)


def random_unit(T, rng):
    while True:
        cs = [tuple(rng.randrange(T.pN) for _ in range(T.m)) for _ in range(T.e)]
        if any(c % T.p for c in cs[0]):
            return T.elem(cs)


def random_digits(T, rng):
    vec = [rng.randrange(T.p) for _ in range(T.dim)]
    return digits_from_vector(T, vec)


def test_tower_examples():
    T = tower_create(3, 2, 1, 8, 1, 4)
    assert T.l.size == 9
    assert T.pi_power(8) == T.scalar(3)
    C = tower_create(3, 1, 1, 2, -1, 3)
    assert C.pi_power(2) == C.scalar(-3)
    assert C.uniformizer().valuation() == 1
    assert T.scalar(3).valuation() == 8
    with pytest.raises(BadRamification):
        tower_create(3, 2, 1, 9, 1, 4)
    with pytest.raises(BadUnramifiedDegree):
        tower_create(3, 1, 3, 2, 1, 3)


def test_tower_spec_round_trip():
    T = tower_create(3, 2, 1, 8, -1, 4)
    assert tower_from_spec(T.spec()) is T


def test_ring_operations():
    T = tower_create(*WILD_TOWER)
    rng = random.Random(1)
    for _ in range(30):
        x, y, z = (random_unit(T, rng) for _ in range(3))
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x * x.inverse() == T.one()


def test_ah_unit_examples():
    T = tower_create(3, 2, 1, 8, 1, 4)
    assert ah_unit(F9(0), 3, T) == T.one()
    unit = ah_unit(F9(1), 5, T)
    E = artin_hasse_int(3, 4, 10)
    expected = T.one() + T.pi_power(5) + T.pi_power(10) * E[2] + T.pi_power(15) * E[3]
    expected = expected + T.pi_power(20) * E[4] + T.pi_power(25) * E[5] + T.pi_power(30) * E[6]
    assert unit == expected
    assert E[2] % 9 == 5
    for a in F9.elements():
        if not a.is_zero():
            for n in (1, 2, 5, 7, 11):
                u = ah_unit(a, n, T)
                assert (u - 1).valuation() == n
                assert (u - 1).leading(n) == a
    with pytest.raises(PrecisionExceeded):
        ah_unit(F9(1), T.horizon, T)


def test_decompose_examples():
    T = tower_create(*WILD_TOWER)
    for a in F9.elements():
        if a.is_zero():
            continue
        assert decompose_unit(ah_unit(a, 7, T)).digits == {7: a}
        for b in (ALPHA, ALPHA ** 5):
            d = decompose_unit(ah_unit(a, 5, T) * ah_unit(b, 7, T))
            assert d.digits == {5: a, 7: b}


def test_top_level_data():
    T = tower_create(*WILD_TOWER)
    assert T.top_level == 12
    assert T.levels == [1, 2, 4, 5, 7, 8, 10, 11]
    C = tower_create(*CYCLOTOMIC_TOWER)
    assert C.top_level == 3 and C.levels == [1, 2]
    B = tower_create(3, 2, 1, 8, -1, 3)
    assert B.top_level == 12
    # pi^2 = 3 over Q_3: -1/u = -1 is not a square in F_3, so no cube roots of unity
    D = tower_create(3, 1, 1, 2, 1, 3)
    assert D.top_level is None


@pytest.mark.parametrize("spec", [WILD_TOWER, CYCLOTOMIC_TOWER])
def test_digit_round_trip(spec):
    T = tower_create(*spec)
    rng = random.Random(2)
    cases = 500 if spec == WILD_TOWER else 1000
    for _ in range(cases):
        d = random_digits(T, rng)
        got = decompose_unit(reconstruct(d))
        assert got.vector() == d.vector()


@pytest.mark.parametrize("spec", [WILD_TOWER, CYCLOTOMIC_TOWER])
def test_decomposition_is_a_homomorphism(spec):
    T = tower_create(*spec)
    rng = random.Random(3)
    cases = 500 if spec == WILD_TOWER else 1000
    for _ in range(cases):
        x = random_unit(T, rng)
        y = random_unit(T, rng)
        vx = decompose_unit(x).vector()
        vy = decompose_unit(y).vector()
        vxy = decompose_unit(x * y).vector()
        assert vxy == [(a + b) % T.p for a, b in zip(vx, vy)]


@pytest.mark.parametrize("spec", [WILD_TOWER, CYCLOTOMIC_TOWER])
def test_pth_powers_decompose_trivially(spec):
    p, f, g, e, u, N = spec
    T = tower_create(p, f, g, e, u, N + 2)
    rng = random.Random(4)
    for _ in range(300):
        y = random_unit(T, rng)
        assert is_pth_power(y ** 3)
        assert decompose_unit(y ** 3).digits == {}
        assert is_pth_power(y ** 3 * T.pi_power(3))


@pytest.mark.parametrize("spec", [WILD_TOWER, CYCLOTOMIC_TOWER])
def test_pth_power_threshold(spec):
    T = tower_create(*spec)
    rng = random.Random(5)
    bound = T.top_bound
    for _ in range(1000):
        m = rng.randrange(1, int(bound) + 4)
        y = random_unit(T, rng)
        x = T.one() + T.pi_power(m) * y
        if m > bound:
            assert is_pth_power(x)
        elif m % T.p and m < bound:
            assert not is_pth_power(x)


def test_low_levels_are_not_pth_powers():
    T = tower_create(*WILD_TOWER)
    for a in F9.elements():
        if not a.is_zero():
            assert not is_pth_power(ah_unit(a, 5, T))


def test_trace_criterion_over_f9():
    T = tower_create(*CYCLOTOMIC_OVER_F9)
    assert T.l.size == 9
    delta_cubed = T.pi_power(3)
    for beta in T.l.elements():
        x = T.one() + T.teich(beta) * delta_cubed
        assert is_pth_power(x) == (trace_to_prime(beta) == T.l(0))


def test_galois_action():
    T = tower_create(*WILD_TOWER)
    rng = random.Random(6)
    x = random_unit(T, rng)
    assert galois_apply((0, 0), x) == x
    zeta = T.scalar(T.zeta)
    for sigma in [(0, 1), (1, 0), (1, 3)]:
        gx = galois_apply(sigma, x)
        gpi = galois_apply(sigma, T.uniformizer())
        assert galois_apply(sigma, T.uniformizer() * x) == gpi * gx
        assert galois_apply(sigma, x * x) == gx * gx
    assert galois_apply((0, 1), T.uniformizer()) == zeta * T.uniformizer()
    for a in (ALPHA, F9(2)):
        for n in (1, 5, 7):
            for s, t in [(0, 1), (1, 2)]:
                image = galois_apply((s, t), ah_unit(a, n, T))
                omega = T.W(T.zeta).residue() ** (t * n)
                expected = omega * frobenius(a, T.f * s)
                assert decompose_unit(image).digits == {n: expected}


def test_unit_digits_json():
    T = tower_create(*WILD_TOWER)
    d = UnitDigits(T, {5: ALPHA}, 0, 0, None)
    assert d.to_json()["digits"] == {"5": list(ALPHA.coeffs)}
