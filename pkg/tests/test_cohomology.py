import json
import random
from fractions import Fraction
from importlib import resources

import pytest

import ahweights.norm_group as norm_group
from ahweights.cohomology import (
    BasisMismatch,
    ClassVector,
    IndexMismatch,
    LevelMismatch,
    TowerTooSmall,
    basis_data,
    character_from_tower_power,
    class_from_norm_subgroup,
    evaluate_dual,
    filtration_degree,
    fixture_pipeline,
    in_lv_ah,
    nullspace,
    pull_back_class,
    restrict_coefficients,
    solve,
    tower_character_value,
)
from ahweights.finite_field import field_create
from ahweights.local_field import ah_unit, galois_apply, tower_create, tower_map
from ahweights.norm_group import WildExtension, norm_subgroup
from ahweights.padic import witt_ring
from ahweights.serre_combinatorics import (
    TRACE,
    GaloisCharData,
    LvAhDescriptor,
    lv_ah_descriptor,
    weight_pairs,
)

F9 = field_create(3, 2)
ONE = GaloisCharData.trivial(3, 2)

# (inertia power k, e, u): signatures (1,2), (1,3) and (1,1)
TRANSPORT_CASES = [(7, 8, 1), (5, 4, 1), (1, 2, -1)]


def load(name):
    return json.loads((resources.files("ahweights") / "fixtures" / name).read_text())


def tower_and_basis(k, e, u, N=4):
    T = tower_create(3, 2, 1, e, u, N)
    chi = character_from_tower_power(3, 2, T, k)
    return T, chi, basis_data(chi, T)


def descriptors(chi):
    weights = sorted({V for V, _ in weight_pairs(chi, ONE)})
    return [lv_ah_descriptor(V, chi, ONE) for V in weights]


def random_class(bd, rng):
    return ClassVector(bd, {lab: bd.tower.l.from_index(rng.randrange(bd.tower.l.size)) for lab in bd.labels})


class TestLinearAlgebra:
    def test_nullspace_over_f9(self):
        a = F9.gen()
        rows = [[F9.one(), a], [a, a * a]]
        null = nullspace(rows, 2, F9)
        assert len(null) == 1
        x = null[0]
        assert (x[0] + a * x[1]).is_zero()

    def test_solve(self):
        a = F9.gen()
        rows = [[F9.one(), F9.zero()], [F9.zero(), a]]
        assert solve(rows, [a, a], F9) == [a, F9.one()]
        assert solve([[F9.one()], [F9.one()]], [F9.one(), F9.zero()], F9) is None


class TestBasisData:
    def test_case_one_levels(self):
        T, chi, bd = tower_and_basis(7, 8, 1)
        assert chi.signature.digits == (1, 2)
        assert bd.levels == (5, 7)
        assert bd.labels == (0, 1)

    def test_case_three_levels(self):
        _, chi, bd = tower_and_basis(5, 4, 1)
        assert chi.signature.digits == (1, 3)
        assert bd.levels == (1, 5)

    def test_cyclotomic_has_trace_and_equal_levels(self):
        _, chi, bd = tower_and_basis(1, 2, -1)
        assert chi.is_cyclotomic
        assert bd.levels == (1, 1)
        assert bd.labels == (0, 1, TRACE)

    def test_tower_too_small(self):
        T = tower_create(3, 2, 1, 2, -1, 4)
        with pytest.raises(TowerTooSmall):
            basis_data(GaloisCharData.of(3, (1, 2)), T)

    def test_character_value_examples(self):
        # pi^8 = 3 with u = 1: the value (-1)^(-k) in F_9
        T = tower_create(3, 2, 1, 8, 1, 4)
        assert tower_character_value(T, 1) == F9(-1)
        assert tower_character_value(T, 2) == F9.one()

    def test_frobenius_value_is_trivial_for_tower_characters(self):
        for k, e, u in TRANSPORT_CASES:
            _, _, bd = tower_and_basis(k, e, u)
            assert bd.frobenius_value == F9.one()


class TestDualBasis:
    def test_orthogonality(self):
        T, _, bd = tower_and_basis(7, 8, 1)
        for a in T.l.elements():
            assert evaluate_dual(bd, 0, a, 7).is_zero()
            assert evaluate_dual(bd, 1, a, 5).is_zero()

    def test_values_on_own_level(self):
        T, _, bd = tower_and_basis(7, 8, 1)
        a = F9.gen()
        # n_0 = 7 sits on tau_0; the index-0 class sits at level 5 on tau_1
        assert bd.embeddings == (1, 0)
        assert evaluate_dual(bd, 0, a, 5) == a ** 3
        assert evaluate_dual(bd, 1, a, 7) == a

    def test_additive_in_the_digit(self):
        T, _, bd = tower_and_basis(5, 4, 1)
        for a in F9.elements():
            for b in F9.elements():
                assert evaluate_dual(bd, 1, a + b, 5) == evaluate_dual(bd, 1, a, 5) + evaluate_dual(bd, 1, b, 5)

    def test_level_mismatch(self):
        _, _, bd = tower_and_basis(7, 8, 1)
        with pytest.raises(LevelMismatch):
            evaluate_dual(bd, 0, F9.one(), 4)

    def test_class_values_are_additive(self):
        T, _, bd = tower_and_basis(7, 8, 1)
        rng = random.Random(3)
        cv = random_class(bd, rng)
        for _ in range(20):
            x = T.one() + T.teich(T.l.from_index(rng.randrange(9))) * T.pi_power(rng.randrange(1, 12))
            y = T.one() + T.teich(T.l.from_index(rng.randrange(9))) * T.pi_power(rng.randrange(1, 12))
            assert cv.evaluate(x * y) == cv.evaluate(x) + cv.evaluate(y)

    @pytest.mark.parametrize("case", TRANSPORT_CASES)
    def test_galois_equivariance(self, case):
        T, _, bd = tower_and_basis(*case)
        rng = random.Random(4)
        for lab in bd.labels:
            cv = ClassVector(bd, {m: (F9.one() if m == lab else F9.zero()) for m in bd.labels})
            for _ in range(10):
                x = ah_unit(T.l.from_index(rng.randrange(1, 9)), rng.choice(bd.levels), T)
                x = x * T.uniformizer() ** rng.randrange(3)
                for t in range(T.e):
                    sigma = (0, t)
                    assert cv.evaluate(galois_apply(sigma, x)) == bd.chi_value(sigma) * cv.evaluate(x)


class TestClassFromNorms:
    def test_full_norm_group_is_rejected(self):
        T, _, bd = tower_and_basis(7, 8, 1)
        ns = norm_subgroup(WildExtension(T, [-1, 1]))
        with pytest.raises(IndexMismatch):
            class_from_norm_subgroup(ns, bd)

    def test_filtration_degrees(self):
        T, _, bd = tower_and_basis(7, 8, 1)
        cv = ClassVector(bd, {0: F9.one(), 1: F9.zero()})
        assert filtration_degree(cv) == Fraction(13, 8)
        cv = ClassVector(bd, {0: F9.one(), 1: F9.one()})
        assert filtration_degree(cv) == Fraction(15, 8)
        _, _, bd = tower_and_basis(1, 2, -1)
        cv = ClassVector(bd, {0: F9.zero(), 1: F9.zero(), TRACE: F9.one()})
        assert filtration_degree(cv) == Fraction(5, 2)
        assert filtration_degree(ClassVector(bd, {0: F9.zero(), 1: F9.zero(), TRACE: F9.zero()})) is None

    def test_in_lv_ah_examples(self):
        _, _, bd = tower_and_basis(7, 8, 1)
        cv = ClassVector(bd, {0: F9.one(), 1: F9.zero()})
        assert in_lv_ah(cv, LvAhDescriptor(frozenset({0}), False, False))
        assert not in_lv_ah(cv, LvAhDescriptor(frozenset({1}), False, False))
        with pytest.raises(BasisMismatch):
            in_lv_ah(cv, LvAhDescriptor(frozenset({0}), True, False))

    @pytest.mark.parametrize("name", ["ia.json", "ib1.json", "ib2.json", "iiia.json", "iiib1.json", "iia.json"])
    def test_fixture_reproduces_weights_and_slope(self, name):
        data = load(name)
        res = fixture_pipeline(data)
        assert res.diagnosis == "ok"
        assert res.weights == sorted(data["expected"]["weights"])
        assert res.filtration == Fraction(data["slope"])
        assert res.cls.support == frozenset(data["expected"]["support"])


class TestFailureDiagnosis:
    def test_non_abelian_fixture_is_blamed(self):
        data = load("iiia.json")
        data["tower"] = dict(data["tower"], unit={"teich": "a^0"})
        assert fixture_pipeline(data).diagnosis.startswith("fixture wrong")

    def test_wrong_weights_are_reported(self):
        data = load("ia.json")
        data["expected"]["weights"] = ["[0,0;1,1]"]
        assert fixture_pipeline(data).diagnosis.startswith("mismatch")

    def test_unstable_norm_group_blames_code(self, monkeypatch):
        monkeypatch.setattr(norm_group, "is_galois_stable", lambda ns, sigmas=None: False)
        assert fixture_pipeline(load("ia.json")).diagnosis.startswith("code wrong")

    def test_missing_generators_blame_code(self, monkeypatch):
        real = norm_group.norm_subgroup
        monkeypatch.setattr(norm_group, "norm_subgroup", lambda ext, **kw: real(ext, generator_bound=2))
        assert fixture_pipeline(load("ia.json")).diagnosis.startswith("code wrong")


# ---------------------------------------------------------------------------
# independence of choices


def unramified_norm(small):
    def pull(x):
        return restrict_coefficients(x * galois_apply((1, 0), x), small)
    return pull


def ramified_norm(small, big):
    step = big.e // small.e

    def pull(x):
        acc = x
        for t in range(small.e, big.e, small.e):
            acc = acc * galois_apply((0, t), x)
        assert all(not any(c) for j, c in enumerate(acc.c) if j % step)
        return small.elem([acc.c[j] for j in range(0, big.e, step)])
    return pull


@pytest.mark.parametrize("case", TRANSPORT_CASES)
def test_uniformizer_change_preserves_membership(case):
    k, e, u = case
    T, chi, bd = tower_and_basis(k, e, u)
    descs = descriptors(chi)
    Wk = witt_ring(T.k, T.N)
    rng = random.Random(20 + k)
    moved = 0
    for _ in range(20):
        w = Wk([rng.randrange(T.pN) for _ in range(T.m)])
        shift = Wk.one() + 3 * w
        # pi' = (1 + 3w) pi has pi'^e = u (1 + 3w)^e p
        T2 = tower_create(3, 2, 1, e, tuple((Wk(u) * shift ** e).coeffs), T.N)
        bd2 = basis_data(chi, T2)
        image = T.uniformizer() * T.elem([T.embed_from_k(shift).coeffs])
        cv = random_class(bd, rng)
        cv2 = pull_back_class(cv, bd2, lambda x: tower_map(x, image))
        moved += cv2.coords != cv.coords
        for d in descs:
            assert in_lv_ah(cv, d) == in_lv_ah(cv2, d)
    if chi.signature.digits != (1, 2):
        # dependent pairs exist, so the coordinates genuinely move
        assert moved > 0


@pytest.mark.parametrize("case", TRANSPORT_CASES)
def test_enlarging_the_tower_preserves_membership(case):
    k, e, u = case
    T, chi, bd = tower_and_basis(k, e, u)
    descs = descriptors(chi)
    bigger = [(tower_create(3, 2, 2, e, u, T.N), unramified_norm(T))]
    for e2 in (2 * e, 4 * e):
        if 8 % e2 == 0:
            B = tower_create(3, 2, 1, e2, u, T.N)
            bigger.append((B, ramified_norm(T, B)))
    rng = random.Random(40 + k)
    for B, pull in bigger:
        bd2 = basis_data(chi, B)
        for _ in range(20):
            cv = random_class(bd, rng)
            cv2 = pull_back_class(cv, bd2, pull)
            assert cv2.support == cv.support
            for d in descs:
                assert in_lv_ah(cv, d) == in_lv_ah(cv2, d)
