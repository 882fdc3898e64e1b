"""Classes in H^1(G_K, Fbar_p(chi)) as Galois-equivariant functionals on M^x.

A class is a homomorphism M^x -> Fbar_p(chi) that transforms under Gal(M/K)
by chi.  On unit digits (see ``local_field.decompose_unit``) the Galois action
is diagonal in the level, so such a functional only reads the digits at the
basis levels n_i', plus the pi-exponent when chi is trivial and the top
(mu_p) digit when chi is cyclotomic.  Values are taken in the residue field
l of the tower, with tau_r realised as Frob^r on l.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .finite_field import FqElem, frobenius
from .local_field import (
    LocalElem,
    TameTower,
    UnitDigits,
    ah_unit,
    decompose_unit,
    top_basis_residue,
)
from .norm_group import NormSubgroup
from .padic import WittElem, witt_ring
from .serre_combinatorics import (
    TRACE,
    UNRAMIFIED,
    GaloisCharData,
    LvAhDescriptor,
    TameSignature,
    basis_labels,
    shifted_level,
    support_in_descriptor,
    twist_weight,
    weights_reducible,
)


class CohomologyError(ArithmeticError):
    pass


class TowerTooSmall(CohomologyError):
    pass


class LevelMismatch(CohomologyError):
    pass


class IndexMismatch(CohomologyError):
    pass


class AmbiguousKernel(CohomologyError):
    pass


class BasisMismatch(CohomologyError):
    pass


# ---------------------------------------------------------------------------
# linear algebra over a finite field


def nullspace(rows, ncols: int, F):
    """Right kernel of a matrix with FqElem entries."""
    A = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(A)) if not A[i][c].is_zero()), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        inv = A[r][c].inverse()
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and not A[i][c].is_zero():
                fac = A[i][c]
                A[i] = [x - fac * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    out = []
    for fc in (c for c in range(ncols) if c not in pivots):
        v = [F.zero()] * ncols
        v[fc] = F.one()
        for i, pc in enumerate(pivots):
            v[pc] = -A[i][fc]
        out.append(v)
    return out


def solve(rows, rhs, F):
    """A solution of A x = rhs over F, or None if inconsistent."""
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    kernel = nullspace(aug, n + 1, F)
    for v in kernel:
        if not v[n].is_zero():
            scale = -(v[n].inverse())
            return [x * scale for x in v[:n]]
    return None


# ---------------------------------------------------------------------------
# basis data


def tower_character_value(tower: TameTower, k: int) -> FqElem:
    """(omega_f^(k(q-1)/e) / omega_pi^k) on a Frobenius lift fixing pi, as an element of l."""
    q1 = tower.p ** tower.f - 1
    ubar = tower.l(tower.u)
    return (-ubar) ** (-(k * q1 // tower.e))


@dataclass(frozen=True)
class BasisData:
    character: GaloisCharData
    tower: TameTower
    levels: tuple  # n_i' for i in Z/fZ
    embeddings: tuple  # tau_i' index
    inertia_power: int  # k with chi|_I = omega_pi^k on the tower
    frobenius_value: FqElem  # chi on the Frobenius lift fixing pi
    labels: tuple

    @property
    def p(self):
        return self.tower.p

    @property
    def f(self):
        return self.tower.f

    @property
    def has_unramified(self):
        return UNRAMIFIED in self.labels

    @property
    def has_trace(self):
        return TRACE in self.labels

    def chi_value(self, sigma) -> FqElem:
        """chi(sigma) for sigma = (s, t) in Gal(M/K), in l via tau_0."""
        s, t = sigma
        T = self.tower
        zeta = T.W(T.zeta).residue()
        return self.frobenius_value ** s * zeta ** (t * self.inertia_power)

    def to_json(self):
        return {
            "levels": list(self.levels),
            "embeddings": list(self.embeddings),
            "labels": [str(x) for x in self.labels],
            "inertia_power": self.inertia_power,
            "frobenius_value": list(self.frobenius_value.coeffs),
        }


def basis_data(char: GaloisCharData, tower: TameTower) -> BasisData:
    sig = char.signature
    p, f = sig.p, sig.f
    if tower.p != p or tower.f != f:
        raise TowerTooSmall("tower and character live over different base fields")
    q1 = p ** f - 1
    k = Fraction(tower.e * sig.n(0), q1)
    if k.denominator != 1:
        raise TowerTooSmall(f"e = {tower.e} does not kill chi on inertia")
    k = int(k)
    mu = char.unramified if char.unramified is not None else tower.k.one()
    if mu.field != tower.l:
        mu = tower.k_to_l(mu)
    frob = mu * tower_character_value(tower, k)
    if frob ** tower.g != tower.l.one():
        raise TowerTooSmall("unramified part of chi is not trivial on Gal(L'/L)")
    levels, embeddings = [], []
    for i in range(f):
        tau, ratio = shifted_level(sig, i)
        level = tower.e * ratio
        if level.denominator != 1 or level <= 0:
            raise TowerTooSmall(f"level {level} is not a positive integer")
        levels.append(int(level))
        embeddings.append(tau)
    labels = tuple(basis_labels(char))
    return BasisData(char, tower, tuple(levels), tuple(embeddings), k, frob, labels)


def evaluate_dual(bd: BasisData, index: int, a: FqElem, level: int) -> FqElem:
    """c_index(E([a] pi^level)) in l."""
    T = bd.tower
    if level not in bd.levels:
        raise LevelMismatch(f"level {level} is not a basis level {bd.levels}")
    if level != bd.levels[index]:
        return T.l.zero()
    return _dual_functional(bd, index, a)


def _dual_functional(bd: BasisData, index: int, a: FqElem) -> FqElem:
    # sum over Gal(l/k) of mu^{-j} tau'(Frob^{fj} a): the chi-equivariant projection
    T = bd.tower
    tau = bd.embeddings[index]
    mu_inv = bd.frobenius_value.inverse()
    acc = T.l.zero()
    weight = T.l.one()
    for j in range(T.g):
        acc = acc + weight * frobenius(frobenius(a, T.f * j), tau)
        weight = weight * mu_inv
    return acc


# ---------------------------------------------------------------------------
# classes


@dataclass
class ClassVector:
    basis: BasisData
    coords: dict  # label -> FqElem
    up_to_scalar: bool = True

    @property
    def support(self) -> frozenset:
        return frozenset(k for k, v in self.coords.items() if not v.is_zero())

    def is_zero(self):
        return not self.support

    def normalized(self) -> "ClassVector":
        """Scale so the first nonzero coordinate (in label order) is 1."""
        for lab in self.basis.labels:
            v = self.coords[lab]
            if not v.is_zero():
                inv = v.inverse()
                return ClassVector(self.basis, {k: x * inv for k, x in self.coords.items()}, self.up_to_scalar)
        return self

    def same_line(self, other: "ClassVector") -> bool:
        return self.normalized().coords == other.normalized().coords

    def evaluate_digits(self, digits: UnitDigits) -> FqElem:
        bd = self.basis
        T = bd.tower
        acc = T.l.zero()
        for i, lev in enumerate(bd.levels):
            x = self.coords[i]
            a = digits.digits.get(lev)
            if a is not None and not x.is_zero():
                acc = acc + x * _dual_functional(bd, i, a)
        if bd.has_unramified:
            acc = acc + self.coords[UNRAMIFIED] * (digits.pi_exponent % T.p)
        if bd.has_trace:
            acc = acc + self.coords[TRACE] * (digits.top % T.p)
        return acc

    def evaluate(self, x: LocalElem) -> FqElem:
        return self.evaluate_digits(decompose_unit(x, self.basis.tower))

    def to_json(self):
        return {
            "coordinates": {str(k): list(v.coeffs) for k, v in self.coords.items()},
            "up_to_scalar": self.up_to_scalar,
        }


def _row_functionals(bd: BasisData, vec) -> list:
    """Lambda_label(v) for each label, as elements of l."""
    T = bd.tower
    m = T.m
    out = []
    for i, lev in enumerate(bd.levels):
        pos = T.levels.index(lev) * m
        a = T.l(vec[pos:pos + m])
        out.append(_dual_functional(bd, i, a))
    if bd.has_unramified:
        out.append(T.l(vec[-1]))
    if bd.has_trace:
        out.append(T.l(vec[-2]) if T.top_level else T.l.zero())
    return out


def class_from_norm_subgroup(ns: NormSubgroup, bd: BasisData, expected_index: int | None = None) -> ClassVector:
    """The class, up to scalar, whose kernel contains the norm subgroup."""
    T = bd.tower
    if ns.tower is not T:
        raise BasisMismatch("norm subgroup and basis data live in different towers")
    expected = expected_index or T.p ** T.f
    if ns.index != expected or ns.index == 1:
        raise IndexMismatch(f"norm subgroup has index {ns.index}, expected {expected}")
    rows = [_row_functionals(bd, v) for v in ns.basis()]
    kernel = nullspace(rows, len(bd.labels), T.l)
    if len(kernel) != 1:
        raise AmbiguousKernel(f"kernel has dimension {len(kernel)}")
    cv = ClassVector(bd, dict(zip(bd.labels, kernel[0])))
    return cv.normalized()


def filtration_degree(cv: ClassVector, bd: BasisData | None = None):
    """Least s with the class in Fil^s; None for the zero class."""
    bd = bd or cv.basis
    best = None
    for lab in cv.support:
        if lab == UNRAMIFIED:
            s = Fraction(0)
        elif lab == TRACE:
            s = 1 + Fraction(bd.p, bd.p - 1)
        else:
            s = 1 + Fraction(bd.levels[lab], bd.tower.e)
        if best is None or s > best:
            best = s
    return best


def in_lv_ah(cv: ClassVector, desc: LvAhDescriptor) -> bool:
    labels = set(cv.basis.labels)
    if not set(desc.indices) <= labels:
        raise BasisMismatch(f"descriptor indices {sorted(desc.indices)} outside the basis")
    if desc.include_unramified and UNRAMIFIED not in labels:
        raise BasisMismatch("descriptor expects an unramified class the basis lacks")
    return support_in_descriptor(cv.support, desc)


def class_weights(cv: ClassVector, twist: int = 0) -> list:
    """Weights for the pair (chi, 1) whose extension class is cv, twisted by omega_f^twist."""
    char = cv.basis.character
    trivial = GaloisCharData.trivial(char.p, char.f)
    ws = weights_reducible(char, trivial, lambda desc: in_lv_ah(cv, desc))
    return sorted(twist_weight(V, char.p, twist) for V in ws)


# ---------------------------------------------------------------------------
# transporting classes between towers


def basis_units(bd: BasisData):
    """Pairs (label, a, element) spanning the digit coordinates read by the basis functionals."""
    T = bd.tower
    basis = [T.l.from_index(T.p ** i) for i in range(T.m)]
    out = []
    for lev in sorted(set(bd.levels)):
        for a in basis:
            out.append((lev, a, ah_unit(a, lev, T)))
    return out


def pull_back_class(cv: ClassVector, target: BasisData, pullback) -> ClassVector:
    """The class cv o pullback on the target tower, with pullback: M_target^x -> M_source^x.

    Both classes must take values in fields containing each other's values;
    the source values (in its residue field) are mapped into the target's
    residue field through the tower embeddings of k.
    """
    T = target.tower
    labels = target.labels
    rows, rhs = [], []
    into_target = _value_map(cv.basis.tower, T)
    for lev, a, x in basis_units(target):
        row = []
        for lab in labels:
            if isinstance(lab, int) and target.levels[lab] == lev:
                row.append(_dual_functional(target, lab, a))
            else:
                row.append(T.l.zero())
        rows.append(row)
        rhs.append(into_target(cv.evaluate(pullback(x))))
    if target.has_unramified:
        rows.append([T.l.one() if lab == UNRAMIFIED else T.l.zero() for lab in labels])
        rhs.append(into_target(cv.evaluate(pullback(T.uniformizer()))))
    if target.has_trace and T.top_level:
        b = top_basis_residue(T)
        x = T.one() + T.teich(b) * T.pi_power(T.top_level)
        rows.append([T.l.one() if lab == TRACE else T.l.zero() for lab in labels])
        rhs.append(into_target(cv.evaluate(pullback(x))))
    sol = solve(rows, rhs, T.l)
    if sol is None:
        raise CohomologyError("pulled-back functional is not in the span of the basis classes")
    return ClassVector(target, dict(zip(labels, sol)))


def _value_map(src: TameTower, dst: TameTower):
    if src.l == dst.l:
        return lambda x: x
    if src.l == src.k:
        return dst.k_to_l
    raise CohomologyError("no embedding between the value fields")


def restrict_coefficients(x: LocalElem, small: TameTower) -> LocalElem:
    """View x in a tower over a larger l as an element of a tower over k (g = 1).

    Each W(l) coefficient must lie in the image of W(k); its coordinates are
    recovered by solving against the images of the power basis of W(k).
    """
    big = x.tower
    if small.g != 1 or small.p != big.p or small.f != big.f or small.e != big.e:
        raise CohomologyError("restriction needs a base tower over k with the same ramification")
    Wk = witt_ring(small.k, big.N)
    images = [big.embed_from_k(Wk(tuple(1 if j == i else 0 for j in range(small.m)))).coeffs for i in range(small.m)]
    pN = big.pN
    out = []
    for c in x.c:
        coords = _solve_mod(images, c, big.p, pN)
        out.append(tuple(v % small.pN for v in coords))
    return small.elem(out)


def _solve_mod(columns, target, p, pN):
    """Solve sum x_i columns[i] = target over Z/p^N (columns unimodular)."""
    n, m = len(columns), len(target)
    A = [[columns[j][i] % pN for j in range(n)] + [target[i] % pN] for i in range(m)]
    row = 0
    piv_cols = []
    for c in range(n):
        pr = next((i for i in range(row, m) if A[i][c] % p), None)
        if pr is None:
            raise CohomologyError("coefficient images are not unimodular")
        A[row], A[pr] = A[pr], A[row]
        inv = pow(A[row][c], -1, pN)
        A[row] = [v * inv % pN for v in A[row]]
        for i in range(m):
            if i != row and A[i][c]:
                fac = A[i][c]
                A[i] = [(v - fac * w) % pN for v, w in zip(A[i], A[row])]
        piv_cols.append(c)
        row += 1
    for i in range(row, m):
        if A[i][n] % pN:
            raise CohomologyError("coefficient does not come from the smaller ring")
    return [A[i][n] for i in range(n)]


def character_from_tower_power(p: int, f: int, tower: TameTower, k: int) -> GaloisCharData:
    """GaloisCharData for chi = omega_pi^k, pi the tower's uniformizer."""
    q1 = p ** f - 1
    exponent = k * q1 // tower.e
    sig = TameSignature.from_exponent(p, f, exponent)
    mu = tower.k_to_l.preimage(tower_character_value(tower, k).inverse())
    return GaloisCharData(sig, mu)


# ---------------------------------------------------------------------------
# fixture pipeline: defining polynomial -> norm group -> class -> weights


@dataclass
class FixtureResult:
    label: str
    index: int
    galois_stable: bool
    cls: ClassVector | None
    weights: list
    expected_weights: list | None
    diagnosis: str
    filtration: Fraction | None = None
    slope: Fraction | None = None

    @property
    def passed(self) -> bool:
        return self.diagnosis == "ok"

    def to_json(self):
        return {
            "label": self.label,
            "index": self.index,
            "galois_stable": self.galois_stable,
            "coordinates": self.cls.to_json()["coordinates"] if self.cls else None,
            "support": sorted(str(s) for s in self.cls.support) if self.cls else None,
            "filtration_degree": str(self.filtration) if self.filtration is not None else None,
            "slope": str(self.slope) if self.slope is not None else None,
            "memberships": self.memberships(),
            "weights": self.weights,
            "expected_weights": self.expected_weights,
            "diagnosis": self.diagnosis,
        }

    def memberships(self):
        if self.cls is None:
            return None
        out = {}
        for i in range(self.cls.basis.f):
            out[f"L_{i}"] = self.cls.support <= {i}
        return out


def fixture_norm_subgroup(data: dict, precision: int | None = None):
    """The norm subgroup of the fixture's extension, intersected with conjugates when requested."""
    from .local_field import tower_from_spec
    from .norm_group import WildExtension, galois_conjugate, intersect, norm_subgroup

    spec = dict(data["tower"])
    if precision:
        spec["precision"] = precision
    T = tower_from_spec(spec)
    ext = WildExtension(T, data["poly"], data.get("label"))
    if data.get("intersect_conjugates"):
        ns = norm_subgroup(ext, expected_index=data.get("partial_index"))
        acc = ns
        sigmas = [(0, t) for t in range(1, T.e)] + [(s, 0) for s in range(1, T.g)]
        for sigma in sigmas:
            acc = intersect(acc, galois_conjugate(ns, sigma))
        return T, acc
    return T, norm_subgroup(ext, expected_index=data.get("expected_index"))


def fixture_pipeline(data: dict, precision: int | None = None) -> FixtureResult:
    from .norm_group import IndexInconsistent, is_galois_stable

    label = data.get("label", "?")
    expected = data.get("expected", {})
    expected_weights = expected.get("weights") if isinstance(expected, dict) else None
    slope = Fraction(data["slope"]) if data.get("slope") else None
    try:
        T, ns = fixture_norm_subgroup(data, precision)
    except IndexInconsistent as err:
        # fewer classes than the degree: the maximal abelian subextension is smaller
        return FixtureResult(label, 0, False, None, [], expected_weights,
                             f"fixture wrong: {err} (extension not abelian of the stated degree)", None, slope)
    stable = is_galois_stable(ns)
    want = data.get("expected_index", T.p ** T.f)
    if not stable:
        # norms from a Galois extension of K always form a Galois-stable subgroup
        return FixtureResult(label, ns.index, False, None, [], expected_weights,
                             "code wrong: norm subgroup is not Galois-stable", None, slope)
    if ns.index > want:
        # the index of a norm group never exceeds the degree
        return FixtureResult(label, ns.index, True, None, [], expected_weights,
                             f"code wrong: index {ns.index} exceeds the degree {want}", None, slope)
    if ns.index < want:
        return FixtureResult(label, ns.index, True, None, [], expected_weights,
                             f"fixture wrong: index {ns.index}, expected {want} (extension not abelian of that degree)",
                             None, slope)
    char = character_from_tower_power(T.p, T.f, T, data["character"]["pi_power"])
    bd = basis_data(char, T)
    cv = class_from_norm_subgroup(ns, bd, expected_index=want)
    weights = [w.label() for w in class_weights(cv, data.get("twist", 0))]
    diagnosis = "ok"
    if expected_weights is not None and sorted(expected_weights) != weights:
        diagnosis = "mismatch: weights differ (index and Galois stability hold, so suspect the fixture data)"
    return FixtureResult(label, ns.index, True, cv, weights, expected_weights, diagnosis,
                         filtration_degree(cv), slope)
