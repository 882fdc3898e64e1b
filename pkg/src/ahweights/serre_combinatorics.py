"""Combinatorics of the Serre weight recipe.

Everything here is integer or finite-field bookkeeping: tame signatures,
jumps of the ramification filtration on cohomology, dependent pairs and
admissible index sets, the shift maps delta/mu, the weight-pair set W',
the distinguished index set J_max, and assembly of weight sets.

Indices of embeddings are integers mod f; embedding i is tau_0 composed
with the i-th power of Frobenius, so omega_{tau_i} = omega_{tau_0}^(p^i).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable

from .finite_field import FqElem


class CombinatoricsError(ValueError):
    pass


class BadSignature(CombinatoricsError):
    pass


class WeightNotInRecipe(CombinatoricsError):
    pass


class ReducibleInput(CombinatoricsError):
    pass


# ---------------------------------------------------------------------------
# signatures and characters


@dataclass(frozen=True)
class TameSignature:
    p: int
    digits: tuple

    def __post_init__(self):
        digits = tuple(int(a) for a in self.digits)
        object.__setattr__(self, "digits", digits)
        if not digits:
            raise BadSignature("empty signature")
        if any(a < 1 or a > self.p for a in digits):
            raise BadSignature(f"entries must lie in 1..{self.p}: {digits}")
        if all(a == self.p for a in digits):
            raise BadSignature("signature (p,...,p) is excluded")

    @property
    def f(self) -> int:
        return len(self.digits)

    def a(self, i: int) -> int:
        return self.digits[i % self.f]

    def n(self, i: int) -> int:
        return sum(self.a(i + j) * self.p ** j for j in range(self.f))

    @property
    def modulus(self) -> int:
        return self.p ** self.f - 1

    @property
    def exponent(self) -> int:
        """Inertial exponent of tau_0, reduced mod p^f - 1."""
        return self.n(0) % self.modulus

    @property
    def period(self) -> int:
        for k in range(1, self.f + 1):
            if self.f % k == 0 and self.rotate(k).digits == self.digits:
                return k
        return self.f

    @property
    def is_generic(self) -> bool:
        return all(a < self.p for a in self.digits)

    @property
    def is_primitive(self) -> bool:
        return self.period == self.f

    def rotate(self, k: int = 1) -> "TameSignature":
        """Frobenius acting k times: (a_0,...,a_{f-1}) -> (a_{f-k},...)."""
        f = self.f
        return TameSignature(self.p, tuple(self.digits[(i - k) % f] for i in range(f)))

    def canonical(self) -> "TameSignature":
        return min((self.rotate(k) for k in range(self.f)), key=lambda s: s.digits)

    def __str__(self):
        return "(" + ",".join(map(str, self.digits)) + ")"

    @classmethod
    def from_exponent(cls, p: int, f: int, n: int) -> "TameSignature":
        """Signature whose n_0 is congruent to n mod p^f - 1."""
        q1 = p ** f - 1
        base = q1 // (p - 1)  # the all-ones value
        r = (n - base) % q1
        digits = []
        for _ in range(f):
            digits.append(r % p + 1)
            r //= p
        return cls(p, tuple(digits))


@dataclass(frozen=True)
class GaloisCharData:
    """A character chi = mu * omega_f^n, with omega_f attached to a root of x^(p^f-1) = -p.

    ``unramified`` is mu(Frob_K) or None when mu is trivial.
    """

    signature: TameSignature
    unramified: FqElem | None = None

    def __post_init__(self):
        if self.unramified is not None and self.unramified == self.unramified.field.one():
            object.__setattr__(self, "unramified", None)

    @property
    def p(self):
        return self.signature.p

    @property
    def f(self):
        return self.signature.f

    @property
    def inertia_trivial(self) -> bool:
        return all(a == self.p - 1 for a in self.signature.digits)

    @property
    def inertia_cyclotomic(self) -> bool:
        return all(a == 1 for a in self.signature.digits)

    @property
    def is_trivial(self) -> bool:
        return self.inertia_trivial and self.unramified is None

    @property
    def is_cyclotomic(self) -> bool:
        return self.inertia_cyclotomic and self.unramified is None

    def quotient(self, other: "GaloisCharData") -> "GaloisCharData":
        """The character self * other^{-1}."""
        if other.p != self.p or other.f != self.f:
            raise CombinatoricsError("characters of different fields")
        sig = TameSignature.from_exponent(
            self.p, self.f, self.signature.exponent - other.signature.exponent
        )
        mu = _unram_ratio(self.unramified, other.unramified)
        return GaloisCharData(sig, mu)

    @classmethod
    def trivial(cls, p: int, f: int) -> "GaloisCharData":
        return cls(TameSignature(p, (p - 1,) * f))

    @classmethod
    def of(cls, p: int, sig: Iterable[int], unramified=None) -> "GaloisCharData":
        return cls(TameSignature(p, tuple(sig)), unramified)


def _unram_ratio(x, y):
    if y is None:
        return x
    if x is None:
        return y.inverse()
    return x / y


# ---------------------------------------------------------------------------
# ramification filtration


@dataclass(frozen=True)
class FiltrationProfile:
    jumps: dict  # Fraction -> dimension of the graded piece
    trivial: bool
    cyclotomic: bool

    @property
    def total(self) -> int:
        return sum(self.jumps.values())

    def dim_at_most(self, s) -> int:
        return sum(d for t, d in self.jumps.items() if t <= s)

    def dim_below(self, s) -> int:
        return sum(d for t, d in self.jumps.items() if t < s)

    def to_json(self):
        return {
            "jumps": {str(k): v for k, v in sorted(self.jumps.items())},
            "trivial": self.trivial,
            "cyclotomic": self.cyclotomic,
            "total": self.total,
        }


def _flags(char_or_sig, trivial, cyclotomic):
    if isinstance(char_or_sig, GaloisCharData):
        sig = char_or_sig.signature
        trivial = char_or_sig.is_trivial if trivial is None else trivial
        cyclotomic = char_or_sig.is_cyclotomic if cyclotomic is None else cyclotomic
    else:
        sig = char_or_sig
        trivial = bool(trivial)
        cyclotomic = bool(cyclotomic)
    return sig, trivial, cyclotomic


def gentle_jump(sig: TameSignature, i: int) -> Fraction:
    """Jump in 1 < s < p/(p-1) attached to an index with a_i = p."""
    p, f = sig.p, sig.f
    k = 1
    while sig.a(i + k) == p - 1 and k < f:
        k += 1
    return Fraction(sig.n(i + k), sig.modulus)


def filtration_dims(char_or_sig, trivial: bool | None = None, cyclotomic: bool | None = None) -> FiltrationProfile:
    """Dimensions of the graded pieces of the ramification filtration on H^1."""
    sig, trivial, cyclotomic = _flags(char_or_sig, trivial, cyclotomic)
    p, f = sig.p, sig.f
    jumps: dict = {}

    def bump(s):
        jumps[s] = jumps.get(s, 0) + 1

    if trivial:
        bump(Fraction(0))
    for i in range(f):
        if sig.a(i) == p:
            bump(gentle_jump(sig, i))
        else:
            bump(1 + Fraction(sig.n(i), sig.modulus))
    if cyclotomic:
        bump(1 + Fraction(p, p - 1))
    return FiltrationProfile(jumps, trivial, cyclotomic)


def subspace_dims(char_or_sig, trivial=None, cyclotomic=None) -> dict:
    """Dimensions of the unramified, gentle, flat, cogent and typical subspaces."""
    prof = filtration_dims(char_or_sig, trivial, cyclotomic)
    p = (char_or_sig.signature if isinstance(char_or_sig, GaloisCharData) else char_or_sig).p
    flat = Fraction(p, p - 1)
    return {
        "un": prof.dim_at_most(Fraction(1)),
        "gt": prof.dim_below(flat),
        "fl": prof.dim_at_most(flat),
        "cg": prof.dim_at_most(Fraction(2)),
        "ty": prof.dim_below(1 + flat),
        "total": prof.total,
    }


# ---------------------------------------------------------------------------
# basis levels, dependent pairs, admissibility


def shifted_level(sig: TameSignature, i: int) -> tuple:
    """(index of tau_i', n_i'/e) for the basis element u_i.

    The ratio n_i'/e does not depend on the tower, so it is returned as a Fraction.
    """
    p, f = sig.p, sig.f
    if sig.a(i + 1) != p:
        return (i + 1) % f, Fraction(sig.n(i + 1), sig.modulus)
    j = i + 1
    while sig.a(j + 1) == p - 1 and j < i + f:
        j += 1
    return (j + 1) % f, Fraction(sig.n(j + 1), sig.modulus) - 1


def dependent_pairs(sig: TameSignature) -> set:
    p, f = sig.p, sig.f
    pairs = set()
    for i in range(f):
        if sig.a(i + 1) != p:
            continue
        for t in range(1, f):
            if sig.a(i + t + 1) == p:
                continue
            for s in range(1, t + 1):
                if all(sig.a(i + r) == p - 1 for r in range(2, s + 1)) and all(
                    sig.a(i + r) == p for r in range(s + 1, t + 1)
                ):
                    pairs.add((i % f, (i + t) % f))
                    break
    return pairs


def is_admissible(sig: TameSignature, J: Iterable[int]) -> bool:
    Jset = {j % sig.f for j in J}
    return all(src in Jset for src, dst in dependent_pairs(sig) if dst in Jset)


def all_subsets(f: int):
    for mask in range(1 << f):
        yield frozenset(i for i in range(f) if mask >> i & 1)


# ---------------------------------------------------------------------------
# delta and mu


def delta(sig: TameSignature, j: int) -> int:
    """Chain retraction on integers: j -> i when (a_{i+1},...,a_j) = (p, p-1, ..., p-1)."""
    p, f = sig.p, sig.f
    k = j
    while sig.a(k) == p - 1 and j - k < f:
        k -= 1
    if sig.a(k) == p and j - k < f:
        return k - 1
    return j


def _mu_from(sig: TameSignature, Jset: frozenset, i1: int) -> frozenset:
    f = sig.f
    j1 = next(j for j in range(i1 + 1, i1 + f + 1) if j % f in Jset and delta(sig, j) == i1)
    js = sorted(j1 + ((j - j1) % f) for j in Jset)
    chosen = [i1]
    for jk in js[1:]:
        dj = delta(sig, jk)
        chosen.append(dj if chosen[-1] < dj else jk)
    return frozenset(i % f for i in chosen)


def mu_candidates(sig: TameSignature, J: Iterable[int]) -> list:
    """mu(J) computed for every admissible choice of the starting index i_1."""
    Jset = frozenset(j % sig.f for j in J)
    dJ = {delta(sig, j) % sig.f for j in Jset}
    if dJ <= Jset:
        return [Jset]
    return [_mu_from(sig, Jset, i1) for i1 in sorted(dJ - Jset)]


def mu_shift(sig: TameSignature, J: Iterable[int]) -> frozenset:
    return mu_candidates(sig, J)[0]


# ---------------------------------------------------------------------------
# Serre weights and W'


@dataclass(frozen=True, order=True)
class SerreWeight:
    d: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(self.d))
        object.__setattr__(self, "b", tuple(self.b))

    def validate(self, p: int):
        if len(self.d) != len(self.b):
            raise CombinatoricsError("d and b lengths differ")
        if any(x < 0 or x > p - 1 for x in self.d) or all(x == p - 1 for x in self.d):
            raise CombinatoricsError(f"d out of normal range: {self.d}")
        if any(x < 1 or x > p for x in self.b):
            raise CombinatoricsError(f"b out of range: {self.b}")
        return self

    def label(self) -> str:
        return "[" + ",".join(map(str, self.d)) + ";" + ",".join(map(str, self.b)) + "]"

    __str__ = label

    @classmethod
    def parse(cls, text: str) -> "SerreWeight":
        body = text.strip().strip("[]")
        dpart, bpart = body.split(";")
        return cls(tuple(int(x) for x in dpart.split(",")), tuple(int(x) for x in bpart.split(",")))


def _digits_of(value: int, p: int, f: int) -> tuple:
    out = []
    for _ in range(f):
        out.append(value % p)
        value //= p
    return tuple(out)


def _pow_sum(vec, p, indices) -> int:
    return sum(vec[i] * p ** i for i in indices)


def twist_weight(V: SerreWeight, p: int, shift: int) -> SerreWeight:
    """V tensored with the determinant power whose inertial exponent is ``shift``."""
    f = len(V.d)
    q1 = p ** f - 1
    D = (_pow_sum(V.d, p, range(f)) + shift) % q1
    return SerreWeight(_digits_of(D, p, f), V.b)


def weight_pairs(chi1: GaloisCharData, chi2: GaloisCharData) -> list:
    """All (V, J) with the two inertial congruences, sorted for determinism."""
    return _weight_pairs_exp(chi1.p, chi1.f, chi1.signature.exponent, chi2.signature.exponent)


def _weight_pairs_exp(p: int, f: int, e1: int, e2: int) -> list:
    q1 = p ** f - 1
    subsets = list(all_subsets(f))
    out = []
    for b in product(range(1, p + 1), repeat=f):
        for J in subsets:
            BJ = _pow_sum(b, p, J)
            BC = _pow_sum(b, p, (i for i in range(f) if i not in J))
            if (BJ - BC - e1 + e2) % q1:
                continue
            D = (e1 - BJ) % q1
            out.append((SerreWeight(_digits_of(D, p, f), b), J))
    out.sort(key=lambda vj: (vj[0], sorted(vj[1])))
    return out


def pairs_for_weight(V: SerreWeight, chi1: GaloisCharData, chi2: GaloisCharData) -> list:
    p, f = chi1.p, chi1.f
    q1 = p ** f - 1
    D = _pow_sum(V.d, p, range(f))
    e1, e2 = chi1.signature.exponent, chi2.signature.exponent
    out = []
    for J in all_subsets(f):
        BJ = _pow_sum(V.b, p, J)
        BC = _pow_sum(V.b, p, (i for i in range(f) if i not in J))
        if (D + BJ - e1) % q1 == 0 and (D + BC - e2) % q1 == 0:
            out.append(J)
    return out


def _chain_exclusion_ok(b: tuple, p: int, J: frozenset) -> bool:
    f = len(b)
    for i in range(f):
        if b[i] != p:
            continue
        for j in range(i + 1, i + f):
            bj = b[j % f]
            if bj == 1 and all(k % f not in J for k in range(i, j)) and j % f in J:
                return False
            if bj != p - 1:
                break
    return True


def _nonempty_ok(b: tuple, p: int, J: frozenset) -> bool:
    forced = all(x == p - 1 for x in b) or (p == 2 and all(x == 2 for x in b))
    return bool(J) or not forced


def j_max(V: SerreWeight, chi1: GaloisCharData, chi2: GaloisCharData):
    """The distinguished J for V, or None when V is not in any pair."""
    p = chi1.p
    cands = [
        J
        for J in pairs_for_weight(V, chi1, chi2)
        if _chain_exclusion_ok(V.b, p, J) and _nonempty_ok(V.b, p, J)
    ]
    if not cands:
        if pairs_for_weight(V, chi1, chi2):
            raise CombinatoricsError(f"no candidate J for {V} satisfies the J_max conditions")
        return None
    if len(cands) > 1:
        raise CombinatoricsError(f"J_max not unique for {V}: {cands}")
    return cands[0]


@dataclass(frozen=True)
class LvAhDescriptor:
    indices: frozenset
    include_unramified: bool
    full_space: bool

    def to_json(self):
        return {
            "indices": sorted(self.indices),
            "include_unramified": self.include_unramified,
            "full_space": self.full_space,
        }


def lv_ah_descriptor(V: SerreWeight, chi1: GaloisCharData, chi2: GaloisCharData) -> LvAhDescriptor:
    J = j_max(V, chi1, chi2)
    if J is None:
        raise WeightNotInRecipe(str(V))
    chi = chi1.quotient(chi2)
    f, p = chi.f, chi.p
    full = chi.is_cyclotomic and len(J) == f and all(x == p for x in V.b)
    return LvAhDescriptor(mu_shift(chi.signature, J), chi.is_trivial, full)


# ---------------------------------------------------------------------------
# membership oracles


UNRAMIFIED = "un"
TRACE = "tr"


def basis_labels(chi: GaloisCharData) -> list:
    labels = list(range(chi.f))
    if chi.is_trivial:
        labels.append(UNRAMIFIED)
    if chi.is_cyclotomic:
        labels.append(TRACE)
    return labels


def support_in_descriptor(support: Iterable, desc: LvAhDescriptor) -> bool:
    if desc.full_space:
        return True
    allowed = set(desc.indices)
    if desc.include_unramified:
        allowed.add(UNRAMIFIED)
    return set(support) <= allowed


@dataclass(frozen=True)
class SupportClass:
    """Symbolic class given by its support in the c-basis."""

    support: frozenset = field(default_factory=frozenset)

    def __call__(self, desc: LvAhDescriptor) -> bool:
        return support_in_descriptor(self.support, desc)


def zero_class(desc: LvAhDescriptor) -> bool:
    return True


def generic_class_oracle(chi: GaloisCharData) -> Callable:
    """A class lying in no proper distinguished subspace."""
    return SupportClass(frozenset(basis_labels(chi)))


def oracle_from_name(name: str, chi: GaloisCharData) -> Callable:
    if name == "zero":
        return zero_class
    if name == "generic":
        return generic_class_oracle(chi)
    labels = []
    for tok in name.split(","):
        tok = tok.strip()
        if tok in (UNRAMIFIED, TRACE):
            labels.append(tok)
        elif tok:
            labels.append(int(tok) % chi.f)
    return SupportClass(frozenset(labels))


def weights_reducible(chi1: GaloisCharData, chi2: GaloisCharData, membership: Callable) -> list:
    """Sorted weights V with (V, J) in W' for some J and the class inside L_V^AH."""
    seen = sorted({V for V, _ in weight_pairs(chi1, chi2)})
    return [V for V in seen if membership(lv_ah_descriptor(V, chi1, chi2))]


def weights_irreducible(p: int, f: int, exponent: int) -> list:
    """Weights of an irreducible representation with inertia psi^a + psi^(p^f a).

    psi is the fundamental character of niveau 2f attached to the chosen embedding
    of the quadratic extension of the residue field.
    """
    q = p ** f
    big = q * q - 1
    a = exponent % big
    if a % (q + 1) == 0:
        raise ReducibleInput(f"exponent {exponent} is divisible by p^f+1")
    out = set()
    lifts = list(product((0, 1), repeat=f))
    for d in product(range(p), repeat=f):
        if all(x == p - 1 for x in d):
            continue
        D = _pow_sum(d, p, range(f)) * (q + 1)
        for b in product(range(1, p + 1), repeat=f):
            for choice in lifts:
                B = sum(b[i] * p ** (i + f * choice[i]) for i in range(f))
                if (D + B - a) % big == 0:
                    out.add(SerreWeight(d, b))
                    break
    return sorted(out)


# ---------------------------------------------------------------------------
# the classical table for K = Q_p

QP_KINDS = ("nonsplit", "split", "peu-ramifiee", "not-peu-ramifiee")


def weights_qp(p: int, a: int, kind: str, chi_is_cyclotomic: bool = False, chi_is_trivial: bool = False) -> list:
    """Weight set of rho = (chi *; 0 1) over Q_p with chi|_I = omega^a."""
    if p < 3 or not 1 <= a <= p - 1:
        raise CombinatoricsError("need p >= 3 and 1 <= a <= p-1")
    if kind not in QP_KINDS:
        raise CombinatoricsError(f"unknown class kind {kind!r}")
    if chi_is_cyclotomic and a != 1:
        raise CombinatoricsError("cyclotomic chi forces a = 1")
    if chi_is_trivial and a != p - 1:
        raise CombinatoricsError("trivial chi forces a = p-1")
    if kind in ("peu-ramifiee", "not-peu-ramifiee") and not chi_is_cyclotomic:
        raise CombinatoricsError("peu ramifiee classes only make sense for chi cyclotomic")
    if kind == "nonsplit" and chi_is_cyclotomic:
        raise CombinatoricsError("for chi cyclotomic say peu-ramifiee or not-peu-ramifiee")

    def V(d, b):
        return SerreWeight((d,), (b,))

    split = kind == "split"
    if 1 < a < p - 1 and not split:
        res = [V(0, a)]
    elif 1 < a < p - 2 and split:
        res = [V(0, a), V(a, p - 1 - a)]
    elif a == p - 2 and p > 3 and split:
        res = [V(0, p - 2), V(p - 2, p), V(p - 2, 1)]
    elif a == p - 1:
        res = [V(0, p - 1)]
    elif a == 1 and chi_is_cyclotomic and kind == "not-peu-ramifiee":
        res = [V(0, p)]
    elif a == 1 and p > 3 and split:
        res = [V(0, p), V(0, 1), V(1, p - 2)]
    elif a == 1 and p == 3 and split:
        res = [V(0, 3), V(0, 1), V(1, 3), V(1, 1)]
    else:
        res = [V(0, p), V(0, 1)]
    return sorted(res)


def qp_kind_support(kind: str, chi: GaloisCharData) -> frozenset:
    """A representative class support realising a class kind at f = 1."""
    if kind == "split":
        return frozenset()
    if kind == "not-peu-ramifiee":
        return frozenset({0, TRACE})
    return frozenset({0})
