"""Unramified p-adic rings W(l)/p^N, truncated power series, and the Artin-Hasse exponential.

The lifted modulus of W(l)/p^N is the minimal polynomial of the Teichmuller
lift of the residue generator.  With that choice the polynomial generator t
is itself a Teichmuller representative, so Frobenius is simply t -> t^p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .finite_field import FqConfig, FqElem, field_create, frobenius


class PadicError(ArithmeticError):
    pass


class PrecisionLoss(PadicError):
    pass


class InexactDivision(PadicError):
    pass


class IdentityFailed(PadicError):
    def __init__(self, message, index=None, lhs=None, rhs=None):
        super().__init__(message)
        self.index = index
        self.lhs = lhs
        self.rhs = rhs


class ValuationTooSmall(PadicError):
    pass


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# raw polynomial helpers over Z/p^N (lists of ints, constant term first)


def _mulmod(a, b, modulus, pN):
    m = len(modulus) - 1
    prod = [0] * (2 * m - 1)
    _accumulate(prod, a, b)
    return _reduce(prod, modulus, pN)


def _accumulate(prod, a, b):
    """prod += a * b as integer polynomials (no reduction)."""
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y


def _reduce(prod, modulus, pN):
    m = len(modulus) - 1
    for k in range(2 * m - 2, m - 1, -1):
        c = prod[k]
        if c:
            base = k - m
            for i in range(m):
                prod[base + i] -= c * modulus[i]
    return tuple(c % pN for c in prod[:m])


class WittRing:
    """W(l)/p^N presented as (Z/p^N)[t]/(P(t)) with P the Teichmuller minimal polynomial."""

    def __init__(self, base: FqConfig, N: int, modulus: Sequence[int]):
        self.base = base
        self.p = base.p
        self.m = base.m
        self.N = N
        self.pN = base.p ** N
        self.modulus = tuple(int(c) % self.pN for c in modulus)
        if tuple(c % self.p for c in self.modulus) != base.modulus:
            raise PadicError("lifted modulus does not reduce to the residue modulus")
        self._frob_images = None

    def __repr__(self):
        return f"WittRing(F_{self.p}^{self.m}, N={self.N})"

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, WittRing) and self.base == other.base and self.N == other.N

    def __hash__(self):
        return hash((self.base, self.N))

    # element constructors
    def __call__(self, value) -> "WittElem":
        if isinstance(value, WittElem):
            if value.ring.base != self.base:
                raise PadicError("coefficient ring mismatch")
            return WittElem(self, tuple(c % self.pN for c in value.coeffs))
        if isinstance(value, int):
            return WittElem(self, (value % self.pN,) + (0,) * (self.m - 1))
        if isinstance(value, Fraction):
            num = value.numerator
            den = value.denominator
            if den % self.p == 0:
                raise PrecisionLoss(f"denominator {den} divisible by p")
            return self(num * pow(den, -1, self.pN))
        coeffs = [int(c) % self.pN for c in value]
        coeffs += [0] * (self.m - len(coeffs))
        return WittElem(self, tuple(coeffs))

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def gen(self):
        if self.m == 1:
            return self(-self.modulus[0])
        return WittElem(self, (0, 1) + (0,) * (self.m - 2))

    def with_precision(self, N: int) -> "WittRing":
        return witt_ring(self.base, N)

    def lift(self, a: FqElem) -> "WittElem":
        """Naive coefficientwise lift of a residue."""
        return WittElem(self, tuple(a.coeffs))

    def frob_images(self):
        """phi(t^i) for i < m, as raw coefficient tuples."""
        if self._frob_images is None:
            t = self.gen()
            tp = t ** self.p
            imgs = []
            y = self.one()
            for _ in range(self.m):
                imgs.append(y.coeffs)
                y = y * tp
            self._frob_images = imgs
        return self._frob_images


class WittElem:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: WittRing, coeffs: tuple):
        self.ring = ring
        self.coeffs = coeffs

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring(other)
        return isinstance(other, WittElem) and self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def __repr__(self):
        return f"WittElem({list(self.coeffs)} mod {self.ring.p}^{self.ring.N})"

    def is_zero(self):
        return not any(self.coeffs)

    def _co(self, other):
        if isinstance(other, WittElem):
            if other.ring is not self.ring and other.ring != self.ring:
                raise PadicError("ring mismatch")
            return other
        return self.ring(other)

    def __add__(self, other):
        o = self._co(other)
        pN = self.ring.pN
        return WittElem(self.ring, tuple((a + b) % pN for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        pN = self.ring.pN
        return WittElem(self.ring, tuple((-a) % pN for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        o = self._co(other)
        R = self.ring
        if R.m == 1:
            return WittElem(R, (self.coeffs[0] * o.coeffs[0] % R.pN,))
        return WittElem(R, _mulmod(self.coeffs, o.coeffs, R.modulus, R.pN))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def residue(self) -> FqElem:
        return self.ring.base(self.coeffs)

    def valuation(self) -> int:
        """min v_p of the coefficients; N for zero."""
        p, N = self.ring.p, self.ring.N
        best = N
        for c in self.coeffs:
            if c:
                best = min(best, vp_int(c, p))
        return best

    def is_unit(self):
        return not self.residue().is_zero()

    def inverse(self):
        if not self.is_unit():
            raise PadicError("not a unit")
        R = self.ring
        # Newton iteration starting from the residue inverse
        y = R.lift(self.residue().inverse())
        prec = 1
        while prec < R.N:
            y = y * (2 - self * y)
            prec *= 2
        return y

    def __truediv__(self, other):
        return self * self._co(other).inverse()

    def frobenius(self, k: int = 1) -> "WittElem":
        y = self
        for _ in range(k % self.ring.m if self.ring.m > 1 else 0):
            y = y._frob1()
        return y

    def _frob1(self):
        R = self.ring
        pN = R.pN
        out = [0] * R.m
        for c, img in zip(self.coeffs, R.frob_images()):
            if c:
                for i, v in enumerate(img):
                    out[i] += c * v
        return WittElem(R, tuple(x % pN for x in out))

    def divide_by_p(self, k: int = 1) -> "WittElem":
        """Exact division by p^k; the result lives in precision N-k."""
        p = self.ring.p
        q = p ** k
        for c in self.coeffs:
            if c % q:
                raise InexactDivision(f"{self} is not divisible by {p}^{k}")
        R2 = self.ring.with_precision(self.ring.N - k)
        return WittElem(R2, tuple((c // q) % R2.pN for c in self.coeffs))

    def reduce(self, N: int) -> "WittElem":
        return self.ring.with_precision(N)(self)

    def to_list(self):
        return list(self.coeffs)


def _naive_ring(base: FqConfig, N: int) -> WittRing:
    return WittRing(base, N, base.modulus)


@lru_cache(maxsize=None)
def witt_ring(base: FqConfig, N: int) -> WittRing:
    """The ring W(base)/p^N with Teichmuller-normalized generator."""
    if N < 1:
        raise PadicError("precision must be >= 1")
    if base.m == 1:
        R0 = _naive_ring(base, N)
        c = base.gen()
        tc = _teich_iterate(R0, R0.lift(c))
        return WittRing(base, N, ((-tc.coeffs[0]) % R0.pN, 1))
    R0 = _naive_ring(base, N)
    T = _teich_iterate(R0, R0.gen())
    # minimal polynomial prod_i (x - T^{p^i}) with coefficients in Z/p^N
    poly = [R0.one()]
    conj = T
    for _ in range(base.m):
        new = [R0.zero()] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] = new[i + 1] + c
            new[i] = new[i] - c * conj
        poly = new
        conj = conj ** base.p
    coeffs = []
    for c in poly:
        if any(c.coeffs[1:]):
            raise PadicError("Teichmuller minimal polynomial is not rational")  # cannot happen
        coeffs.append(c.coeffs[0])
    return WittRing(base, N, coeffs)


def _teich_iterate(R: WittRing, w: WittElem) -> WittElem:
    q = R.p ** R.m
    for _ in range(R.N):
        nxt = w ** q
        if nxt == w:
            break
        w = nxt
    return w


_TEICH_CACHE: dict = {}


def teichmuller(a: FqElem, ring: WittRing) -> WittElem:
    if a.field != ring.base:
        raise PadicError("residue not in the ring's residue field")
    key = (ring.base, ring.N, a.coeffs)
    hit = _TEICH_CACHE.get(key)
    if hit is None:
        hit = _teich_iterate(ring, ring.lift(a))
        _TEICH_CACHE[key] = hit
    return hit


# ---------------------------------------------------------------------------
# Artin-Hasse exponential


@lru_cache(maxsize=None)
def artin_hasse_rational(p: int, M: int) -> tuple:
    """Exact coefficients of E_p(x) up to x^{M-1}.

    From E'/E = sum_k x^{p^k - 1}:  n c_n = sum_{p^k <= n} c_{n - p^k}.
    """
    c = [Fraction(1)]
    for n in range(1, M):
        s = Fraction(0)
        q = 1
        while q <= n:
            s += c[n - q]
            q *= p
        c.append(s / n)
    return tuple(c)


@lru_cache(maxsize=None)
def artin_hasse_int(p: int, N: int, M: int) -> tuple:
    """Coefficients of E_p mod p^N as integers."""
    pN = p ** N
    out = []
    for k, c in enumerate(artin_hasse_rational(p, M)):
        if c.denominator % p == 0:
            raise PrecisionLoss(f"coefficient {k} of E_{p} has denominator divisible by p")
        out.append(c.numerator * pow(c.denominator, -1, pN) % pN)
    return tuple(out)


class TruncSeries:
    """Power series over W(l)/p^N modulo x^M."""

    __slots__ = ("ring", "M", "coeffs")

    def __init__(self, ring: WittRing, M: int, coeffs):
        self.ring = ring
        self.M = M
        cs = [ring(c) if not isinstance(c, WittElem) else c for c in list(coeffs)[:M]]
        cs += [ring.zero()] * (M - len(cs))
        self.coeffs = cs

    @classmethod
    def one(cls, ring, M):
        return cls(ring, M, [ring.one()])

    def __eq__(self, other):
        return (
            isinstance(other, TruncSeries)
            and self.M == other.M
            and self.ring == other.ring
            and all(a == b for a, b in zip(self.coeffs, other.coeffs))
        )

    def first_difference(self, other):
        for i, (a, b) in enumerate(zip(self.coeffs, other.coeffs)):
            if a != b:
                return i
        return None

    def __mul__(self, other: "TruncSeries"):
        M = self.M
        R = self.ring
        width = 2 * R.m - 1
        acc = [[0] * width for _ in range(M)]
        nz_a = [(i, x.coeffs) for i, x in enumerate(self.coeffs) if not x.is_zero()]
        nz_b = [(j, y.coeffs) for j, y in enumerate(other.coeffs) if not y.is_zero()]
        for i, x in nz_a:
            for j, y in nz_b:
                if i + j >= M:
                    break
                _accumulate(acc[i + j], x, y)
        return TruncSeries(R, M, [WittElem(R, _reduce(c, R.modulus, R.pN)) for c in acc])

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = TruncSeries.one(self.ring, self.M)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        c0 = self.coeffs[0]
        if not c0.is_unit():
            raise PadicError("series is not a unit")
        inv0 = c0.inverse()
        R = self.ring
        width = 2 * R.m - 1
        nz = [(k, c.coeffs) for k, c in enumerate(self.coeffs) if k and not c.is_zero()]
        out = [inv0]
        for n in range(1, self.M):
            acc = [0] * width
            for k, c in nz:
                if k > n:
                    break
                _accumulate(acc, c, out[n - k].coeffs)
            s = WittElem(R, _reduce(acc, R.modulus, R.pN))
            out.append(-(s * inv0))
        return TruncSeries(R, self.M, out)

    def to_json(self):
        return {
            "p": self.ring.p,
            "N": self.ring.N,
            "M": self.M,
            "coeffs": [c.to_list() for c in self.coeffs],
        }

    def __repr__(self):
        return f"TruncSeries(M={self.M}, {[c.to_list() for c in self.coeffs]})"


def artin_hasse(ring: WittRing, M: int) -> TruncSeries:
    ints = artin_hasse_int(ring.p, ring.N, M)
    return TruncSeries(ring, M, [ring(c) for c in ints])


def ah_substitute(ring: WittRing, M: int, scalar: WittElem, step: int = 1) -> TruncSeries:
    """E(scalar * x^step) mod x^M."""
    ints = artin_hasse_int(ring.p, ring.N, M)
    out = [ring.zero()] * M
    power = ring.one()
    for k in range(0, (M - 1) // step + 1):
        out[k * step] = power * ints[k]
        power = power * scalar
    return TruncSeries(ring, M, out)


# ---------------------------------------------------------------------------
# delta sequence and lemma verifiers


def ah_delta_sequence(a: FqElem, b: FqElem, ring: WittRing, count: int):
    """delta_0..delta_count (count+1 values) mod p^N.

    Work happens at precision N + count + 1 so that every division by p^n is
    carried out exactly; the results are then reduced to the ring's precision.
    """
    p = ring.p
    if ring.N < 1:
        raise PadicError("precision must be positive")
    W = ring.with_precision(ring.N + count + 1)
    s = teichmuller(a, W) + teichmuller(b, W) - teichmuller(a + b, W)
    delta0 = s.divide_by_p(1)
    # keep everything in W by re-lifting (top digit is unknown but irrelevant)
    deltas = [W(delta0.coeffs)]
    for n in range(1, count + 1):
        acc = W(deltas[0]).frobenius(n)
        for i in range(n):
            acc = acc - (p ** i) * deltas[i] ** (p ** (n - i))
        d = acc.divide_by_p(n)
        deltas.append(W(d.coeffs))
    # each division by p^n costs n digits of the working precision W.N
    return [W.with_precision(ring.N)(d) for d in deltas]


@dataclass
class VerificationWitness:
    lemma: str
    passed: bool
    witness: TruncSeries | None = None
    first_mismatch: int | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self):
        out = {"lemma": self.lemma, "passed": self.passed}
        if not self.passed:
            out["first_mismatch"] = self.first_mismatch
            if self.witness is not None:
                out["witness"] = self.witness.to_json()
        out.update(self.detail)
        return out


def _max_index(p: int, M: int) -> int:
    n = 0
    while p ** (n + 1) < M:
        n += 1
    return n


def verify_ah_multiplicativity(a: FqElem, b: FqElem, N: int, M: int, strict: bool = True):
    R = witt_ring(a.field, N)
    p = R.p
    n_max = _max_index(p, M)
    deltas = ah_delta_sequence(a, b, R, n_max)
    f = TruncSeries.one(R, M)
    for i, d in enumerate(deltas):
        f = f * ah_substitute(R, M, d, p ** i)
    lhs = (f ** p) * ah_substitute(R, M, teichmuller(a + b, R))
    rhs = ah_substitute(R, M, teichmuller(a, R)) * ah_substitute(R, M, teichmuller(b, R))
    diff = lhs.first_difference(rhs)
    wit = VerificationWitness("multiplicativity", diff is None, f, diff)
    if diff is not None and strict:
        raise IdentityFailed(
            f"multiplicativity fails at x^{diff}", diff, lhs.coeffs[diff], rhs.coeffs[diff]
        )
    return wit


def verify_ah_scaling(delta: WittElem, N: int, M: int, strict: bool = True):
    base = delta.ring.base
    p = base.p
    n_max = _max_index(p, M)
    # v_p(k!) for k < M bounds the precision needed for exp coefficients
    extra = sum(M // p ** j for j in range(1, 10)) + n_max + 2
    W = witt_ring(base, N + extra)
    d = W(delta.coeffs)
    one_pd = W.one() + p * d
    witness_parts = []
    for n in range(n_max + 1):
        a_n = (one_pd ** (p ** n) - 1).divide_by_p(n) if n else one_pd - 1
        a_n = W(a_n.coeffs)
        b_n = W.zero()
        for j in range(n + 1):
            b_n = b_n + (p ** (p ** j - j)) * d ** (p ** j)
        c_n = W((b_n - a_n).divide_by_p(1).coeffs)
        witness_parts.append((n, c_n))
    R = witt_ring(base, N)
    witness = TruncSeries.one(R, M)
    for n, c_n in witness_parts:
        witness = witness * _exp_series_witt(c_n, R, M, p ** n)
    lhs = artin_hasse(R, M) * ah_substitute(R, M, R(one_pd.coeffs)).inverse()
    pd = R(d.coeffs) * p
    for m in range(n_max + 1):
        lhs = lhs * ah_substitute(R, M, pd, p ** m)
    rhs = witness ** p
    diff = lhs.first_difference(rhs)
    wit = VerificationWitness("scaling", diff is None, witness, diff)
    if diff is not None and strict:
        raise IdentityFailed(f"scaling identity fails at x^{diff}", diff)
    return wit


def _exp_series_witt(c: WittElem, R: WittRing, M: int, step: int) -> TruncSeries:
    """exp(c x^step) mod (p^R.N, x^M) for c in p W(l) known at higher precision."""
    p = R.p
    W = c.ring
    out = [R.zero()] * M
    k = 0
    fact = 1
    power = W.one()
    while k * step < M:
        if k:
            fact *= k
            power = power * c
        vf = vp_int(fact, p)
        if vf > W.N - R.N:
            raise PrecisionLoss("insufficient working precision for exp")
        q = power.divide_by_p(vf) if vf else power
        unit = fact // p ** vf
        out[k * step] = R(q.coeffs) * pow(unit, -1, R.pN)
        k += 1
    return TruncSeries(R, M, out)


def check_shift_valuation(v: Fraction, p: int) -> None:
    """Raise unless v > 1/(p(p-1)), the convergence condition of the Frobenius shift."""
    if Fraction(v) <= Fraction(1, p * (p - 1)):
        raise ValuationTooSmall(f"valuation {v} must exceed 1/{p * (p - 1)}")


def verify_frobenius_shift(beta, tower=None) -> bool:
    """Check that E(beta^p) / E(-p beta) is a p-th power in the tower containing beta."""
    from . import local_field as lf

    tower = tower or beta.tower
    v = Fraction(beta.valuation(), tower.e)
    check_shift_valuation(v, tower.p)
    p = tower.p
    num = lf.ah_eval(beta ** p, tower)
    den = lf.ah_eval(beta * (-p), tower)
    return lf.is_pth_power(num * den.inverse(), tower)
