"""Arithmetic in tame towers M = L(pi) with pi^e = u p, and unit digits modulo p-th powers.

An element of O_M / p^N is a vector (c_0, ..., c_{e-1}) of elements of
W(l)/p^N standing for sum c_j pi^j.  Coefficients are kept as raw integer
tuples for speed; WittElem objects are only built at the API boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .finite_field import (
    Embedding,
    FqElem,
    field_create,
    frobenius,
    trace_to_prime,
)
from .padic import (
    WittElem,
    artin_hasse_int,
    artin_hasse_rational,
    teichmuller,
    vp_int,
    witt_ring,
)


class LocalFieldError(ArithmeticError):
    pass


class BadRamification(LocalFieldError):
    pass


class BadUnramifiedDegree(LocalFieldError):
    pass


class PrecisionExceeded(LocalFieldError):
    pass


class NotAUnit(LocalFieldError):
    pass


# ---------------------------------------------------------------------------
# raw W(l)/p^N helpers on integer tuples


def _wmul(a, b, mod, m, pN):
    if m == 1:
        return (a[0] * b[0] % pN,)
    prod = [0] * (2 * m - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    for k in range(2 * m - 2, m - 1, -1):
        c = prod[k]
        if c:
            base = k - m
            for i in range(m):
                prod[base + i] -= c * mod[i]
    return tuple(c % pN for c in prod[:m])


def _wadd(a, b, pN):
    return tuple((x + y) % pN for x, y in zip(a, b))


def _wscale(a, s, pN):
    return tuple(x * s % pN for x in a)


class TameTower:
    """The field M = L(pi), pi^e = u p, with L/K unramified of degree g and [K:Q_p] = f."""

    def __init__(self, p, f, g, e, u, N):
        if g % p == 0:
            raise BadUnramifiedDegree(f"p divides g = {g}")
        if (p ** f - 1) % e:
            raise BadRamification(f"e = {e} does not divide {p}^{f} - 1")
        if N < 1:
            raise LocalFieldError("precision must be positive")
        self.p, self.f, self.g, self.e, self.N = p, f, g, e, N
        self.k = field_create(p, f)
        self.l = field_create(p, f * g)
        self.W = witt_ring(self.l, N)
        self.m = self.l.m
        self.pN = p ** N
        self.mod = self.W.modulus
        self.k_to_l = Embedding(self.k, self.l)
        self.u_spec = u
        self.u = self._unit_from_spec(u)
        if self.u[0] % p == 0 and all(c % p == 0 for c in self.u):
            raise LocalFieldError("u must be a unit")
        self.up = _wscale(self.u, p, self.pN)
        self.horizon = e * N
        # root of unity zeta generating mu_e(K), as a Teichmuller lift in W(l)
        gen_k = self.k.primitive_element
        self.zeta_residue_k = gen_k ** ((p ** f - 1) // e)
        self.zeta = teichmuller(self.k_to_l(self.zeta_residue_k), self.W).coeffs
        self._setup_levels()

    # -- construction helpers ------------------------------------------------
    def _unit_from_spec(self, u):
        W = self.W
        if isinstance(u, WittElem):
            if u.ring.base == self.l:
                return W(u).coeffs
            return self.embed_from_k(u).coeffs
        if isinstance(u, int):
            return W(u).coeffs
        if isinstance(u, dict) and "teich" in u:
            a = self.k.parse(u["teich"])
            return teichmuller(self.k_to_l(a), W).coeffs
        if isinstance(u, (list, tuple)):
            Wk = witt_ring(self.k, self.N)
            return self.embed_from_k(Wk(list(u))).coeffs
        raise LocalFieldError(f"cannot read unit specification {u!r}")

    def embed_from_k(self, x: WittElem) -> WittElem:
        """W(k) -> W(l) sending the Teichmuller generator of k to its image."""
        Wk = witt_ring(self.k, x.ring.N)
        Wl = witt_ring(self.l, x.ring.N)
        if self.k.m == 1:
            return Wl(x.coeffs[0])
        T = teichmuller(self.k_to_l(self.k.gen()), Wl)
        acc = Wl.zero()
        pw = Wl.one()
        for c in Wk(x).coeffs:
            acc = acc + pw * c
            pw = pw * T
        return acc

    def _setup_levels(self):
        p, e = self.p, self.e
        top = Fraction(e * p, p - 1)
        self.top_bound = top
        self.levels = [m for m in range(1, math.ceil(top)) if m % p]
        self.top_level = None
        self.top_constant = None
        if top.denominator == 1:
            # mu_p in M iff -1/u is a (p-1)-th power in l
            ubar = self.l(self.u)
            target = -ubar.inverse()
            gamma = None
            for x in self.l.elements():
                if not x.is_zero() and x ** (p - 1) == target:
                    gamma = x
                    break
            if gamma is not None:
                self.top_level = int(top)
                self.top_constant = gamma ** (-p)
        self.dim = len(self.levels) * self.m + (1 if self.top_level else 0) + 1

    def __repr__(self):
        return (
            f"TameTower(p={self.p}, f={self.f}, g={self.g}, e={self.e}, "
            f"u={list(self.u)}, N={self.N})"
        )

    def spec(self):
        return {"p": self.p, "f": self.f, "g": self.g, "e": self.e, "unit": self.u_spec, "precision": self.N}

    # -- element constructors -----------------------------------------------
    def zero_coeff(self):
        return (0,) * self.m

    def elem(self, coeffs) -> "LocalElem":
        cs = [tuple(c) if not isinstance(c, WittElem) else c.coeffs for c in coeffs]
        cs += [self.zero_coeff()] * (self.e - len(cs))
        return LocalElem(self, tuple(cs))

    def scalar(self, c) -> "LocalElem":
        if isinstance(c, int):
            w = self.W(c).coeffs
        elif isinstance(c, WittElem):
            w = self.W(c).coeffs if c.ring.base == self.l else self.embed_from_k(c).coeffs
        else:
            w = tuple(c)
        return LocalElem(self, (w,) + (self.zero_coeff(),) * (self.e - 1))

    def one(self):
        return self.scalar(1)

    def zero(self):
        return self.scalar(0)

    def uniformizer(self):
        return self.pi_power(1)

    def pi_power(self, n: int) -> "LocalElem":
        """pi^n for n >= 0."""
        q, r = divmod(n, self.e)
        coeff = self.W(1).coeffs
        for _ in range(q):
            coeff = _wmul(coeff, self.up, self.mod, self.m, self.pN)
        cs = [self.zero_coeff()] * self.e
        cs[r] = coeff
        return LocalElem(self, tuple(cs))

    def teich(self, a: FqElem) -> "LocalElem":
        if a.field == self.k and self.k != self.l:
            a = self.k_to_l(a)
        return self.scalar(teichmuller(a, self.W).coeffs)

    def monomial(self, w, n: int) -> "LocalElem":
        """w * pi^n with w a raw W(l) tuple."""
        x = self.pi_power(n)
        return x.scale(w)


class LocalElem:
    __slots__ = ("tower", "c")

    def __init__(self, tower: TameTower, c: tuple):
        self.tower = tower
        self.c = c

    def __eq__(self, other):
        return isinstance(other, LocalElem) and self.tower is other.tower and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"LocalElem({[list(x) for x in self.c]})"

    def to_json(self):
        return [list(x) for x in self.c]

    def coeff(self, j) -> WittElem:
        return WittElem(self.tower.W, self.c[j])

    def _co(self, other):
        if isinstance(other, LocalElem):
            return other
        return self.tower.scalar(other)

    def __add__(self, other):
        o = self._co(other)
        pN = self.tower.pN
        return LocalElem(self.tower, tuple(_wadd(a, b, pN) for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        pN = self.tower.pN
        return LocalElem(self.tower, tuple(tuple((-x) % pN for x in a) for a in self.c))

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def scale(self, w) -> "LocalElem":
        """Multiply by a W(l) scalar given as raw tuple."""
        T = self.tower
        return LocalElem(T, tuple(_wmul(a, w, T.mod, T.m, T.pN) for a in self.c))

    def __mul__(self, other):
        if isinstance(other, int):
            pN = self.tower.pN
            return LocalElem(self.tower, tuple(_wscale(a, other, pN) for a in self.c))
        o = self._co(other)
        T = self.tower
        e, m, pN, mod = T.e, T.m, T.pN, T.mod
        if m == 1:
            lo = [0] * e
            hi = [0] * e
            for i, (a,) in enumerate(self.c):
                if not a:
                    continue
                for j, (b,) in enumerate(o.c):
                    if b:
                        k = i + j
                        if k < e:
                            lo[k] += a * b
                        else:
                            hi[k - e] += a * b
            up = T.up[0]
            return LocalElem(T, tuple(((lo[k] + up * hi[k]) % pN,) for k in range(e)))
        lo = [[0] * (2 * m - 1) for _ in range(e)]
        hi = [[0] * (2 * m - 1) for _ in range(e)]
        for i, a in enumerate(self.c):
            if not any(a):
                continue
            for j, b in enumerate(o.c):
                if not any(b):
                    continue
                k = i + j
                tgt = lo[k] if k < e else hi[k - e]
                for s, x in enumerate(a):
                    if x:
                        for t, y in enumerate(b):
                            if y:
                                tgt[s + t] += x * y
        out = []
        for k in range(e):
            lo_k = _reduce_poly(lo[k], mod, m, pN)
            if any(hi[k]):
                hk = _reduce_poly(hi[k], mod, m, pN)
                lo_k = _wadd(lo_k, _wmul(hk, T.up, mod, m, pN), pN)
            out.append(lo_k)
        return LocalElem(T, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.tower.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- valuation and residues ------------------------------------------------
    def valuation(self) -> int:
        """v_pi, capped at the precision horizon eN."""
        T = self.tower
        best = T.horizon
        p, e = T.p, T.e
        for j, a in enumerate(self.c):
            for x in a:
                if x:
                    v = e * vp_int(x, p) + j
                    if v < best:
                        best = v
        return best

    def is_zero(self):
        return not any(any(a) for a in self.c)

    def leading(self, v: int | None = None) -> FqElem:
        """Residue r with self = [r] pi^v + higher, for v = v_pi(self) unless given."""
        T = self.tower
        if v is None:
            v = self.valuation()
        q, r = divmod(v, T.e)
        pq = T.p ** q
        coeff = tuple((x // pq) % T.p for x in self.c[r])
        res = T.l(coeff)
        if q:
            res = res * T.l(T.u) ** (-q)
        return res

    def residue(self) -> FqElem:
        return self.tower.l(self.c[0])

    def is_unit(self):
        return self.valuation() == 0

    def inverse(self):
        """Inverse of a unit (Newton iteration)."""
        T = self.tower
        if not self.is_unit():
            raise NotAUnit("element is not a unit")
        c0 = WittElem(T.W, self.c[0]).inverse()
        y = T.scalar(c0.coeffs)
        prec = 1
        while prec < T.horizon:
            y = y * (2 - self * y)
            prec *= 2
        return y

    def __truediv__(self, other):
        o = self._co(other)
        return self * o.inverse()

    def divide_by_pi(self, k: int = 1) -> "LocalElem":
        """Exact division by pi^k.  The top k pi-adic digits of the result are unknown (set to 0)."""
        T = self.tower
        if self.valuation() < k:
            raise LocalFieldError("element not divisible by the requested power of pi")
        c = list(self.c)
        uinv = WittElem(T.W, T.u).inverse().coeffs
        for _ in range(k):
            c0 = c[0]
            if any(x % T.p for x in c0):
                raise LocalFieldError("inexact division by pi")
            c0p = tuple((x // T.p) for x in c0)
            c = c[1:] + [_wmul(c0p, uinv, T.mod, T.m, T.pN)]
        return LocalElem(T, tuple(c))

    def frobenius_coeffs(self, k: int) -> "LocalElem":
        T = self.tower
        return LocalElem(T, tuple(WittElem(T.W, a).frobenius(k).coeffs for a in self.c))


def _reduce_poly(prod, mod, m, pN):
    prod = list(prod)
    for k in range(2 * m - 2, m - 1, -1):
        c = prod[k]
        if c:
            base = k - m
            for i in range(m):
                prod[base + i] -= c * mod[i]
    return tuple(c % pN for c in prod[:m])


@lru_cache(maxsize=None)
def tower_create(p, f, g, e, u, N) -> TameTower:
    if isinstance(u, list):
        u = tuple(u)
    return TameTower(p, f, g, e, u, N)


def tower_from_spec(spec: dict) -> TameTower:
    unit = spec.get("unit", 1)
    if isinstance(unit, list):
        unit = tuple(unit)
    elif isinstance(unit, dict):
        unit = _FrozenUnit(unit)
    return tower_create(spec["p"], spec["f"], spec.get("g", 1), spec["e"], unit, spec.get("precision", 6))


class _FrozenUnit(dict):
    def __hash__(self):
        return hash(tuple(sorted(self.items())))


# ---------------------------------------------------------------------------
# Artin-Hasse units


@lru_cache(maxsize=None)
def _inverse_ah_int(p, N, M):
    """Coefficients of 1/E_p(x) mod p^N."""
    E = artin_hasse_rational(p, M)
    inv = [Fraction(1)]
    for n in range(1, M):
        inv.append(-sum(E[k] * inv[n - k] for k in range(1, n + 1)))
    pN = p ** N
    out = []
    for c in inv:
        if c.denominator % p == 0:
            raise LocalFieldError("1/E has a non-integral coefficient")
        out.append(c.numerator * pow(c.denominator, -1, pN) % pN)
    return tuple(out)


def _monomial_series(T: TameTower, coeffs, w, n):
    """sum_k coeffs[k] w^k pi^{nk}, truncated at the horizon."""
    e, m, pN, mod = T.e, T.m, T.pN, T.mod
    out = [[0] * m for _ in range(e)]
    wk = T.W(1).coeffs
    upq = [T.W(1).coeffs]
    k = 0
    while n * k < T.horizon:
        q, r = divmod(n * k, e)
        while len(upq) <= q:
            upq.append(_wmul(upq[-1], T.up, mod, m, pN))
        if coeffs[k]:
            term = _wmul(_wscale(wk, coeffs[k], pN), upq[q], mod, m, pN)
            row = out[r]
            for i in range(m):
                row[i] += term[i]
        wk = _wmul(wk, w, mod, m, pN)
        k += 1
    return LocalElem(T, tuple(tuple(x % pN for x in row) for row in out))


_AH_CACHE: dict = {}


def ah_unit(a: FqElem, n: int, tower: TameTower) -> LocalElem:
    """E([a] pi^n)."""
    if n < 1:
        raise LocalFieldError("level must be positive")
    if n >= tower.horizon:
        raise PrecisionExceeded(f"level {n} beyond precision horizon {tower.horizon}")
    key = (id(tower), a.coeffs, n, False)
    hit = _AH_CACHE.get(key)
    if hit is None:
        M = tower.horizon // n + 1
        w = teichmuller(a, tower.W).coeffs
        hit = _monomial_series(tower, artin_hasse_int(tower.p, tower.N, M), w, n)
        _AH_CACHE[key] = hit
    return hit


def ah_unit_inverse(a: FqElem, n: int, tower: TameTower) -> LocalElem:
    key = (id(tower), a.coeffs, n, True)
    hit = _AH_CACHE.get(key)
    if hit is None:
        M = tower.horizon // n + 1
        w = teichmuller(a, tower.W).coeffs
        hit = _monomial_series(tower, _inverse_ah_int(tower.p, tower.N, M), w, n)
        _AH_CACHE[key] = hit
    return hit


def ah_eval(beta: LocalElem, tower: TameTower | None = None) -> LocalElem:
    """E(beta) for v_pi(beta) >= 1, by direct series evaluation."""
    T = tower or beta.tower
    v = beta.valuation()
    if v < 1:
        raise LocalFieldError("E(beta) needs v(beta) >= 1")
    if v >= T.horizon:
        return T.one()
    M = T.horizon // v + 1
    coeffs = artin_hasse_int(T.p, T.N, M)
    acc = T.zero()
    pw = T.one()
    for k in range(M):
        if coeffs[k]:
            acc = acc + pw * coeffs[k]
        pw = pw * beta
    return acc


# ---------------------------------------------------------------------------
# digit decomposition


@dataclass
class UnitDigits:
    tower: TameTower
    digits: dict = field(default_factory=dict)  # level -> FqElem in l (nonzero only)
    top: int = 0  # trace-class digit in F_p at the top level
    pi_exponent: int = 0
    teich: FqElem | None = None

    def is_trivial(self):
        return not self.digits and self.top == 0 and self.pi_exponent % self.tower.p == 0

    def vector(self) -> list:
        """F_p coordinates: level blocks, then the top digit, then the pi-exponent mod p."""
        T = self.tower
        out = []
        for lev in T.levels:
            a = self.digits.get(lev)
            out.extend(a.coeffs if a is not None else (0,) * T.m)
        if T.top_level:
            out.append(self.top % T.p)
        out.append(self.pi_exponent % T.p)
        return out

    def to_json(self):
        return {
            "digits": {str(k): list(v.coeffs) for k, v in sorted(self.digits.items())},
            "top": self.top,
            "pi_exponent": self.pi_exponent,
        }


def decompose_unit(x: LocalElem, tower: TameTower | None = None) -> UnitDigits:
    T = tower or x.tower
    p, e = T.p, T.e
    v = x.valuation()
    if v >= T.horizon:
        raise PrecisionExceeded("element is zero to working precision")
    horizon = T.horizon - v
    y = x.divide_by_pi(v) if v else x
    res = y.residue()
    y = y.scale(WittElem(T.W, teichmuller(res, T.W).coeffs).inverse().coeffs)
    top_needed = T.top_level if T.top_level else math.floor(T.top_bound)
    if horizon <= top_needed:
        raise PrecisionExceeded(
            f"need pi-adic precision above {top_needed}, have {horizon}"
        )
    out = UnitDigits(T, {}, 0, v, res)
    steps = 0
    while True:
        steps += 1
        if steps > T.horizon + 5:
            raise PrecisionExceeded("digit extraction did not terminate")
        d = y - 1
        m = d.valuation()
        if m >= horizon:
            break
        if m > T.top_bound:
            break
        a = d.leading(m)
        if T.top_level is not None and m == T.top_level:
            out.top = trace_to_prime(a * T.top_constant).as_int()
            break
        if m == T.top_bound:
            # top level without roots of unity: always a p-th power
            break
        if m % p:
            out.digits[m] = a
            y = y * ah_unit_inverse(a, m, T)
        else:
            b = frobenius(a, -1)
            y = y * ah_unit_inverse(b, m // p, T) ** p
    return out


def is_pth_power(x: LocalElem, tower: TameTower | None = None) -> bool:
    T = tower or x.tower
    if x.valuation() % T.p:
        return False
    return decompose_unit(x, T).is_trivial()


def top_basis_residue(T: TameTower) -> FqElem:
    """Residue b with trace(b * top_constant) = 1."""
    for b in T.l.elements():
        if trace_to_prime(b * T.top_constant) == T.l(1):
            return b
    raise LocalFieldError("no top-level basis element")  # unreachable


def reconstruct(digits: UnitDigits) -> LocalElem:
    T = digits.tower
    y = T.one()
    for lev, a in sorted(digits.digits.items()):
        if not a.is_zero():
            y = y * ah_unit(a, lev, T)
    if digits.top % T.p:
        b = top_basis_residue(T) * digits.top
        y = y * (T.one() + T.teich(b) * T.pi_power(T.top_level))
    if digits.pi_exponent:
        y = y * T.pi_power(digits.pi_exponent)
    if digits.teich is not None:
        y = y * T.teich(digits.teich)
    return y


def digits_from_vector(T: TameTower, vec) -> UnitDigits:
    vec = [int(c) % T.p for c in vec]
    digits = {}
    pos = 0
    for lev in T.levels:
        a = T.l(vec[pos:pos + T.m])
        pos += T.m
        if not a.is_zero():
            digits[lev] = a
    top = 0
    if T.top_level:
        top = vec[pos]
        pos += 1
    return UnitDigits(T, digits, top, vec[pos], None)


# ---------------------------------------------------------------------------
# Galois action


def galois_apply(sigma, x: LocalElem) -> LocalElem:
    """Apply g = (s, t): Frobenius^(f s) on coefficients and pi -> [zeta]^t pi."""
    s, t = sigma
    T = x.tower
    frob = (T.f * s) % T.m if T.m > 1 else 0
    cs = []
    zt = WittElem(T.W, T.zeta) ** (t % T.e)
    zj = T.W.one()
    for a in x.c:
        w = WittElem(T.W, a)
        if frob:
            w = w.frobenius(frob)
        cs.append((w * zj).coeffs)
        zj = zj * zt
    return LocalElem(T, tuple(cs))


def tower_map(x: LocalElem, pi_image: LocalElem) -> LocalElem:
    """Ring map from x's tower to pi_image's tower fixing W(l) and sending pi to pi_image."""
    target = pi_image.tower
    acc = target.zero()
    pw = target.one()
    for a in x.c:
        if any(a):
            acc = acc + pw.scale(a)
        pw = pw * pi_image
    return acc
