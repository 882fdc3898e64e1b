"""Exact arithmetic in small finite fields F_{p^m}.

Elements are immutable and carry a reference to their field configuration.
Coefficients are stored with respect to the power basis 1, t, ..., t^{m-1},
where t is the class of x modulo the configured modulus.
"""

from __future__ import annotations

import itertools
import math
import re
from functools import lru_cache


class FiniteFieldError(ValueError):
    pass


class NotPrime(FiniteFieldError):
    pass


class ReducibleModulus(FiniteFieldError):
    pass


class ZeroInput(FiniteFieldError):
    pass


class EvenCharacteristic(FiniteFieldError):
    pass


class NotGenerator(FiniteFieldError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, math.isqrt(n) + 1):
        if n % q == 0:
            return False
    return True


# Fixed moduli, constant term first.  (3, 2) is x^2 - x - 1.
DEFAULT_MODULI = {
    (2, 1): (0, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 1): (0, 1),
    (3, 2): (2, 2, 1),
    (3, 4): (2, 0, 0, 1, 1),
    (5, 1): (0, 1),
    (5, 2): (2, 0, 1),
}


def _poly_mod(a, b, p):
    """Remainder of a by monic-or-unit-leading b over F_p (lists, low degree first)."""
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    while len(a) - 1 >= db and a:
        c = a[-1] * inv % p
        if c:
            shift = len(a) - 1 - db
            for i, bi in enumerate(b):
                a[shift + i] = (a[shift + i] - c * bi) % p
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return a


def _has_factor_of_degree(poly, d, p):
    """True if poly has a monic factor of degree d over F_p (exhaustive)."""
    for tail in itertools.product(range(p), repeat=d):
        cand = list(tail) + [1]
        if not _poly_mod(poly, cand, p):
            return True
    return False


def is_irreducible(poly, p) -> bool:
    poly = [c % p for c in poly]
    while poly and poly[-1] == 0:
        poly.pop()
    deg = len(poly) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    return not any(_has_factor_of_degree(poly, d, p) for d in range(1, deg // 2 + 1))


def parse_polynomial(text: str):
    """Parse strings like 'x^2-x-1' into a coefficient list (constant first)."""
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise FiniteFieldError("empty polynomial")
    terms = re.findall(r"[+-]?[^+-]+", s)
    coeffs: dict[int, int] = {}
    for term in terms:
        sign = -1 if term.startswith("-") else 1
        term = term.lstrip("+-")
        if "x" in term:
            pre, _, post = term.partition("x")
            pre = pre.rstrip("*")
            c = int(pre) if pre else 1
            e = int(post[1:]) if post.startswith("^") else 1
        else:
            c, e = int(term), 0
        coeffs[e] = coeffs.get(e, 0) + sign * c
    deg = max(coeffs)
    return [coeffs.get(i, 0) for i in range(deg + 1)]


class FqConfig:
    """The field F_p[x]/(modulus).  Build with field_create."""

    __slots__ = ("p", "m", "modulus", "size", "_hash", "__weakref__")

    def __init__(self, p: int, m: int, modulus):
        self.p = p
        self.m = m
        self.modulus = tuple(int(c) % p for c in modulus)
        self.size = p ** m
        self._hash = hash((p, m, self.modulus))

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, FqConfig) and (self.p, self.m, self.modulus) == (
            other.p,
            other.m,
            other.modulus,
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FqConfig(p={self.p}, m={self.m}, modulus={list(self.modulus)})"

    # constructors -----------------------------------------------------
    def __call__(self, value) -> "FqElem":
        if isinstance(value, FqElem):
            if value.field != self:
                raise FiniteFieldError("element belongs to a different field")
            return value
        if isinstance(value, int):
            return FqElem(self, (value % self.p,) + (0,) * (self.m - 1))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.m:
            coeffs = _poly_mod(coeffs, self.modulus, self.p)
        coeffs = coeffs + [0] * (self.m - len(coeffs))
        return FqElem(self, tuple(coeffs))

    def zero(self) -> "FqElem":
        return self(0)

    def one(self) -> "FqElem":
        return self(1)

    def gen(self) -> "FqElem":
        """The class of x (alpha for the default F_9)."""
        if self.m == 1:
            # x is a root of x - c; the class of x is c
            return self(-self.modulus[0])
        return self((0, 1))

    def elements(self):
        for tup in itertools.product(range(self.p), repeat=self.m):
            yield FqElem(self, tuple(reversed(tup)))

    def from_index(self, idx: int) -> "FqElem":
        coeffs = []
        for _ in range(self.m):
            idx, r = divmod(idx, self.p)
            coeffs.append(r)
        return FqElem(self, tuple(coeffs))

    @property
    def primitive_element(self) -> "FqElem":
        return _primitive_element(self)

    def parse(self, text) -> "FqElem":
        """Accept 'a^k' power strings, integers, or coefficient lists."""
        if isinstance(text, (list, tuple)):
            return self(text)
        if isinstance(text, int):
            return self(text)
        s = str(text).strip()
        neg = s.startswith("-")
        if neg:
            s = s[1:]
        if s.startswith("a"):
            k = int(s[2:]) if s.startswith("a^") else 1
            val = self.gen() ** k
        else:
            val = self(int(s))
        return -val if neg else val


class FqElem:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FqConfig, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    # comparisons
    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field(other)
        return isinstance(other, FqElem) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def is_zero(self):
        return not any(self.coeffs)

    @property
    def index(self) -> int:
        p = self.field.p
        return sum(c * p ** i for i, c in enumerate(self.coeffs))

    def __lt__(self, other):
        return self.index < other.index

    def _coerce(self, other) -> "FqElem":
        if isinstance(other, FqElem):
            if other.field != self.field:
                raise FiniteFieldError("mixed fields")
            return other
        return self.field(other)

    # ring operations
    def __add__(self, other):
        o = self._coerce(other)
        p = self.field.p
        return FqElem(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FqElem(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        F = self.field
        p, m, mod = F.p, F.m, F.modulus
        prod = [0] * (2 * m - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k] % p
            if c:
                for i in range(m):
                    prod[k - m + i] -= c * mod[i]
        return FqElem(F, tuple(c % p for c in prod[:m]))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        if self.is_zero():
            raise ZeroInput("inverse of zero")
        return self ** (self.field.size - 2)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __repr__(self):
        return f"FqElem({list(self.coeffs)} in F_{self.field.p}^{self.field.m})"

    def to_json(self):
        return {"p": self.field.p, "m": self.field.m, "coeffs": list(self.coeffs)}

    def power_string(self, base: "FqElem | None" = None) -> str:
        """'0' for zero, otherwise 'a^k' with k the discrete log to base (default the generator)."""
        if self.is_zero():
            return "0"
        b = base if base is not None else self.field.gen()
        try:
            k = dlog(self, b)
        except NotGenerator:
            k = dlog(self, self.field.primitive_element)
        return f"a^{k}"

    def as_int(self) -> int:
        """Value in F_p; raises if not in the prime field."""
        if any(self.coeffs[1:]):
            raise FiniteFieldError("element not in prime field")
        return self.coeffs[0]


def field_create(p: int, m: int = 1, modulus=None) -> FqConfig:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if m < 1:
        raise FiniteFieldError("degree must be >= 1")
    if modulus is None:
        modulus = DEFAULT_MODULI.get((p, m))
        if modulus is None:
            modulus = _first_irreducible(p, m)
    elif isinstance(modulus, str):
        modulus = parse_polynomial(modulus)
    modulus = [int(c) % p for c in modulus]
    if len(modulus) != m + 1:
        raise FiniteFieldError(f"modulus must have degree {m}")
    if modulus[-1] != 1:
        inv = pow(modulus[-1], -1, p)
        modulus = [c * inv % p for c in modulus]
    if not is_irreducible(modulus, p):
        raise ReducibleModulus(f"modulus {modulus} is reducible over F_{p}")
    return _cached_config(p, m, tuple(modulus))


@lru_cache(maxsize=None)
def _cached_config(p, m, modulus):
    return FqConfig(p, m, modulus)


@lru_cache(maxsize=None)
def _first_irreducible(p, m):
    for tail in itertools.product(range(p), repeat=m):
        cand = list(reversed(tail)) + [1]
        if is_irreducible(cand, p):
            return tuple(cand)
    raise FiniteFieldError("no irreducible polynomial found")


def frobenius(x: FqElem, k: int = 1) -> FqElem:
    F = x.field
    k %= F.m
    return x ** (F.p ** k) if k else x


def trace_to_prime(x: FqElem) -> FqElem:
    total = x.field.zero()
    y = x
    for _ in range(x.field.m):
        total = total + y
        y = y ** x.field.p
    return total


def relative_trace(x: FqElem, sub_degree: int) -> FqElem:
    """Trace from F_{p^m} down to its subfield of degree sub_degree."""
    m = x.field.m
    total = x.field.zero()
    y = x
    q = x.field.p ** sub_degree
    for _ in range(m // sub_degree):
        total = total + y
        y = y ** q
    return total


def is_square(x: FqElem) -> bool:
    if x.field.p == 2:
        raise EvenCharacteristic("square test needs odd characteristic")
    if x.is_zero():
        raise ZeroInput("zero has no square class")
    return x ** ((x.field.size - 1) // 2) == x.field.one()


def multiplicative_order(x: FqElem) -> int:
    if x.is_zero():
        raise ZeroInput("zero has no order")
    n = x.field.size - 1
    order = n
    for q in _prime_factors(n):
        while order % q == 0 and x ** (order // q) == x.field.one():
            order //= q
    return order


def _prime_factors(n):
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def _primitive_element(F: FqConfig) -> FqElem:
    n = F.size - 1
    if F.m > 1:
        g = F.gen()
        if multiplicative_order(g) == n:
            return g
    for idx in range(1, F.size):
        x = F.from_index(idx)
        if multiplicative_order(x) == n:
            return x
    raise FiniteFieldError("no primitive element")  # unreachable


@lru_cache(maxsize=None)
def _log_table(base: FqElem):
    table = {}
    y = base.field.one()
    for k in range(base.field.size - 1):
        if y.coeffs in table:
            break
        table[y.coeffs] = k
        y = y * base
    return table


def dlog(x: FqElem, base: FqElem) -> int:
    if x.is_zero():
        raise ZeroInput("discrete log of zero")
    if x.field != base.field:
        raise FiniteFieldError("mixed fields")
    table = _log_table(base)
    if len(table) != base.field.size - 1:
        raise NotGenerator("base does not generate the multiplicative group")
    return table[x.coeffs]


def element_from_json(obj) -> FqElem:
    F = field_create(obj["p"], obj["m"])
    return F(obj["coeffs"])


# embeddings ---------------------------------------------------------------


def poly_eval(coeffs, x: FqElem) -> FqElem:
    acc = x.field.zero()
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@lru_cache(maxsize=None)
def embedding_image_of_generator(src: FqConfig, dst: FqConfig) -> FqElem:
    """Image of src.gen() under the fixed embedding src -> dst.

    The root of src's modulus in dst with the smallest discrete log to the
    primitive element of dst is chosen, so the choice is deterministic.
    """
    if src.p != dst.p or dst.m % src.m:
        raise FiniteFieldError("no embedding between these fields")
    if src.m == 1:
        return dst(src.gen().coeffs[0])
    g = dst.primitive_element
    step = (dst.size - 1) // (src.size - 1)
    h = g ** step
    y = dst.one()
    for _ in range(src.size - 1):
        if poly_eval(src.modulus, y).is_zero():
            return y
        y = y * h
    raise FiniteFieldError("modulus has no root in target")  # unreachable


class Embedding:
    """The fixed field embedding src -> dst, optionally post-composed with Frobenius^k."""

    def __init__(self, src: FqConfig, dst: FqConfig, frob: int = 0):
        self.src = src
        self.dst = dst
        self.frob = frob % dst.m
        base = embedding_image_of_generator(src, dst)
        self._powers = [base ** i for i in range(src.m)]
        if self.frob:
            self._powers = [frobenius(y, self.frob) for y in self._powers]

    def __call__(self, x: FqElem) -> FqElem:
        if x.field != self.src:
            raise FiniteFieldError("embedding applied to wrong field")
        acc = self.dst.zero()
        for c, y in zip(x.coeffs, self._powers):
            if c:
                acc = acc + y * c
        return acc

    def preimage(self, y: FqElem) -> FqElem:
        """Inverse on the image; raises if y is not in the image."""
        for x in self.src.elements():
            if self(x) == y:
                return x
        raise FiniteFieldError("element not in the image of the embedding")


def ambient_field(p: int, *degrees: int) -> FqConfig:
    deg = 1
    for d in degrees:
        deg = deg * d // math.gcd(deg, d)
    return field_create(p, deg)
