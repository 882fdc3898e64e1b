"""Norms from a totally ramified extension N = M(theta) and the norm subgroup of M^x.

The extension is given by a monic polynomial g over O_M whose Newton polygon
has a single slope.  A uniformizer of N is built as theta^a pi^b, its
Eisenstein polynomial over O_M is derived, and norms of the standard
generators of N^x (the uniformizer and the 1-units 1 + [b] Pi^j) are taken
as determinants of multiplication matrices.  Their unit digits span the
image of the norm group in M^x / (M^x)^p, which is an F_p-vector space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .finite_field import FqElem
from .local_field import (
    LocalElem,
    LocalFieldError,
    PrecisionExceeded,
    TameTower,
    decompose_unit,
    digits_from_vector,
    galois_apply,
    reconstruct,
    tower_from_spec,
)


class NormGroupError(ArithmeticError):
    pass


class ZeroElement(NormGroupError):
    pass


class NotTotallyRamified(NormGroupError):
    pass


class IndexInconsistent(NormGroupError):
    """The row space is smaller than local class field theory allows."""


# ---------------------------------------------------------------------------
# polynomials over O_M: lists of LocalElem, constant term first


def _as_local(T: TameTower, c) -> LocalElem:
    if isinstance(c, LocalElem):
        return c
    if isinstance(c, int):
        return T.scalar(c)
    # nested coefficient array: one W(l) tuple per pi-power
    rows = [tuple(r) if isinstance(r, (list, tuple)) else (int(r),) + (0,) * (T.m - 1) for r in c]
    return T.elem(rows)


def characteristic_polynomial(matrix, one: LocalElem) -> list:
    """det(x I - A) by Berkowitz's division-free algorithm, constant term first."""
    n = len(matrix)
    zero = one * 0
    coeffs = [one, -matrix[0][0]]  # highest degree first
    for r in range(1, n):
        row = matrix[r][:r]
        col = [matrix[i][r] for i in range(r)]
        sub = [matrix[i][:r] for i in range(r)]
        column = [one, -matrix[r][r]]
        vec = col
        for _ in range(r):
            dot = zero
            for a, b in zip(row, vec):
                dot = dot + a * b
            column.append(-dot)
            vec = [sum((sub[i][j] * vec[j] for j in range(r)), zero) for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(min(i, r) + 1):
                if i - j < len(column):
                    acc = acc + column[i - j] * coeffs[j]
            new.append(acc)
        coeffs = new
    return coeffs[::-1]


def _companion_power(poly, power: int, T: TameTower):
    """Matrix of multiplication by x^power on O_M[x]/(poly), columns = images of basis."""
    D = len(poly) - 1
    cols = []
    for i in range(D):
        vec = [T.zero()] * D
        vec[i] = T.one()
        for _ in range(power):
            vec = _times_x(vec, poly)
        cols.append(vec)
    return [[cols[j][i] for j in range(D)] for i in range(D)]


def _times_x(vec, poly):
    D = len(poly) - 1
    top = vec[-1]
    out = [vec[0] * 0] + vec[:-1]
    if not top.is_zero():
        out = [out[k] - poly[k] * top for k in range(D)]
    return out


def _poly_mulmod(a, b, poly, T):
    D = len(poly) - 1
    prod = [T.zero()] * (2 * D - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if not y.is_zero():
                prod[i + j] = prod[i + j] + x * y
    for k in range(2 * D - 2, D - 1, -1):
        c = prod[k]
        if not c.is_zero():
            for i in range(D):
                prod[k - D + i] = prod[k - D + i] - c * poly[i]
    return prod[:D]


def determinant(matrix, T: TameTower):
    """Determinant by elimination with minimal-valuation pivots.

    Returns (det, loss) where loss is the total pi-adic precision spent on
    divisions by non-unit pivots.
    """
    n = len(matrix)
    A = [list(r) for r in matrix]
    det = T.one()
    loss = 0
    for col in range(n):
        best, best_v = None, None
        for r in range(col, n):
            v = A[r][col].valuation()
            if best_v is None or v < best_v:
                best, best_v = r, v
        if best_v >= T.horizon:
            return T.zero(), T.horizon
        if best != col:
            A[col], A[best] = A[best], A[col]
            det = -det
        piv = A[col][col]
        unit = piv.divide_by_pi(best_v) if best_v else piv
        inv = unit.inverse()
        det = det * piv
        loss += best_v
        for r in range(col + 1, n):
            x = A[r][col]
            if x.is_zero():
                continue
            factor = x.divide_by_pi(best_v) * inv if best_v else x * inv
            A[r] = [A[r][k] - factor * A[col][k] if k > col else A[r][k] for k in range(n)]
    return det, loss


# ---------------------------------------------------------------------------
# the extension


class WildExtension:
    """N = M(theta) with theta a root of the monic polynomial g over O_M."""

    def __init__(self, tower: TameTower, poly, label: str | None = None):
        self.tower = T = tower
        self.poly = [_as_local(T, c) for c in poly]
        self.label = label
        if self.poly[-1] != T.one():
            raise NormGroupError("defining polynomial must be monic")
        self.degree = D = len(self.poly) - 1
        if D < 1:
            raise NormGroupError("defining polynomial must have positive degree")
        v0 = self.poly[0].valuation()
        if v0 >= T.horizon:
            raise PrecisionExceeded("constant term vanishes to working precision")
        for k in range(1, D):
            vk = self.poly[k].valuation()
            # on or above the segment from (0, v0) to (D, 0)
            if Fraction(vk) < Fraction(v0 * (D - k), D):
                raise NotTotallyRamified("Newton polygon has more than one slope")
        if math.gcd(v0, D) != 1:
            raise NotTotallyRamified(f"root valuation {v0}/{D} does not force total ramification")
        self.root_valuation = Fraction(v0, D)
        self.is_eisenstein = v0 == 1
        # theta^a pi^b has valuation (a v0 + b D)/D = 1/D
        a = pow(v0, -1, D) if D > 1 else 0
        if a > D // 2:
            a -= D
        b = (1 - a * v0) // D
        self.uniformizer_exponents = (a, b)
        self.eisenstein = self._eisenstein_polynomial()
        self._powers = None

    @classmethod
    def from_fixture(cls, data: dict) -> "WildExtension":
        T = tower_from_spec(data["tower"])
        return cls(T, data["poly"], data.get("label"))

    # Pi = theta^a pi^b; derive its minimal polynomial E over O_M
    def _eisenstein_polynomial(self):
        T, D = self.tower, self.degree
        a, b = self.uniformizer_exponents
        if D == 1:
            return [T.uniformizer() * -1, T.one()]
        if a == 1 and b == 0:
            return list(self.poly)
        k = abs(a)
        if k == 1:
            char = list(self.poly)
        else:
            char = characteristic_polynomial(_companion_power(self.poly, k, T), T.one())
        # char = minimal polynomial of psi = theta^k, monic, constant term first
        if a < 0:
            # Pi = pi^b / psi: multiplying sum_j char[j] psi^j = 0 by Pi^D gives
            # sum_j char[j] pi^{bj} Pi^{D-j} = 0; normalise by char[0]
            c0 = char[0]
            v = c0.valuation()
            unit_inv = c0.divide_by_pi(v).inverse()
            out = [None] * (D + 1)
            for j in range(D + 1):
                term = char[j] * T.pi_power(b * j)
                out[D - j] = term.divide_by_pi(v) * unit_inv
            loss = v
        else:
            # Pi = psi * pi^b with b <= 0
            s = -b
            out = []
            for j in range(D + 1):
                out.append(char[j].divide_by_pi(s * (D - j)) if s * (D - j) else char[j])
            loss = s * D
        self.precision_loss = loss
        if out[-1] != T.one():
            raise NormGroupError("uniformizer polynomial is not monic")
        if out[0].valuation() != 1 or any(c.valuation() < 1 for c in out[:-1]):
            raise NotTotallyRamified("synthesized uniformizer polynomial is not Eisenstein")
        return out

    @property
    def effective_horizon(self) -> int:
        return self.tower.horizon - getattr(self, "precision_loss", 0)

    def _check_precision(self, loss=0):
        T = self.tower
        needed = T.top_level if T.top_level else math.floor(T.top_bound)
        if self.effective_horizon - loss <= needed:
            raise PrecisionExceeded(
                f"precision after losses ({self.effective_horizon - loss}) does not reach level {needed}"
            )

    # -- norms ------------------------------------------------------------
    def norm_of_uniformizer(self) -> LocalElem:
        E0 = self.eisenstein[0]
        return -E0 if self.degree % 2 else E0

    def _pi_powers(self, count):
        """Pi^j reduced mod the Eisenstein polynomial, j = 0..count."""
        T, D = self.tower, self.degree
        if self._powers is None:
            one = [T.one()] + [T.zero()] * (D - 1)
            self._powers = [one]
        while len(self._powers) <= count:
            self._powers.append(_times_x(self._powers[-1], self.eisenstein))
        return self._powers

    def norm_in_uniformizer_basis(self, h) -> LocalElem:
        """Norm of sum h[j] Pi^j (h of length <= D)."""
        T, D = self.tower, self.degree
        h = [_as_local(T, c) for c in h] + [T.zero()] * (D - len(h))
        if all(c.is_zero() for c in h):
            raise ZeroElement("norm of zero")
        cols = [h]
        for _ in range(D - 1):
            cols.append(_times_x(cols[-1], self.eisenstein))
        mat = [[cols[j][i] for j in range(D)] for i in range(D)]
        det, loss = determinant(mat, T)
        self._check_precision(loss)
        return det

    def one_unit(self, b: FqElem, level: int):
        """1 + [b] Pi^level as a vector in the basis Pi^0..Pi^{D-1}."""
        T = self.tower
        pw = self._pi_powers(level)[level]
        tb = T.teich(b)
        vec = [c * tb for c in pw]
        vec[0] = vec[0] + T.one()
        return vec

    def norm_element(self, h) -> LocalElem:
        """Norm of h(theta) for h a polynomial over O_M of degree < D."""
        T, D = self.tower, self.degree
        h = [_as_local(T, c) for c in h] + [T.zero()] * (D - len(h))
        if all(c.is_zero() for c in h):
            raise ZeroElement("norm of zero")
        cols = [h]
        for _ in range(D - 1):
            cols.append(_times_x(cols[-1], self.poly))
        mat = [[cols[j][i] for j in range(D)] for i in range(D)]
        det, loss = determinant(mat, T)
        if loss >= T.horizon:
            raise PrecisionExceeded("norm vanishes to working precision")
        return det

    def multiply(self, h1, h2):
        T = self.tower
        a = [_as_local(T, c) for c in h1] + [T.zero()] * (self.degree - len(h1))
        b = [_as_local(T, c) for c in h2] + [T.zero()] * (self.degree - len(h2))
        return _poly_mulmod(a, b, self.poly, T)

    @property
    def ramification_bound(self) -> Fraction:
        """e_N p/(p-1): 1-units of N above this level are p-th powers."""
        T = self.tower
        return Fraction(T.e * self.degree * T.p, T.p - 1)

    def to_json(self):
        return {
            "tower": self.tower.spec(),
            "poly": [c.to_json() for c in self.poly],
            "label": self.label,
            "root_valuation": str(self.root_valuation),
            "uniformizer_exponents": list(self.uniformizer_exponents),
        }


# ---------------------------------------------------------------------------
# F_p row spaces


class RowSpace:
    """Reduced echelon basis of a subspace of F_p^dim."""

    def __init__(self, p: int, dim: int):
        self.p = p
        self.dim = dim
        self.rows: dict[int, list] = {}  # pivot column -> row with 1 at pivot

    def reduce(self, vec):
        p = self.p
        v = [x % p for x in vec]
        for piv, row in self.rows.items():
            c = v[piv]
            if c:
                v = [(x - c * y) % p for x, y in zip(v, row)]
        return v

    def add(self, vec) -> bool:
        v = self.reduce(vec)
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            return False
        p = self.p
        inv = pow(v[piv], -1, p)
        v = [x * inv % p for x in v]
        for k, row in self.rows.items():
            c = row[piv]
            if c:
                self.rows[k] = [(x - c * y) % p for x, y in zip(row, v)]
        self.rows[piv] = v
        return True

    def contains(self, vec) -> bool:
        return not any(self.reduce(vec))

    @property
    def rank(self):
        return len(self.rows)

    def basis(self):
        return [self.rows[k] for k in sorted(self.rows)]

    def kernel_of_restriction(self, coords):
        """Basis of {v in the space : v[i] = 0 for i outside coords}, as vectors on coords."""
        p = self.p
        keep = list(coords)
        others = [i for i in range(self.dim) if i not in set(keep)]
        # basis vectors as columns; solve for combinations killing the other coordinates
        basis = self.basis()
        n = len(basis)
        if n == 0:
            return []
        mat = [[b[i] for b in basis] for i in others]
        null = nullspace_mod_p(mat, n, p)
        out = []
        for comb in null:
            vec = [sum(c * b[i] for c, b in zip(comb, basis)) % p for i in keep]
            out.append(vec)
        return out


def nullspace_mod_p(rows, ncols: int, p: int):
    """Basis of the right kernel of a matrix over F_p."""
    A = [[x % p for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(A)) if A[i][c]), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-A[i][fc]) % p
        basis.append(v)
    return basis


@dataclass
class NormSubgroup:
    """Image of Norm(N^x) in M^x / (M^x)^p, as an F_p row space of digit vectors."""

    tower: TameTower
    space: RowSpace
    generators: list = field(default_factory=list)  # (description, vector)
    bound: int = 0

    @property
    def index(self) -> int:
        return self.tower.p ** (self.space.dim - self.space.rank)

    def contains_vector(self, vec) -> bool:
        return self.space.contains(vec)

    def basis(self):
        return self.space.basis()

    def to_json(self):
        return {
            "tower": self.tower.spec(),
            "index": self.index,
            "bound": self.bound,
            "basis": self.basis(),
            "generators": [{"name": n, "vector": v} for n, v in self.generators],
        }

    @classmethod
    def from_json(cls, data):
        T = tower_from_spec(data["tower"])
        space = RowSpace(T.p, T.dim)
        for row in data["basis"]:
            space.add(row)
        return cls(T, space, [], data.get("bound", 0))


def norm_subgroup(
    ext: WildExtension,
    generator_bound: int | None = None,
    expected_index: int | None = None,
    extra_levels: int = 2,
) -> NormSubgroup:
    """Span of the digit vectors of the norms of a generating family of N^x mod p-th powers.

    With expected_index set, generation stops a few levels after the index
    first reaches it; the extra levels confirm the index does not drop further.
    """
    T = ext.tower
    p = T.p
    space = RowSpace(p, T.dim)
    ns = NormSubgroup(T, space)
    if ext.degree == 1:
        for i in range(T.dim):
            space.add([1 if j == i else 0 for j in range(T.dim)])
        return ns
    ext._check_precision()
    bound = generator_bound or math.ceil(ext.ramification_bound)
    vec = decompose_unit(ext.norm_of_uniformizer()).vector()
    space.add(vec)
    ns.generators.append(("uniformizer", vec))
    basis = [T.l.from_index(p ** i) for i in range(T.m)]  # power basis 1, t, t^2, ...
    reached_at = None
    top = ext.ramification_bound
    for level in range(1, bound + 1):
        # the top level carries the extra class present when mu_p lies in N
        if level % p == 0 and level != top:
            continue
        for b in basis:
            x = ext.norm_in_uniformizer_basis(ext.one_unit(b, level))
            vec = decompose_unit(x).vector()
            space.add(vec)
            ns.generators.append((f"1+[{b}]Pi^{level}", vec))
        ns.bound = level
        if expected_index is not None:
            if ns.index < expected_index:
                raise IndexInconsistent(
                    f"index {ns.index} fell below the degree bound {expected_index} at level {level}"
                )
            if ns.index == expected_index and reached_at is None:
                reached_at = level
            if reached_at is not None and level >= reached_at + extra_levels * p:
                break
    return ns


def contains(ns: NormSubgroup, x: LocalElem) -> bool:
    return ns.contains_vector(decompose_unit(x, ns.tower).vector())


def is_galois_stable(ns: NormSubgroup, sigmas=None) -> bool:
    """Check the row space is stable under the given elements of Gal(M/K)."""
    T = ns.tower
    if sigmas is None:
        sigmas = [(0, 1)] + ([(1, 0)] if T.g > 1 else [])
    for row in ns.basis():
        x = reconstruct(digits_from_vector(T, row))
        for s in sigmas:
            if not ns.contains_vector(decompose_unit(galois_apply(s, x)).vector()):
                return False
    return True


def intersect(a: NormSubgroup, b: NormSubgroup) -> NormSubgroup:
    """Intersection of two row spaces in the same tower."""
    T = a.tower
    p, dim = T.p, T.dim
    # v in A and B: combos of A killed by projection to B's complement
    comp_b = nullspace_mod_p(b.basis(), dim, p) if b.basis() else [
        [1 if j == i else 0 for j in range(dim)] for i in range(dim)
    ]
    basis_a = a.basis()
    # condition: <v, w> = 0 for all w in the orthogonal complement of B
    mat = [[sum(x * y for x, y in zip(row, w)) % p for row in basis_a] for w in comp_b]
    combos = nullspace_mod_p(mat, len(basis_a), p) if basis_a else []
    space = RowSpace(p, dim)
    for c in combos:
        space.add([sum(ci * row[k] for ci, row in zip(c, basis_a)) % p for k in range(dim)])
    return NormSubgroup(T, space, [], max(a.bound, b.bound))


def galois_conjugate(ns: NormSubgroup, sigma) -> NormSubgroup:
    T = ns.tower
    space = RowSpace(T.p, T.dim)
    for row in ns.basis():
        x = reconstruct(digits_from_vector(T, row))
        space.add(decompose_unit(galois_apply(sigma, x)).vector())
    return NormSubgroup(T, space, [], ns.bound)
