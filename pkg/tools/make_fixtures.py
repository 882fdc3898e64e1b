"""Produce the norm-group fixture files under src/ahweights/fixtures/.

Local defining polynomials are cross-checked with sympy, which serves as an
independent computer-algebra oracle: Eisenstein shape at 3, and the
3-adic valuation of the discriminant against the expected wild slope.

The sextic case is reduced to a cubic over the tame quadratic subfield by
explicit linear algebra in Z_3[y]/(E(y)), where E is an Eisenstein
polynomial for the sextic field; that cubic is then carried into M.

Run:  python3 tools/make_fixtures.py [--check]
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import sympy as sp

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from ahweights.finite_field import field_create  # noqa: E402
from ahweights.local_field import tower_from_spec  # noqa: E402
from ahweights.norm_group import WildExtension, norm_subgroup  # noqa: E402
from ahweights.padic import teichmuller, witt_ring  # noqa: E402

OUT = ROOT / "src" / "ahweights" / "fixtures"
X = sp.symbols("x")


def ord3(n: int) -> int:
    n = abs(int(n))
    v = 0
    while n % 3 == 0:
        n //= 3
        v += 1
    return v


def check_eisenstein_slope(coeffs_low_first, slope: Fraction, tame_part: int = 0):
    """Eisenstein at 3 and ord_3(disc) = (deg - 1) * slope + tame_part for the stem field over Q_3."""
    poly = sum(c * X ** i for i, c in enumerate(coeffs_low_first))
    P = sp.Poly(poly, X)
    cs = coeffs_low_first
    assert cs[-1] == 1
    assert all(c % 3 == 0 for c in cs[:-1]) and cs[0] % 9, "not Eisenstein at 3"
    disc_val = ord3(sp.discriminant(P))
    deg = len(cs) - 1
    expected = (deg - 1) * slope + tame_part
    assert disc_val == expected, (disc_val, expected)
    return disc_val


# ---------------------------------------------------------------------------
# arithmetic in (Z/3^P)[y]/(E)


class QuotientRing:
    def __init__(self, modulus_low_first, prec):
        self.E = [int(c) for c in modulus_low_first]
        self.d = len(self.E) - 1
        self.mod = 3 ** prec

    def reduce(self, coeffs):
        c = list(coeffs) + [0] * max(0, 2 * self.d - len(coeffs))
        for k in range(len(c) - 1, self.d - 1, -1):
            t = c[k]
            if t:
                for i in range(self.d + 1):
                    c[k - self.d + i] -= t * self.E[i]
        return [v % self.mod for v in c[: self.d]]

    def mul(self, a, b):
        prod = [0] * (2 * self.d)
        for i, x in enumerate(a):
            for j, z in enumerate(b):
                prod[i + j] += x * z
        return self.reduce(prod)

    def const(self, c):
        return [c % self.mod] + [0] * (self.d - 1)

    def y_power(self, n):
        v = [0] * (n + 1)
        v[n] = 1
        return self.reduce(v)

    def inverse(self, a):
        x = self.const(pow(a[0], -1, 3))
        for _ in range(12):
            x = self.mul(x, [(2 * (i == 0) - v) % self.mod for i, v in enumerate(self.mul(a, x))])
        return x

    def sqrt(self, a):
        """Square root of a 1-unit-times-square residue, residue root +-1 chosen as 1."""
        v = self.const(1)
        half = pow(2, -1, self.mod)
        for _ in range(12):
            v = [(s + t) * half % self.mod for s, t in zip(v, self.mul(a, self.inverse(v)))]
        return v


def solve_mod(columns, target, mod):
    n = len(columns)
    A = [[columns[j][i] % mod for j in range(n)] + [target[i] % mod] for i in range(n)]
    for c in range(n):
        pr = next(i for i in range(c, n) if A[i][c] % 3)
        A[c], A[pr] = A[pr], A[c]
        inv = pow(A[c][c], -1, mod)
        A[c] = [v * inv % mod for v in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                fac = A[i][c]
                A[i] = [(v - fac * w) % mod for v, w in zip(A[i], A[c])]
    return [A[i][n] for i in range(n)]


def sextic_to_cubic(prec=9):
    """Cubic over Q_3(gamma), gamma^2 = -3, cutting out the sextic field x^6-3x^5+5x^3-5."""
    f = X ** 6 - 3 * X ** 5 + 5 * X ** 3 - 5
    check_disc = ord3(sp.discriminant(sp.Poly(f, X)))
    assert check_disc == 6  # 4 * (5/4) from the wild part plus 1 from the tame quadratic
    E = sp.Poly(sp.expand(f.subs(X, X - 1)), X).all_coeffs()[::-1]
    E = [int(c) for c in E]
    assert all(c % 3 == 0 for c in E[:-1]) and E[0] % 9, "shifted sextic is not Eisenstein"
    R = QuotientRing(E, prec)
    y6 = R.y_power(6)
    assert all(c % 3 == 0 for c in y6)
    eps = [c // 3 for c in y6]  # y^6 / 3, a unit
    w = [(-c) % R.mod for c in R.inverse(eps)]
    v = R.sqrt(w)
    gamma = R.mul(R.y_power(3), v)
    assert R.mul(gamma, gamma) == R.const(-3)
    cols = [R.y_power(i) for i in range(3)] + [R.mul(gamma, R.y_power(i)) for i in range(3)]
    sol = solve_mod(cols, R.y_power(3), R.mod)
    rational, irrational = sol[:3], sol[3:]
    # y^3 = sum (r_i + s_i gamma) y^i
    return rational, irrational, R.mod


def cubic_over_tower(spec, rational, irrational):
    """Coefficient arrays of Y^3 - sum (r_i + s_i gamma) Y^i with gamma -> [i] pi^2, i^2 = -1."""
    T = tower_from_spec(spec)
    F9 = field_create(3, 2)
    W = witt_ring(F9, T.N)
    iota = teichmuller(F9.gen() ** 2, W).coeffs
    poly = []
    for r, s in zip(rational, irrational):
        rows = [[0, 0] for _ in range(T.e)]
        rows[0] = [(-r) % T.pN, 0]
        rows[2] = [(-s * c) % T.pN for c in iota]
        poly.append(rows)
    poly.append(1)
    return poly


def fixtures():
    tower_ia = {"p": 3, "f": 2, "g": 1, "e": 8, "unit": 1, "precision": 4}
    tower_ib = {"p": 3, "f": 2, "g": 1, "e": 8, "unit": -1, "precision": 4}
    tower_iiia = {"p": 3, "f": 2, "g": 1, "e": 4, "unit": {"teich": "a^2"}, "precision": 7}
    tower_iiib = {"p": 3, "f": 2, "g": 1, "e": 4, "unit": 1, "precision": 7}
    tower_iia = {"p": 3, "f": 2, "g": 1, "e": 2, "unit": -1, "precision": 6}

    out = []

    def nonic(label, tower, coeffs, slope, pi_power, twist, weights, notes, support):
        check_eisenstein_slope(coeffs, Fraction(slope))
        out.append({
            "label": label,
            "tower": tower,
            "poly": coeffs,
            "expected_index": 9,
            "character": {"pi_power": pi_power},
            "twist": twist,
            "slope": slope,
            "expected": {"weights": weights, "support": support},
            "notes": notes,
        })

    nonic("Ia", tower_ia, [6, 0, 0, 0, 0, 0, 3, 6, 0, 1], "15/8", 7, 5, ["[2,1;1,2]"],
          "x^9+6x^7+3x^6+6 over M = K(pi), pi^8 = 3", [0, 1])
    nonic("Ib1", tower_ib, [3, 0, 0, 0, 0, 0, 0, 3, 0, 1], "15/8", 7, 2, ["[0,0;2,3]", "[2,0;1,2]"],
          "x^9+3x^7+3 over M = K(pi), pi^8 = -3", [1])
    nonic("Ib2", tower_ib, [6, 0, 0, 0, 0, 6, 0, 0, 0, 1], "13/8", 7, 7, ["[1,1;2,1]", "[1,2;1,2]"],
          "x^9+6x^5+6 over M = K(pi), pi^8 = -3", [0])
    nonic("IIIa", tower_iiia, [6, 9, 0, 0, 0, 0, 0, 0, 0, 1], "9/4", 1, 1, ["[1,0;1,3]"],
          "x^9+9x+6 over M = K(pi), pi^4 = 3[a^2]; of the units [a^k] only k = 2, 6 give an "
          "abelian extension (index 9), the others give index 1", [0, 1])

    rational, irrational, _ = sextic_to_cubic()
    out.append({
        "label": "IIIb1",
        "tower": tower_iiib,
        "poly": cubic_over_tower(tower_iiib, rational, irrational),
        "expected_index": 9,
        "intersect_conjugates": True,
        "partial_index": 3,
        "character": {"pi_power": 1},
        "twist": 1,
        "slope": "5/4",
        "expected": {"weights": ["[0,0;1,1]", "[0,0;3,3]", "[1,0;1,3]"], "support": [0]},
        "notes": "cubic over Q_3(sqrt(-3)) cutting out the sextic field of x^6-3x^5+5x^3-5, "
                 "moved into M = K(pi), pi^4 = 3, via sqrt(-3) -> [a^2] pi^2; the norm group of "
                 "N/M is the intersection of the Gal(M/K)-conjugates of its norm group",
        "sextic_reduction": {"rational": rational, "gamma": irrational},
    })

    check_eisenstein_slope([3, 3, 0, 1], Fraction(3, 2))
    out.append({
        "label": "IIa",
        "tower": tower_iia,
        "poly": [3, 3, 0, 1],
        "expected_index": 3,
        "character": {"pi_power": 1},
        "twist": 0,
        "slope": "3/2",
        "expected": {"weights": ["[0,0;1,1]", "[0,0;3,3]"], "support": [0, 1]},
        "notes": "x^3+3x+3 over M = K(pi), pi^2 = -3; the class takes values in F_3",
    })
    return out


def unit_search():
    """Norm-group index of x^9+9x+6 over K(pi), pi^4 = 3[a^k], for each k."""
    result = {}
    for k in range(8):
        spec = {"p": 3, "f": 2, "g": 1, "e": 4, "unit": {"teich": f"a^{k}"}, "precision": 7}
        T = tower_from_spec(spec)
        ns = norm_subgroup(WildExtension(T, [6, 9, 0, 0, 0, 0, 0, 0, 0, 1]))
        result[k] = ns.index
    return result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare with the committed files instead of writing")
    ap.add_argument("--unit-search", action="store_true", help="print the unit search for the x^9+9x+6 tower")
    args = ap.parse_args(argv)
    if args.unit_search:
        print(json.dumps(unit_search()))
        return 0
    OUT.mkdir(parents=True, exist_ok=True)
    status = 0
    for fx in fixtures():
        path = OUT / f"{fx['label'].lower()}.json"
        text = json.dumps(fx, indent=1) + "\n"
        if args.check:
            if not path.exists() or path.read_text() != text:
                print(f"differs: {path.name}")
                status = 1
        else:
            path.write_text(text)
            print(f"wrote {path.relative_to(ROOT)}")
    return status


if __name__ == "__main__":
    sys.exit(main())
