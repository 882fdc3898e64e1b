"""Independent closed-form oracles for the quadratic and Q_p weight tables.

These are transcriptions of closed formulas, kept separate from the
enumerative code in ``ahweights.serre_combinatorics`` so that tests compare
two different derivations.
"""

from ahweights.serre_combinatorics import SerreWeight


def normalize(p, d, b):
    """Reduce d mod p^2 - 1 into the normal digit range (f = 2)."""
    D = (d[0] + p * d[1]) % (p * p - 1)
    return SerreWeight((D % p, D // p), tuple(b))


T, J0, J1, EMPTY = frozenset({0, 1}), frozenset({0}), frozenset({1}), frozenset()


def _case_one_b(p, a0, a1):
    if a1 < p - 1:
        return (p - 1 - a0, p - 1 - a1)
    if a0 < p - 2:
        return (p - 2 - a0, p)
    return (p, p - 1)


def case_one_pairs(p, a0, a1):
    return {
        (normalize(p, (0, 0), (a0, a1)), T),
        (normalize(p, (p - 1, a1 - 1), (a0 + 1, p - a1)), J0),
        (normalize(p, (a0 - 1, p - 1), (p - a0, a1 + 1)), J1),
        (normalize(p, (a0, a1), _case_one_b(p, a0, a1)), EMPTY),
    }


def case_two_pairs(p, a0):
    a1 = a0
    out = {
        (normalize(p, (0, 0), (a0, a1)), T),
        (normalize(p, (p - 1, a1 - 1), (a0 + 1, p - a1)), J0),
        (normalize(p, (a0 - 1, p - 1), (p - a0, a1 + 1)), J1),
    }
    if a0 == p - 1:
        out.add((normalize(p, (a0, a1), (p - 1, p - 1)), EMPTY))
        out.add((normalize(p, (p - 2, p - 1), (1, p)), J0))
        out.add((normalize(p, (p - 1, p - 2), (p, 1)), J1))
        if p == 2:
            out.add((normalize(p, (0, 0), (2, 2)), EMPTY))
    else:
        out.add((normalize(p, (a0, a1), (p - 1 - a0, p - 1 - a1)), EMPTY))
    if a0 == 1:
        out.add((normalize(p, (0, 0), (p, p)), T))
    if a0 == p - 2:
        out.add((normalize(p, (p - 2, p - 2), (p, p)), EMPTY))
    return out


def case_three_b(p, a0):
    # The row a0 = p - 2 (p > 2) is (p, p - 2); the inertial congruences rule out (p, p - 1).
    if a0 < p - 2:
        return (p - 2 - a0, p - 1)
    if p == 2:
        return (p, p - 1)
    if a0 == p - 2:
        return (p, p - 2)
    return (p - 1, p - 2)


def case_three_pairs(p, a0):
    b = case_three_b(p, a0)
    if a0 < p - 1:
        return {
            (normalize(p, (0, 0), (a0, p)), T),
            (normalize(p, (p - 2, p - 1), (a0 + 2, p)), J0),
            (normalize(p, (a0, p - 1), (p - 1 - a0, 1)), J1),
            (normalize(p, (a0, p), b), EMPTY),
        }
    return {
        (normalize(p, (0, 0), (p - 1, p)), T),
        (normalize(p, (p - 1, 0), (1, p - 1)), J0),
        (normalize(p, (p - 1, p - 2), (p, 2)), J1),
        (normalize(p, (0, 1), b), EMPTY),
    }


def quadratic_pairs(p, a0, a1):
    if a1 == p:
        return case_three_pairs(p, a0)
    if a0 == a1:
        return case_two_pairs(p, a0)
    return case_one_pairs(p, a0, a1)


def irreducible_case_four(p, a0, a1):
    return {
        normalize(p, (0, 0), (a0, a1)),
        normalize(p, (a0 - 1, a1), (p + 1 - a0, p - 1 - a1)),
        normalize(p, (a0 - 1, p - 1), (p - a0, a1 + 1)),
        normalize(p, (0, a1), (a0 - 1, p - a1)),
    }


def irreducible_case_five(p, a0):
    out = {
        normalize(p, (p - 2, p - 1), (a0 + 1, p)),
        normalize(p, (a0 - 1, 0), (p + 1 - a0, p - 1)),
        normalize(p, (a0 - 1, p - 1), (p - a0, 1)),
    }
    if a0 != 1:
        out.add(normalize(p, (0, 0), (a0 - 1, p)))
    return out
