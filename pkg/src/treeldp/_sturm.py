"""Exact Sturm-sequence root counting for rational polynomials.

Polynomials are coefficient lists in ascending degree order, entries
Fraction.  Used to certify that the chain pmf polynomials have only
real nonpositive roots.
"""

from __future__ import annotations

from fractions import Fraction

Poly = list[Fraction]


def trim(p: Poly) -> Poly:
    while p and p[-1] == 0:
        p = p[:-1]
    return p


def degree(p: Poly) -> int:
    p = trim(p)
    return len(p) - 1 if p else -1


def derivative(p: Poly) -> Poly:
    return [k * c for k, c in enumerate(p)][1:]


def poly_rem(a: Poly, b: Poly) -> Poly:
    """Remainder of a / b over the rationals."""
    a = trim(list(a))
    b = trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    while len(a) >= len(b) and a:
        coef = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, bc in enumerate(b):
            a[i + shift] -= coef * bc
        a = trim(a)
    return a


def _primitive(p: Poly) -> Poly:
    """Scale by a positive rational so coefficients become a primitive
    integer vector; sign pattern is preserved, which is all Sturm needs.
    Keeps coefficient bit-size from exploding down the chain."""
    p = trim(p)
    if not p:
        return p
    from math import gcd

    den = 1
    for c in p:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g == 0:
        return []
    return [Fraction(v, g) for v in ints]


def sturm_chain(p: Poly) -> list[Poly]:
    chain = [_primitive(p)]
    d = derivative(chain[0])
    d = _primitive(d)
    if d:
        chain.append(d)
    while degree(chain[-1]) > 0:
        rem = poly_rem(chain[-2], chain[-1])
        if not rem:
            break  # gcd is nonconstant: p has a repeated root
        chain.append(_primitive([-c for c in rem]))
    return chain


def _sign_at_neg_inf(p: Poly) -> int:
    d = degree(p)
    lead = p[d]
    s = 1 if lead > 0 else -1
    return s if d % 2 == 0 else -s


def _sign_at_zero(p: Poly) -> int:
    # polynomials passed here have nonzero constant term
    c = p[0]
    return 1 if c > 0 else (-1 if c < 0 else 0)


def _variations(signs: list[int]) -> int:
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0)


def count_distinct_negative_roots(p: Poly) -> tuple[int, bool]:
    """(number of distinct real roots in (-inf, 0), squarefree?) for a
    polynomial with nonzero constant term."""
    p = trim(list(p))
    if degree(p) <= 0:
        return 0, True
    if p[0] == 0:
        raise ValueError("expected nonzero constant term (strip zero roots first)")
    chain = sturm_chain(p)
    squarefree = degree(chain[-1]) == 0
    v_neg = _variations([_sign_at_neg_inf(q) for q in chain])
    v_zero = _variations([_sign_at_zero(q) for q in chain])
    return v_neg - v_zero, squarefree
