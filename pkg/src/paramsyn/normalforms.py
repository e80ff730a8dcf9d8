"""Two polynomial normal forms used by the model constructions.

``positive_form`` rewrites an arbitrary polynomial as a positive
combination of products of box atoms (x or 1-x) plus a nonpositive
constant, together with a scaling bound N.  ``binomial_representation``
writes a univariate polynomial in the scaled Bernstein basis with all
coefficients inside [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, floor

from .polyalg import Polynomial, PolyError

DUMMY_PARAM = "$x0"


@dataclass(frozen=True)
class Atom:
    """A single box factor: the variable itself, or one minus it."""

    var: str
    complemented: bool = False

    def poly(self) -> Polynomial:
        if self.complemented:
            return Polynomial.one_minus(self.var)
        return Polynomial.var(self.var)

    def __str__(self):
        return f"(1-{self.var})" if self.complemented else self.var


@dataclass
class PositiveCombination:
    """f == sum(alpha_i * prod(factors_i)) + beta, alpha_i > 0, beta <= 0."""

    summands: list[tuple[Fraction, tuple[Atom, ...]]]
    beta: Fraction
    N: int
    mu: Fraction

    def alpha_sum(self) -> Fraction:
        return sum((a for a, _ in self.summands), Fraction(0))

    def scaled_threshold(self) -> Fraction:
        """Threshold for the rescaled polynomial (f - beta) / N."""
        return (self.mu - self.beta) / self.N

    def reconstruct(self) -> Polynomial:
        total = Polynomial.const(self.beta)
        for alpha, factors in self.summands:
            term = Polynomial.const(alpha)
            for atom in factors:
                term = term * atom.poly()
            total = total + term
        return total


def positive_form(f: Polynomial, mu: Fraction) -> PositiveCombination:
    """Rewrite f so that a threshold test against mu uses only positive weights.

    Each negative monomial -x_1*...*x_d is replaced through the identity

        -x_1*...*x_d  ==  -1 + sum_i (1-x_i) * x_{i+1} * ... * x_d,

    positive monomials pass through unchanged, and an accumulated positive
    constant is folded back in as beta*x + beta*(1-x).  The returned N is
    the least integer exceeding max(sum of alphas, mu - beta), so that
    (f - beta)/N takes values in [0, 1] on the unit box and

        f[u] ~ mu  iff  ((f - beta)/N)[u] ~ (mu - beta)/N

    for every comparison relation.
    """
    mu = Fraction(mu)
    summands: list[tuple[Fraction, tuple[Atom, ...]]] = []
    beta = Fraction(0)
    for mono, coeff in f.sorted_terms():
        flat = [var for var, e in mono for _ in range(e)]
        if not flat:
            beta += coeff
        elif coeff > 0:
            summands.append((coeff, tuple(Atom(v) for v in flat)))
        else:
            alpha = -coeff
            d = len(flat)
            for i in range(d):
                factors = (Atom(flat[i], True),) + tuple(Atom(v) for v in flat[i + 1 :])
                summands.append((alpha, factors))
            beta -= alpha
    if beta > 0:
        params = f.params()
        var = params[0] if params else DUMMY_PARAM
        summands.append((beta, (Atom(var),)))
        summands.append((beta, (Atom(var, True),)))
        beta = Fraction(0)
    bound = max(sum((a for a, _ in summands), Fraction(0)), mu - beta)
    n = floor(bound) + 1
    return PositiveCombination(summands, beta, n, mu)


@dataclass
class BinomialRep:
    """f == sum_k p[k] * C(n, k) * x^(n-k) * (1-x)^k with p[k] in [0, 1]."""

    n: int
    p: list[Fraction]
    var: str

    def expansion(self) -> Polynomial:
        x = Polynomial.var(self.var)
        omx = Polynomial.one_minus(self.var)
        total = Polynomial()
        for k, pk in enumerate(self.p):
            total = total + Polynomial.const(pk * comb(self.n, k)) * x ** (
                self.n - k
            ) * omx**k
        return total


class ElevationCapExceeded(PolyError):
    def __init__(self, cap: int):
        super().__init__(
            f"no coefficient vector in [0,1] after {cap} degree elevations; "
            "the polynomial is too close to 0 or 1 on [0,1]"
        )
        self.cap = cap


def _coefficient_list(f: Polynomial) -> tuple[list[Fraction], str]:
    params = f.params()
    if len(params) > 1:
        raise PolyError(f"univariate polynomial required, got parameters {params}")
    var = params[0] if params else "x"
    coeffs = [Fraction(0)] * (f.degree() + 1)
    for mono, c in f.terms.items():
        e = mono[0][1] if mono else 0
        coeffs[e] = c
    return coeffs, var


def binomial_representation(f: Polynomial, cap: int = 512) -> BinomialRep:
    """Scaled-Bernstein form of a univariate f with coefficients in [0, 1].

    The polynomial is converted to the Bernstein basis of its own degree
    and then degree-elevated until every coefficient lies in [0, 1].
    Bernstein coefficients converge uniformly to the function's values, so
    the loop terminates whenever f stays strictly inside (0, 1) on the open
    interval and inside [0, 1] at the endpoints.  Raises
    ElevationCapExceeded after `cap` elevations otherwise.
    """
    coeffs, var = _coefficient_list(f)
    n = len(coeffs) - 1
    # b[k] multiplies C(n,k) x^k (1-x)^(n-k); b[k] = sum_j C(k,j)/C(n,j) a_j.
    b = [
        sum((Fraction(comb(k, j), comb(n, j)) * coeffs[j] for j in range(k + 1)), Fraction(0))
        for k in range(n + 1)
    ]
    for _ in range(cap + 1):
        if all(0 <= bk <= 1 for bk in b):
            return BinomialRep(n, list(reversed(b)), var)
        nb = [b[0]]
        for k in range(1, n + 1):
            nb.append(Fraction(k, n + 1) * b[k - 1] + Fraction(n + 1 - k, n + 1) * b[k])
        nb.append(b[n])
        b = nb
        n += 1
    raise ElevationCapExceeded(cap)
