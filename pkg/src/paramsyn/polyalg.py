"""Exact multivariate polynomial and rational-function arithmetic.

Coefficients are ``fractions.Fraction`` throughout, so every operation in
this module is exact.  Monomials are kept in a canonical graded-lex order
over sorted parameter names, which makes polynomial equality structural
and text rendering deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

Rat = Fraction

# A monomial is a sorted tuple of (variable, exponent) pairs, exponents >= 1.
Monomial = tuple[tuple[str, int], ...]

_ONE_MONO: Monomial = ()


class PolyError(ValueError):
    pass


class ParseError(PolyError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: dict[str, int] = dict(a)
    for var, e in b:
        exps[var] = exps.get(var, 0) + e
    return tuple(sorted(exps.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_key(m: Monomial, varorder: tuple[str, ...]) -> tuple:
    # Graded lex: total degree first, then exponents along the sorted
    # variable list.  Used descending, so the key is negated by callers.
    exps = dict(m)
    return (_mono_degree(m),) + tuple(exps.get(v, 0) for v in varorder)


class Polynomial:
    """Immutable polynomial: a map from monomials to nonzero coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction | int] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                c = Fraction(coeff)
                if c != 0:
                    clean[mono] = clean.get(mono, Fraction(0)) + c
                    if clean[mono] == 0:
                        del clean[mono]
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def const(cls, c) -> "Polynomial":
        return cls({_ONE_MONO: Fraction(c)})

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): Fraction(1)})

    @classmethod
    def one_minus(cls, name: str) -> "Polynomial":
        return cls({_ONE_MONO: Fraction(1), ((name, 1),): Fraction(-1)})

    def params(self) -> tuple[str, ...]:
        seen: set[str] = set()
        for mono in self.terms:
            for var, _ in mono:
                seen.add(var)
        return tuple(sorted(seen))

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(_mono_degree(m) for m in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == _ONE_MONO for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise PolyError(f"not a constant: {self}")
        return self.terms.get(_ONE_MONO, Fraction(0))

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    def __add__(self, other) -> "Polynomial":
        other = _as_poly(other)
        merged = dict(self.terms)
        for mono, c in other.terms.items():
            merged[mono] = merged.get(mono, Fraction(0)) + c
        return Polynomial(merged)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = _as_poly(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return Polynomial(out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise PolyError("negative exponent")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def subst(self, mapping: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Substitute polynomials for variables; unmapped variables stay."""
        out = Polynomial()
        for mono, c in self.terms.items():
            term = Polynomial.const(c)
            for var, e in mono:
                repl = mapping.get(var, Polynomial.var(var))
                term = term * repl**e
            out = out + term
        return out

    def __call__(self, u: Mapping[str, Fraction]) -> Fraction:
        return eval_poly(self, u)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        varorder = self.params()
        return sorted(
            self.terms.items(), key=lambda kv: _mono_key(kv[0], varorder), reverse=True
        )

    def __repr__(self):
        return f"Polynomial({render_poly(self)!r})"

    def __str__(self):
        return render_poly(self)


def _as_poly(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return Polynomial.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Polynomial")


ZERO = Polynomial()
ONE = Polynomial.const(1)


def eval_poly(f: Polynomial, u: Mapping[str, Fraction]) -> Fraction:
    """Exact term-by-term evaluation of f at the assignment u."""
    total = Fraction(0)
    for mono, c in f.terms.items():
        val = c
        for var, e in mono:
            if var not in u:
                raise PolyError(f"missing parameter assignment: {var}")
            val *= Fraction(u[var]) ** e
        total += val
    return total


# ---------------------------------------------------------------------------
# Parsing and rendering
#
# Grammar (EBNF):
#   expr    := term (("+" | "-") term)*
#   term    := unary ("*" unary)*
#   unary   := "-" unary | atom
#   atom    := primary ("^" INT)?
#   primary := NUMBER | IDENT | "(" expr ")"
#   NUMBER  := INT ("/" INT)? | decimal literal
#   IDENT   := [A-Za-z_$] [A-Za-z0-9_$]*
# ---------------------------------------------------------------------------

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$")
_IDENT_CONT = _IDENT_START | set("0123456789")


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*^()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            if i < n and text[i] == ".":
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
                tokens.append(("num", Fraction(text[start:i]), start))
            elif i < n and text[i] == "/":
                j = i + 1
                if j >= n or not text[j].isdigit():
                    raise ParseError("expected integer after '/'", i)
                while j < n and text[j].isdigit():
                    j += 1
                tokens.append(("num", Fraction(text[start:j]), start))
                i = j
            else:
                tokens.append(("num", Fraction(text[start:i]), start))
            continue
        if ch in _IDENT_START:
            start = i
            while i < n and text[i] in _IDENT_CONT:
                i += 1
            tokens.append(("ident", text[start:i], start))
            continue
        raise ParseError(f"unknown character {ch!r}", i)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[0]!r}", tok[2])
        return tok

    def expr(self) -> Polynomial:
        result = self.term()
        while self.peek()[0] in "+-":
            op = self.next()[0]
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> Polynomial:
        result = self.unary()
        while self.peek()[0] == "*":
            self.next()
            result = result * self.unary()
        return result

    def unary(self) -> Polynomial:
        if self.peek()[0] == "-":
            self.next()
            return -self.unary()
        return self.atom()

    def atom(self) -> Polynomial:
        kind, value, pos = self.next()
        if kind == "num":
            base = Polynomial.const(value)
        elif kind == "ident":
            base = Polynomial.var(value)
        elif kind == "(":
            base = self.expr()
            self.expect(")")
        else:
            raise ParseError(f"unexpected token {kind!r}", pos)
        if self.peek()[0] == "^":
            self.next()
            tok = self.expect("num")
            exp = tok[1]
            if exp.denominator != 1 or exp < 0:
                raise ParseError("exponent must be a nonnegative integer", tok[2])
            base = base ** int(exp)
        return base


def parse_poly(text: str) -> Polynomial:
    """Parse an expression string into a canonical Polynomial."""
    parser = _Parser(text)
    result = parser.expr()
    kind, _, pos = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input {kind!r}", pos)
    return result


def _render_rat(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _render_mono(m: Monomial) -> str:
    return "*".join(var if e == 1 else f"{var}^{e}" for var, e in m)


def render_poly(f: Polynomial) -> str:
    """Canonical text rendering; parse_poly(render_poly(f)) == f."""
    if not f.terms:
        return "0"
    parts = []
    for i, (mono, coeff) in enumerate(f.sorted_terms()):
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        if mono == _ONE_MONO:
            body = _render_rat(mag)
        elif mag == 1:
            body = _render_mono(mono)
        else:
            body = f"{_render_rat(mag)}*{_render_mono(mono)}"
        if i == 0:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


class RationalFunction:
    """Quotient of polynomials.

    No polynomial GCD is computed; only common-monomial content and a
    scalar normalisation of the denominator.  Equality is decided by
    cross-multiplication, which is exact regardless of representation.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        num = _as_poly(num)
        den = ONE if den is None else _as_poly(den)
        if den.is_zero():
            raise PolyError("division by the zero function")
        if num.is_zero():
            num, den = ZERO, ONE
        else:
            num, den = _cancel_content(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def const(cls, c) -> "RationalFunction":
        return cls(Polynomial.const(c))

    def __add__(self, other) -> "RationalFunction":
        other = _as_ratfunc(other)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other) -> "RationalFunction":
        other = _as_ratfunc(other)
        return RationalFunction(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __mul__(self, other) -> "RationalFunction":
        other = _as_ratfunc(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other) -> "RationalFunction":
        other = _as_ratfunc(other)
        if other.num.is_zero():
            raise PolyError("division by the zero function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Polynomial)):
            other = RationalFunction(_as_poly(other))
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        # Hash only the numerator-zero flag; rational functions are rarely
        # dict keys and representations of equal values may differ.
        return hash(self.num.is_zero())

    def __call__(self, u: Mapping[str, Fraction]) -> Fraction:
        d = eval_poly(self.den, u)
        if d == 0:
            raise PolyError("denominator vanishes at the given point")
        return eval_poly(self.num, u) / d

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __repr__(self):
        return f"RationalFunction({render_poly(self.num)!r}, {render_poly(self.den)!r})"

    def __str__(self):
        if self.den == ONE:
            return render_poly(self.num)
        return f"({render_poly(self.num)}) / ({render_poly(self.den)})"


def _as_ratfunc(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction(_as_poly(x))


def _cancel_content(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    # Divide out the largest monomial dividing every term of num and den,
    # then rescale so the denominator's leading coefficient is 1.
    common: dict[str, int] | None = None
    for poly in (num, den):
        for mono in poly.terms:
            exps = dict(mono)
            if common is None:
                common = exps
            else:
                common = {
                    v: min(e, exps.get(v, 0)) for v, e in common.items() if v in exps
                }
    if common:
        shift = tuple(sorted((v, e) for v, e in common.items() if e > 0))
        if shift:
            num = _mono_shift(num, shift)
            den = _mono_shift(den, shift)
    lead = den.sorted_terms()[0][1]
    if lead != 1:
        num = Polynomial({m: c / lead for m, c in num.terms.items()})
        den = Polynomial({m: c / lead for m, c in den.terms.items()})
    return num, den


def _mono_shift(f: Polynomial, shift: Monomial) -> Polynomial:
    out = {}
    for mono, c in f.terms.items():
        exps = dict(mono)
        for v, e in shift:
            exps[v] -= e
        out[tuple(sorted((v, e) for v, e in exps.items() if e > 0))] = c
    return Polynomial(out)


def ratfunc_arith(op: str, a: RationalFunction, b: RationalFunction) -> RationalFunction:
    """Exact rational-function arithmetic: op in {add, sub, mul, div}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise PolyError(f"unknown operation {op!r}")
