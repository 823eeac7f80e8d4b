"""Polynomials with exact rational coefficients, and the weight data of a potential.

A :class:`Polynomial` lives in a fixed, ordered tuple of named variables.  Each
monomial is a dense tuple of exponents in that order.  Terms remember the order
in which they were first inserted, which is how the exponent matrix keeps the
rows in the order the user typed them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from . import linalg

Monomial = tuple[int, ...]
Scalar = Union[int, Fraction]


class DegenerateInputError(ValueError):
    """The input is well formed but does not define a usable singularity."""


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position

    def __reduce__(self):
        return (PolynomialSyntaxError, (self.args[0].rsplit(" (at position", 1)[0], self.position))


def format_monomial(variables: Sequence[str], mono: Monomial, sep: str = "*") -> str:
    parts = []
    for name, e in zip(variables, mono):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return sep.join(parts)


def _lcm(a: int, b: int) -> int:
    from math import gcd

    return a * b // gcd(a, b)


class Polynomial:
    """Sparse multivariate polynomial over the rationals.

    Instances are immutable.  Arithmetic between polynomials requires the same
    variable tuple; ints and Fractions are promoted to constants.
    """

    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[Monomial, Scalar] | Iterable = ()):
        self.variables: tuple[str, ...] = tuple(variables)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Fraction] = {}
        n = len(self.variables)
        for mono, c in items:
            mono = tuple(mono)
            if len(mono) != n:
                raise ValueError(f"monomial {mono} does not match {n} variables")
            if any(e < 0 for e in mono):
                raise ValueError("negative exponent")
            acc[mono] = acc.get(mono, Fraction(0)) + Fraction(c)
        self._terms = {m: c for m, c in acc.items() if c != 0}
        self._hash = None

    # construction helpers
    @classmethod
    def constant(cls, variables: Sequence[str], c: Scalar) -> "Polynomial":
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def variable(cls, variables: Sequence[str], index: int) -> "Polynomial":
        variables = tuple(variables)
        mono = tuple(int(i == index) for i in range(len(variables)))
        return cls(variables, {mono: 1})

    @classmethod
    def monomial(cls, variables: Sequence[str], mono: Monomial, c: Scalar = 1) -> "Polynomial":
        return cls(variables, {tuple(mono): c})

    # access
    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def monomials(self) -> list[Monomial]:
        return list(self._terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get((0,) * len(self.variables), Fraction(0))

    def support(self) -> tuple[int, ...]:
        """Indices of variables that occur in some term."""
        return tuple(i for i in range(len(self.variables)) if any(m[i] for m in self._terms))

    def total_degree(self) -> int:
        return max((sum(m) for m in self._terms), default=0)

    def degree_in(self, index: int) -> int:
        return max((m[index] for m in self._terms), default=0)

    def weighted_degree(self, weights: Sequence[Fraction]) -> Fraction:
        """Weighted degree of a homogeneous polynomial (ValueError otherwise)."""
        degs = {sum((Fraction(w) * e for w, e in zip(weights, m)), Fraction(0)) for m in self._terms}
        if len(degs) != 1:
            raise ValueError(f"{self} is not weighted homogeneous")
        return degs.pop()

    # arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.variables, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, Fraction(0)) + c
        return Polynomial(self.variables, acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.variables, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial(self.variables, {m: c * other for m, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                acc[m] = acc.get(m, Fraction(0)) + c1 * c2
        return Polynomial(self.variables, acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.variables, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.variables == other.variables and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    # calculus and substitution
    def diff(self, index: int) -> "Polynomial":
        acc = {}
        for m, c in self._terms.items():
            if m[index]:
                m2 = m[:index] + (m[index] - 1,) + m[index + 1 :]
                acc[m2] = c * m[index]
        return Polynomial(self.variables, acc)

    def restrict(self, keep: Sequence[int]) -> "Polynomial":
        """Set every variable outside ``keep`` to zero; the result lives in the kept variables."""
        keep = tuple(keep)
        drop = [i for i in range(len(self.variables)) if i not in keep]
        acc = {}
        for m, c in self._terms.items():
            if any(m[i] for i in drop):
                continue
            acc[tuple(m[i] for i in keep)] = c
        return Polynomial(tuple(self.variables[i] for i in keep), acc)

    def with_variables(self, variables: Sequence[str]) -> "Polynomial":
        """Re-embed into a variable tuple that contains every variable used here."""
        variables = tuple(variables)
        pos = {name: i for i, name in enumerate(variables)}
        acc = {}
        for m, c in self._terms.items():
            new = [0] * len(variables)
            for name, e in zip(self.variables, m):
                if e:
                    if name not in pos:
                        raise ValueError(f"variable {name} missing from {variables}")
                    new[pos[name]] = e
            acc[tuple(new)] = c
        return Polynomial(variables, acc)

    def compose(self, images: Sequence, one=None):
        """Substitute ``images[i]`` for variable i.

        Images may be polynomials (in any common ring) or scalars; the caller
        passes ``one`` when the images are not Polynomials or scalars.
        """
        if one is None:
            proto = next((im for im in images if isinstance(im, Polynomial)), None)
            one = Polynomial.constant(proto.variables, 1) if proto is not None else Fraction(1)
        result = one * 0
        powers: list[dict[int, object]] = [dict() for _ in images]

        def power(i: int, e: int):
            if e not in powers[i]:
                value = one
                for _ in range(e):
                    value = value * images[i]
                powers[i][e] = value
            return powers[i][e]

        for m, c in self._terms.items():
            term = one * c
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        return Fraction(self.compose([Fraction(p) for p in point], one=Fraction(1)))

    # rendering
    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: t[0], reverse=True)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for mono, c in self.sorted_terms():
            body = format_monomial(self.variables, mono)
            mag = abs(c)
            if not body:
                text = str(mag)
            elif mag == 1:
                text = body
            else:
                text = f"{mag}*{body}"
            sign = "-" if c < 0 else "+"
            pieces.append((sign, text))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in pieces[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r}, variables={self.variables})"


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            tokens.append(("op", m.group(3), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


_Sparse = dict  # {((name, exp), ...): Fraction}


def _sparse_mul(a: _Sparse, b: _Sparse) -> _Sparse:
    out: _Sparse = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            merged = dict(ma)
            for n, e in mb:
                merged[n] = merged.get(n, 0) + e
            key = tuple(sorted(merged.items()))
            out[key] = out.get(key, Fraction(0)) + ca * cb
    return {k: v for k, v in out.items() if v}


def _sparse_add(a: _Sparse, b: _Sparse, sign: int = 1) -> _Sparse:
    out = dict(a)
    for m, c in b.items():
        out[m] = out.get(m, Fraction(0)) + sign * c
    return {k: v for k, v in out.items() if v}


def parse_polynomial(
    text: str,
    variables: Sequence[str] | None = None,
    params: Mapping[str, Scalar] | None = None,
) -> Polynomial:
    """Parse ``c*x^a*y^b + ...`` into a Polynomial.

    Parentheses, implicit products and division by a nonzero constant are
    allowed.  Names listed in ``params`` are replaced by their rational values.
    Without an explicit variable list the variables appear in first-use order.
    """
    params = {k: Fraction(v) for k, v in (params or {}).items()}
    tokens = _tokenize(text)
    if tokens[0][0] == "end":
        raise PolynomialSyntaxError("empty polynomial", 0)
    fixed = variables is not None
    names: list[str] = list(variables or [])
    idx = 0

    def peek():
        return tokens[idx]

    def take():
        nonlocal idx
        tok = tokens[idx]
        idx += 1
        return tok

    def exponent() -> int:
        kind, val, pos = peek()
        if kind == "op" and val == "(":
            take()
            e = exponent()
            if take()[1] != ")":
                raise PolynomialSyntaxError("expected ')'", tokens[idx - 1][2])
            return e
        if kind == "op" and val == "-":
            raise PolynomialSyntaxError("negative exponent", pos)
        if kind != "num":
            raise PolynomialSyntaxError("expected exponent", pos)
        take()
        return int(val)

    def atom() -> _Sparse:
        kind, val, pos = take()
        if kind == "num":
            return {(): Fraction(int(val))} if int(val) else {}
        if kind == "name":
            if val in params:
                return {(): params[val]} if params[val] else {}
            if val not in names:
                if fixed:
                    raise PolynomialSyntaxError(f"unknown variable {val!r}", pos)
                names.append(val)
            return {((val, 1),): Fraction(1)}
        if kind == "op" and val == "(":
            inner = expr()
            if take()[1] != ")":
                raise PolynomialSyntaxError("expected ')'", tokens[idx - 1][2])
            return inner
        raise PolynomialSyntaxError(f"unexpected {val or 'end of input'!r}", pos)

    def power() -> _Sparse:
        base = atom()
        if peek()[1] in ("^", "**"):
            take()
            e = exponent()
            out: _Sparse = {(): Fraction(1)}
            for _ in range(e):
                out = _sparse_mul(out, base)
            return out
        return base

    def term() -> _Sparse:
        acc = power()
        while True:
            kind, val, pos = peek()
            if kind == "op" and val == "*":
                take()
                acc = _sparse_mul(acc, power())
            elif kind == "op" and val == "/":
                take()
                d = power()
                if not d:
                    raise PolynomialSyntaxError("division by zero", pos)
                if set(d) != {()}:
                    raise PolynomialSyntaxError("can only divide by a constant", pos)
                acc = {m: c / d[()] for m, c in acc.items()}
            elif kind in ("num", "name") or (kind == "op" and val == "("):
                acc = _sparse_mul(acc, power())
            else:
                return acc

    def expr() -> _Sparse:
        sign = 1
        if peek()[0] == "op" and peek()[1] in ("+", "-"):
            sign = -1 if take()[1] == "-" else 1
        acc = _sparse_add({}, term(), sign)
        while peek()[0] == "op" and peek()[1] in ("+", "-"):
            sign = -1 if take()[1] == "-" else 1
            acc = _sparse_add(acc, term(), sign)
        return acc

    result = expr()
    kind, val, pos = peek()
    if kind != "end":
        raise PolynomialSyntaxError(f"expected '+' or '-', got {val!r}", pos)
    order = tuple(names)
    acc: dict[Monomial, Fraction] = {}
    for mono, coef in result.items():
        exps = dict(mono)
        key = tuple(exps.get(n, 0) for n in order)
        acc[key] = acc.get(key, Fraction(0)) + coef
    return Polynomial(order, acc)


# ------------------------------------------------------------ weight data


@dataclass(frozen=True)
class ExponentMatrix:
    rows: tuple[tuple[int, ...], ...]
    variables: tuple[str, ...]

    @property
    def is_square(self) -> bool:
        return len(self.rows) == len(self.variables)

    @property
    def determinant(self) -> int | None:
        if not self.is_square:
            return None
        return int(linalg.determinant([[Fraction(x) for x in r] for r in self.rows]))

    @property
    def is_invertible(self) -> bool:
        return self.is_square and self.determinant != 0

    def as_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class WeightSystem:
    weights: tuple[Fraction, ...]
    central_charge: Fraction

    @property
    def heavy(self) -> tuple[int, ...]:
        """Indices of variables of weight at least one half."""
        return tuple(i for i, q in enumerate(self.weights) if q >= Fraction(1, 2))

    @property
    def denominator(self) -> int:
        d = 1
        for q in self.weights:
            d = _lcm(d, q.denominator)
        return d


def exponent_matrix(W: Polynomial) -> ExponentMatrix:
    if W.is_zero():
        raise DegenerateInputError("zero polynomial has no exponent matrix")
    return ExponentMatrix(tuple(W.monomials()), W.variables)


def solve_weights(W: Polynomial) -> WeightSystem:
    """Weights q with every monomial of total weight one, and the central charge."""
    B = exponent_matrix(W)
    n = len(W.variables)
    if n == 0:
        raise DegenerateInputError("polynomial has no variables")
    rows = [[Fraction(x) for x in r] + [Fraction(1)] for r in B.rows]
    red, pivots = linalg.rref(rows)
    if n in pivots:
        raise DegenerateInputError("no weight system: the monomials are not quasi-homogeneous")
    if len(pivots) < n:
        raise DegenerateInputError("weights are not uniquely determined")
    q = tuple(red[i][n] for i in range(n))
    if any(not (0 < x < 1) for x in q):
        raise DegenerateInputError(f"weights {tuple(str(x) for x in q)} lie outside (0, 1)")
    chat = sum((1 - 2 * x for x in q), Fraction(0))
    return WeightSystem(q, chat)


def transpose_potential(W: Polynomial) -> Polynomial:
    """Polynomial whose exponent matrix is the transpose of W's, coefficients 1."""
    B = exponent_matrix(W)
    if not B.is_invertible:
        raise DegenerateInputError("transpose needs a square invertible exponent matrix")
    cols = tuple(zip(*B.rows))
    return Polynomial(W.variables, {tuple(c): 1 for c in cols})


def jacobian(W: Polynomial) -> list[Polynomial]:
    return [W.diff(i) for i in range(len(W.variables))]


def as_potential(W: Polynomial) -> Polynomial:
    """Same monomials with every coefficient set to 1."""
    return Polynomial(W.variables, {m: 1 for m in W.monomials()})
