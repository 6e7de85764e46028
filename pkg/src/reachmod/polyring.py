"""Sparse multivariate polynomials over Q or GF(p).

The ring is Q[t_1..t_l, y] (or GF(p)[...]) with a distinguished pencil variable
``y``.  Exponent vectors store ``y`` in the last slot.  The base ring R is the
y-free subring.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

PENCIL = "y"

Rational = Fraction


class RingMismatchError(ValueError):
    pass


class PolynomialParseError(ValueError):
    pass


# -- monomial orders --------------------------------------------------------
#
# Orders are realised as linear encodings of exponent vectors into tuples whose
# native (lexicographic) tuple comparison is the monomial order.  Multiplying
# monomials corresponds to adding encodings, which the Groebner engine relies
# on.  Variable precedence is always y > t_1 > ... > t_l.

ORDERS = ("grevlex", "lex")


def encode(order: str, exp: tuple[int, ...]) -> tuple[int, ...]:
    """Map an exponent vector (t_1..t_l, y) to its order key."""
    if order == "grevlex":
        return (sum(exp),) + tuple(-e for e in reversed(exp[:-1])) + (-exp[-1],)
    if order == "lex":
        return (exp[-1],) + exp[:-1]
    raise ValueError(f"unknown monomial order {order!r}")


def decode(order: str, key: tuple[int, ...]) -> tuple[int, ...]:
    if order == "grevlex":
        ts = tuple(-e for e in reversed(key[1:-1]))
        return ts + (-key[-1],)
    if order == "lex":
        return key[1:] + (key[0],)
    raise ValueError(f"unknown monomial order {order!r}")


@dataclass(frozen=True)
class Ring:
    """Coefficient field plus ring variables; ``y`` is always appended.

    ``modulus=None`` means rational coefficients.
    """

    variables: tuple[str, ...] = ()
    modulus: int | None = None
    order: str = "grevlex"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("ring variable names must be distinct")
        if PENCIL in self.variables:
            raise ValueError("the pencil variable 'y' cannot be a ring variable")
        for v in self.variables:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
                raise ValueError(f"invalid variable name {v!r}")
        if self.modulus is not None and not (2 <= self.modulus < 2**31):
            raise ValueError("modulus must be a prime below 2^31")
        if self.order not in ORDERS:
            raise ValueError(f"unknown monomial order {self.order!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return self.variables + (PENCIL,)

    @property
    def nvars(self) -> int:
        return len(self.variables) + 1

    @property
    def is_field_case(self) -> bool:
        """True when the base ring R is the coefficient field itself."""
        return not self.variables

    def with_order(self, order: str) -> Ring:
        return Ring(self.variables, self.modulus, order)

    def coeff(self, c) -> Fraction | int:
        """Coerce a number into the coefficient field."""
        if self.modulus is None:
            return Fraction(c)
        if isinstance(c, Fraction):
            return c.numerator * pow(c.denominator, -1, self.modulus) % self.modulus
        return int(c) % self.modulus

    def inv(self, c):
        if self.modulus is None:
            return 1 / Fraction(c)
        return pow(c, -1, self.modulus)

    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    def one(self) -> Polynomial:
        return self.const(1)

    def const(self, c) -> Polynomial:
        return Polynomial(self, {(0,) * self.nvars: self.coeff(c)})

    def gen(self, name: str) -> Polynomial:
        if name not in self.names:
            raise PolynomialParseError(f"unknown variable {name}")
        i = self.names.index(name)
        exp = tuple(1 if j == i else 0 for j in range(self.nvars))
        return Polynomial(self, {exp: self.coeff(1)})

    @property
    def y(self) -> Polynomial:
        return self.gen(PENCIL)

    def parse(self, text: str) -> Polynomial:
        return parse_polynomial(text, self)

    def __str__(self):
        field_ = "QQ" if self.modulus is None else f"GF({self.modulus})"
        return f"{field_}[{', '.join(self.names)}]"


def _clean(ring: Ring, terms: Mapping) -> dict:
    if ring.modulus is None:
        return {e: c for e, c in terms.items() if c}
    p = ring.modulus
    out = {}
    for e, c in terms.items():
        c %= p
        if c:
            out[e] = c
    return out


class Polynomial:
    """Immutable sparse polynomial; terms kept sorted descending in the ring order."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[tuple[int, ...], object]):
        self.ring = ring
        items = _clean(ring, terms)
        order = ring.order
        self._terms = dict(
            sorted(items.items(), key=lambda t: encode(order, t[0]), reverse=True)
        )
        self._hash = None

    # -- basic views --
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    @property
    def leading_monomial(self) -> tuple[int, ...]:
        return next(iter(self._terms))

    @property
    def leading_coefficient(self):
        return next(iter(self._terms.values()))

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in_y(self) -> int:
        return max((e[-1] for e in self._terms), default=-1)

    def is_y_free(self) -> bool:
        return all(e[-1] == 0 for e in self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self):
        """Value of a constant polynomial as a coefficient-field element."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self._terms.values()), self.ring.coeff(0))

    # -- arithmetic --
    def _check(self, other: Polynomial):
        if not isinstance(other, Polynomial):
            return self.ring.const(other)
        if other.ring != self.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")
        return other

    def __add__(self, other):
        return poly_add(self, self._check(other))

    __radd__ = __add__

    def __neg__(self):
        return poly_scale(self, -1)

    def __sub__(self, other):
        return poly_add(self, -self._check(other))

    def __rsub__(self, other):
        return poly_add(-self, self._check(other))

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return poly_scale(self, other)
        return poly_mul(self, self._check(other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({render_polynomial(self)!r})"

    def __str__(self):
        return render_polynomial(self)


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.ring != b.ring:
        raise RingMismatchError(f"{a.ring} vs {b.ring}")
    out = dict(a._terms)
    for e, c in b._terms.items():
        out[e] = out.get(e, 0) + c
    return Polynomial(a.ring, out)


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.ring != b.ring:
        raise RingMismatchError(f"{a.ring} vs {b.ring}")
    if a.ring.modulus is not None:
        out: dict = {}
        for ea, ca in a._terms.items():
            for eb, cb in b._terms.items():
                e = tuple(x + z for x, z in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return Polynomial(a.ring, out)
    # over Q: multiply integer numerators over a common denominator
    na, da = _integral(a._terms)
    nb, db = _integral(b._terms)
    acc: dict = {}
    get = acc.get
    for ea, ca in na.items():
        for eb, cb in nb.items():
            e = tuple(x + z for x, z in zip(ea, eb))
            acc[e] = get(e, 0) + ca * cb
    den = da * db
    if den == 1:
        return Polynomial(a.ring, {e: Fraction(v) for e, v in acc.items() if v})
    return Polynomial(a.ring, {e: Fraction(v, den) for e, v in acc.items() if v})


def _integral(terms: Mapping) -> tuple[dict, int]:
    den = math.lcm(*(c.denominator for c in terms.values())) if terms else 1
    return {e: c.numerator * (den // c.denominator) for e, c in terms.items()}, den


def poly_scale(a: Polynomial, c) -> Polynomial:
    c = a.ring.coeff(c)
    return Polynomial(a.ring, {e: v * c for e, v in a._terms.items()})


def coefficients_in_y(f: Polynomial) -> list[tuple[int, Polynomial]]:
    """Split ``f`` as sum of coeff_k * y^k, highest degree first, zeros omitted."""
    buckets: dict[int, dict] = {}
    for e, c in f.items():
        buckets.setdefault(e[-1], {})[e[:-1] + (0,)] = c
    return [(k, Polynomial(f.ring, buckets[k])) for k in sorted(buckets, reverse=True)]


def from_y_coefficients(ring: Ring, coeffs: Iterable[tuple[int, Polynomial]]) -> Polynomial:
    out = ring.zero()
    for k, c in coeffs:
        out = out + c * ring.y**k
    return out


# -- rendering ---------------------------------------------------------------


def _render_coeff(c) -> str:
    return str(c)


def render_polynomial(f: Polynomial) -> str:
    if f.is_zero():
        return "0"
    names = f.ring.names
    pieces = []
    for e, c in f.items():
        if f.ring.modulus is not None and c > f.ring.modulus // 2:
            c = c - f.ring.modulus
        mono = "*".join(
            name if k == 1 else f"{name}^{k}" for name, k in zip(names, e) if k
        )
        neg = c < 0
        mag = -c if neg else c
        if not mono:
            body = _render_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_render_coeff(mag)}*{mono}"
        if not pieces:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f" - {body}" if neg else f" + {body}")
    return "".join(pieces)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialParseError(f"unexpected character {text[pos:].strip()[:1]!r} in {text!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    # expr := ['+'|'-'] term (('+'|'-') term)*
    # term := factor (('*'|'/') factor)*      ('/' only by integer literals)
    # factor := atom ('^' integer)?
    # atom := integer | name | '(' expr ')'

    def __init__(self, text: str, ring: Ring):
        self.text = text
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, msg):
        raise PolynomialParseError(f"{msg} in {self.text!r}")

    def parse(self) -> Polynomial:
        if not self.toks:
            self.fail("empty expression")
        out = self.expr()
        if self.i != len(self.toks):
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return out

    def expr(self):
        sign = 1
        if self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
        out = self.term() * sign
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.factor()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.factor()
            if op == "*":
                out = out * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    self.fail("division only by nonzero constants")
                out = out * self.ring.inv(rhs.constant_value())
        return out

    def factor(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            neg = False
            if self.peek() == ("op", "-"):
                self.take()
                neg = True
            kind, val = self.take()
            if kind != "num":
                self.fail("exponent must be an integer literal")
            if neg:
                self.fail("negative exponent")
            base = base ** int(val)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.ring.const(int(val))
        if kind == "name":
            if val not in self.ring.names:
                self.fail(f"unknown variable {val}")
            return self.ring.gen(val)
        if (kind, val) == ("op", "("):
            out = self.expr()
            if self.take() != ("op", ")"):
                self.fail("missing ')'")
            return out
        if kind is None:
            self.fail("unexpected end of expression")
        self.fail(f"unexpected token {val!r}")


def parse_polynomial(text: str, ring: Ring) -> Polynomial:
    """Parse an expression such as ``"t^2 - t*y"`` or ``"3/2*w^4"``."""
    if not isinstance(text, str):
        if isinstance(text, (int, Fraction)):
            return ring.const(text)
        raise PolynomialParseError(f"expected a string, got {type(text).__name__}")
    return _Parser(text, ring).parse()
