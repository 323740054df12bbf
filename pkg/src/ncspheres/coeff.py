"""Exact arithmetic in the Laurent ring Q[q, q^-1, l, l^-1].

``q`` is the real deformation parameter and ``l`` stands for the unimodular
phase exp(2 pi i theta).  The ring carries the conjugation that fixes ``q``
and sends ``l`` to ``l^-1``.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import DomainError

EXPONENT_BOUND = 2**31

Exponent = tuple[int, int]
ScalarLike = Union["Scalar", int, Fraction]


def _check_exponent(e: Exponent) -> Exponent:
    if abs(e[0]) >= EXPONENT_BOUND or abs(e[1]) >= EXPONENT_BOUND:
        raise OverflowError(f"exponent {e} out of range")
    return e


class Scalar:
    """Immutable element of Q[q^{+-1}, l^{+-1}].

    Stored as a mapping ``(e_q, e_l) -> Fraction`` with no zero coefficients.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, Union[int, Fraction]] | None = None):
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[_check_exponent((int(e[0]), int(e[1])))] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Exponent, Fraction]) -> "Scalar":
        s = cls.__new__(cls)
        s._terms = terms
        s._hash = None
        return s

    @classmethod
    def const(cls, c: Union[int, Fraction]) -> "Scalar":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, eq: int = 0, el: int = 0, c: Union[int, Fraction] = 1) -> "Scalar":
        return cls({(eq, el): c})

    @classmethod
    def coerce(cls, x: ScalarLike) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterable[tuple[Exponent, Fraction]]:
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {(0, 0)}

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def constant_term(self) -> Fraction:
        return self._terms.get((0, 0), Fraction(0))

    # arithmetic ---------------------------------------------------------

    def __add__(self, other: ScalarLike) -> "Scalar":
        other = Scalar.coerce(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Scalar._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: ScalarLike) -> "Scalar":
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other: ScalarLike) -> "Scalar":
        return Scalar.coerce(other) - self

    def __mul__(self, other: ScalarLike) -> "Scalar":
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO
            return Scalar._raw({e: c * other for e, c in self._terms.items()})
        other = Scalar.coerce(other)
        a, b = self._terms, other._terms
        if not a or not b:
            return ZERO
        if len(b) == 1 and (0, 0) in b:
            return self * b[(0, 0)]
        if len(a) == 1 and (0, 0) in a:
            return other * a[(0, 0)]
        out: dict[Exponent, Fraction] = {}
        for (p1, l1), c1 in a.items():
            for (p2, l2), c2 in b.items():
                e = (p1 + p2, l1 + l2)
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        for e in out:
            _check_exponent(e)
        return Scalar._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            if not self.is_monomial():
                raise DomainError("only monomials are invertible")
            (eq, el), c = next(iter(self._terms.items()))
            return Scalar({(eq * n, el * n): Fraction(c) ** n})
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Scalar.const(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # ring structure -----------------------------------------------------

    def conj(self) -> "Scalar":
        """Fix q, send l to l^-1; rationals are real."""
        return Scalar._raw({(eq, -el): c for (eq, el), c in self._terms.items()})

    def at_q(self, value: Union[int, Fraction]) -> "Scalar":
        """Substitute a nonzero rational for q, keeping l formal."""
        value = Fraction(value)
        if not value:
            raise DomainError("q must be nonzero")
        out: dict[Exponent, Fraction] = {}
        for (eq, el), c in self._terms.items():
            v = out.get((0, el), 0) + c * value**eq
            out[(0, el)] = v
        return Scalar(out)

    def at_l(self, value: int) -> "Scalar":
        """Substitute l = +-1 (rational unit values only)."""
        if value not in (1, -1):
            raise DomainError("l can only be specialised symbolically to +-1")
        out: dict[Exponent, Fraction] = {}
        for (eq, el), c in self._terms.items():
            out[(eq, 0)] = out.get((eq, 0), 0) + c * value**el
        return Scalar(out)

    def specialize(self, q_val: float, theta_val: float) -> complex:
        if not q_val > 0:
            raise DomainError(f"q must be positive, got {q_val}")
        lam = cmath.exp(2j * cmath.pi * theta_val)
        total = 0j
        for (eq, el), c in self._terms.items():
            total += float(c) * q_val**eq * lam**el
        return total

    def l_degrees(self) -> set[int]:
        return {el for _, el in self._terms}

    def q_degrees(self) -> set[int]:
        return {eq for eq, _ in self._terms}

    def exact_div(self, other: "Scalar") -> "Scalar | None":
        """Return ``self / other`` if it lies in the Laurent ring, else None."""
        if not other._terms:
            raise ZeroDivisionError("division by zero scalar")
        if not self._terms:
            return ZERO
        # shift both into Q[q, l] with zero minimal exponents
        sq = min(e[0] for e in self._terms)
        sl = min(e[1] for e in self._terms)
        oq = min(e[0] for e in other._terms)
        ol = min(e[1] for e in other._terms)
        num = {(a - sq, b - sl): c for (a, b), c in self._terms.items()}
        den = {(a - oq, b - ol): c for (a, b), c in other._terms.items()}
        lead_d = max(den)
        cd = den[lead_d]
        quot: dict[Exponent, Fraction] = {}
        rem = dict(num)
        while rem:
            lead = max(rem)
            eq, el = lead[0] - lead_d[0], lead[1] - lead_d[1]
            if eq < 0 or el < 0:
                return None
            factor = rem[lead] / cd
            quot[(eq, el)] = factor
            for (a, b), c in den.items():
                key = (a + eq, b + el)
                v = rem.get(key, 0) - factor * c
                if v:
                    rem[key] = v
                else:
                    rem.pop(key, None)
        shift = (sq - oq, sl - ol)
        return Scalar({(a + shift[0], b + shift[1]): c for (a, b), c in quot.items()})

    # text ---------------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        return sorted(self._terms.items())

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, ((eq, el), c) in enumerate(self.sorted_terms()):
            mono = []
            if eq:
                mono.append("q" if eq == 1 else f"q^{eq}")
            if el:
                mono.append("l" if el == 1 else f"l^{el}")
            mag = abs(c)
            if mono:
                body = "*".join(mono) if mag == 1 else f"{_frac(mag)}*" + "*".join(mono)
            else:
                body = _frac(mag)
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Scalar({self.to_text()!r})"


def _frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


ZERO = Scalar()
ONE = Scalar.const(1)
Q = Scalar.monomial(1, 0)
QINV = Scalar.monomial(-1, 0)
L = Scalar.monomial(0, 1)
LINV = Scalar.monomial(0, -1)


def scalar_mul(s1: Scalar, s2: Scalar) -> Scalar:
    return s1 * s2


def scalar_conj(s: Scalar) -> Scalar:
    return s.conj()


def scalar_specialize(s: Scalar, q_val: float, theta_val: float) -> complex:
    return s.specialize(q_val, theta_val)
