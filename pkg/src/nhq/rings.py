"""Exact coefficient arithmetic: rationals and dense polynomials in h.

Every identity in this package is checked by exact equality, so scalars are
``fractions.Fraction`` values and the deformation parameter h stays a formal
polynomial variable.  Nothing here ever becomes a float.
"""

from __future__ import annotations

from fractions import Fraction


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class HBarPolynomial:
    """Polynomial in h over the rationals, stored densely by degree.

    No trailing zero coefficients are kept; the zero polynomial has an empty
    coefficient tuple.  Instances are immutable and hashable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        buf = [as_fraction(c) for c in coeffs]
        while buf and buf[-1] == 0:
            buf.pop()
        object.__setattr__(self, "coeffs", tuple(buf))

    def __setattr__(self, name, value):
        raise AttributeError("HBarPolynomial is immutable")

    @classmethod
    def constant(cls, c) -> "HBarPolynomial":
        return cls((as_fraction(c),))

    @classmethod
    def zero(cls) -> "HBarPolynomial":
        return _ZERO

    @classmethod
    def one(cls) -> "HBarPolynomial":
        return _ONE

    @classmethod
    def h(cls, power: int = 1) -> "HBarPolynomial":
        return cls((0,) * power + (1,))

    @staticmethod
    def coerce(value) -> "HBarPolynomial":
        if isinstance(value, HBarPolynomial):
            return value
        return HBarPolynomial((as_fraction(value),))

    # -- structure ---------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @property
    def degree(self) -> int:
        """Degree in h; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def constant_term(self) -> Fraction:
        return self.coefficient(0)

    def is_divisible_by_h(self) -> bool:
        return not self.coeffs or self.coeffs[0] == 0

    def div_h(self) -> "HBarPolynomial":
        """Exact division by h; raises if the constant term is nonzero."""
        if not self.is_divisible_by_h():
            raise ArithmeticError(f"{self} is not divisible by h")
        return HBarPolynomial(self.coeffs[1:])

    def shift(self, k: int) -> "HBarPolynomial":
        """Multiply by h**k."""
        if not self.coeffs or k == 0:
            return self
        return HBarPolynomial((0,) * k + self.coeffs)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "HBarPolynomial":
        other = HBarPolynomial.coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return HBarPolynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "HBarPolynomial":
        return HBarPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "HBarPolynomial":
        return self + (-HBarPolynomial.coerce(other))

    def __rsub__(self, other) -> "HBarPolynomial":
        return HBarPolynomial.coerce(other) + (-self)

    def __mul__(self, other) -> "HBarPolynomial":
        other = HBarPolynomial.coerce(other)
        if not self.coeffs or not other.coeffs:
            return _ZERO
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return HBarPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = HBarPolynomial.coerce(other)
        if not isinstance(other, HBarPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        pieces = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                body = str(c)
            else:
                hk = "h" if k == 1 else f"h^{k}"
                if c == 1:
                    body = hk
                elif c == -1:
                    body = "-" + hk
                else:
                    body = f"{c}*{hk}"
            pieces.append(body)
        out = pieces[0]
        for body in pieces[1:]:
            if body.startswith("-"):
                out += " - " + body[1:]
            else:
                out += " + " + body
        return out

    def __repr__(self) -> str:
        return f"HBarPolynomial({self})"


_ZERO = HBarPolynomial()
_ONE = HBarPolynomial((1,))
H = HBarPolynomial.h()
ONE = _ONE
ZERO = _ZERO
