"""Sparse free-module elements shared by all the algebra layers.

Every element type in the package is a finite map from basis keys to exact
coefficients with no stored zeros; this base class holds the common add,
subtract, and scale machinery.  Subclasses carry their own context (the
quiver, possibly a dimension vector) and their own products.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import MismatchError
from .rings import HBarPolynomial


class LinearCombination:
    """Finite formal linear combination over an exact coefficient ring."""

    __slots__ = ("terms",)

    #: coefficient coercion; subclasses with Fraction coefficients override
    _coerce = staticmethod(HBarPolynomial.coerce)

    def __init__(self, terms=None):
        data = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for key, val in items:
                val = self._coerce(val)
                if not val:
                    continue
                if key in data:
                    val = data[key] + val
                    if val:
                        data[key] = val
                    else:
                        del data[key]
                else:
                    data[key] = val
        object.__setattr__(self, "terms", data)

    # Subclass hooks -------------------------------------------------------

    def _context(self) -> tuple:
        return ()

    def _with_terms(self, terms) -> "LinearCombination":
        raise NotImplementedError

    def _check_compatible(self, other) -> None:
        if type(other) is not type(self) or self._context() != other._context():
            raise MismatchError(
                f"incompatible operands: {type(self).__name__} vs {type(other).__name__}"
            )

    # Generic structure ----------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return self.terms.items()

    def coefficient(self, key):
        return self.terms.get(key, self._coerce(0))

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self._context() == other._context() and self.terms == other.terms

    def __hash__(self):
        raise TypeError(f"{type(self).__name__} is not hashable")

    def __add__(self, other):
        self._check_compatible(other)
        out = dict(self.terms)
        for key, val in other.terms.items():
            cur = out.get(key)
            val = val if cur is None else cur + val
            if val:
                out[key] = val
            elif cur is not None:
                del out[key]
        return self._with_terms(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._with_terms({k: -v for k, v in self.terms.items()})

    def scale(self, c):
        c = self._coerce(c)
        if not c:
            return self._with_terms({})
        return self._with_terms({k: v * c for k, v in self.terms.items()})

    def __repr__(self):
        if not self.terms:
            return f"{type(self).__name__}(0)"
        body = ", ".join(f"{k!r}: {v}" for k, v in self.terms.items())
        return f"{type(self).__name__}({{{body}}})"


def add_into(data: dict, key, value) -> None:
    """Accumulate ``value`` at ``key`` in a coefficient dict, dropping zeros."""
    cur = data.get(key)
    value = value if cur is None else cur + value
    if value:
        data[key] = value
    elif cur is not None:
        del data[key]


def fraction_coerce(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")
