"""Monomial orders: lex, graded reverse lex, and block (elimination) orders.

An order maps an exponent tuple to a sort key; larger key = larger
monomial.  Block orders compare the leading group first, which gives
the elimination property when the dropped variables form that group.
"""

from __future__ import annotations


class MonomialOrder:
    name = "order"

    def key(self, expts: tuple):  # pragma: no cover - interface
        raise NotImplementedError

    def sort_terms(self, terms) -> list:
        """Monomials of a term dict in decreasing order."""
        return sorted(terms, key=self.key, reverse=True)

    def leading(self, terms) -> tuple:
        return max(terms, key=self.key)

    def __repr__(self):
        return self.name


class Lex(MonomialOrder):
    name = "lex"

    def key(self, expts):
        return expts


class GrevLex(MonomialOrder):
    name = "grevlex"

    def key(self, expts):
        return (sum(expts), tuple(-e for e in reversed(expts)))


class Block(MonomialOrder):
    """Elimination order: the first ``size`` variables dominate.

    Requires the arena to be arranged with the dropped block first.
    """

    def __init__(self, size: int, outer: MonomialOrder | None = None,
                 inner: MonomialOrder | None = None):
        self.size = size
        self.outer = outer or GrevLex()
        self.inner = inner or GrevLex()
        self.name = f"block({size};{self.outer.name},{self.inner.name})"

    def key(self, expts):
        return (self.outer.key(expts[:self.size]), self.inner.key(expts[self.size:]))


def by_name(name: str) -> MonomialOrder:
    name = name.lower()
    if name == "lex":
        return Lex()
    if name in ("grevlex", "graded-reverse-lex"):
        return GrevLex()
    raise ValueError(f"unknown monomial order {name!r}")
