"""Symplectic similitude groups mod n.

Thin wrapper over the compiled ``_symon`` module. Big integers come back as
``int``, exact rationals as ``fractions.Fraction`` and reports as dicts with
the same key order as the command-line tool.
"""

import json
from fractions import Fraction

from . import _symon
from ._symon import BudgetExceeded, DomainError, SpecialSet, SymonError, event_x

__all__ = [
    "BudgetExceeded",
    "DomainError",
    "SpecialSet",
    "SymonError",
    "borel_cantelli",
    "density",
    "enumerate_group",
    "event_x",
    "exact_mu_x",
    "gsp_order",
    "hit_frequency",
    "independence",
    "is_member",
    "mu_x",
    "multiplier",
    "orders",
    "part_b_term",
    "sample",
    "series_part_a",
    "series_part_b",
    "sp_order",
    "special_set",
    "verify_counts",
]


def _q(q):
    return "inf" if q is None else str(q)


def sp_order(g, ell):
    return int(_symon.sp_order(g, ell))


def gsp_order(g, n, q=None):
    """|GSp^(q)_2g(Z/n)|; q=None means every unit multiplier."""
    return int(_symon.gsp_order(g, n, _q(q)))


def orders(g, n, q=None):
    return json.loads(_symon.orders(g, n, _q(q)))


def multiplier(matrix, n, q=None):
    """Similitude factor of ``matrix`` mod n, or None if it is not a similitude."""
    return _symon.multiplier(matrix, n, _q(q))


def is_member(matrix, n, q=None):
    return _symon.is_member(matrix, n, _q(q))


def enumerate_group(g, ell, lam=None, q=None, budget=None):
    """All members as nested lists, in row-major lexicographic order."""
    return _symon.enumerate(g, ell, lam, _q(q), budget)


def sample(g, n, q=None, e=1, seed=42, index=0):
    return _symon.sample(g, n, _q(q), e, seed, index)


def density(g, ell, q=None):
    return Fraction(_symon.density(g, ell, _q(q)))


def exact_mu_x(g, ell, e):
    return Fraction(_symon.exact_mu_x(g, ell, e))


def part_b_term(g, e, ell):
    b = json.loads(_symon.part_b_term(g, e, ell))
    return Fraction(b["lower"]), Fraction(b["upper"])


def special_set(g, ell, q=2, level="Sq", lam=None, strategy="lex", materialize=True):
    return _symon.special_set(g, ell, _q(q), level, lam, strategy, materialize)


def verify_counts(g=(2,), ells=(3, 5), qs=(2, None), strategy="lex"):
    return json.loads(_symon.verify_counts(list(g), list(ells), [_q(q) for q in qs], strategy))


def series_part_a(g, q, ell_max, threads=1):
    return json.loads(_symon.series_part_a(g, _q(q), ell_max, threads))


def series_part_b(g, e, ell_max, threads=1):
    return json.loads(_symon.series_part_b(g, e, ell_max, threads))


def hit_frequency(g, n, q=2, samples=100000, seed=42, strategy="lex", threads=1):
    return json.loads(_symon.hit_frequency(g, n, _q(q), samples, seed, strategy, threads))


def independence(g, ells, q=2, samples=100000, seed=42, threads=1):
    return json.loads(_symon.independence(g, list(ells), _q(q), samples, seed, threads))


def mu_x(g, ell, e, q=2, samples=100000, seed=42, threads=1):
    return json.loads(_symon.mu_x(g, ell, e, _q(q), samples, seed, threads))


def borel_cantelli(g, ells, e, q=2, samples=10000, seed=42, threshold=None, threads=1):
    return json.loads(_symon.borel_cantelli(g, list(ells), e, _q(q), samples, seed, threshold, threads))
