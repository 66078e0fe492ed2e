"""Soundness error bound 4 n |phi| / p of one protocol run."""

import math
from fractions import Fraction

from ..field import P


def soundness_bound(n, size):
    """Exact bound as a Fraction (0 when n = 0)."""
    return Fraction(4 * n * size, P)


def bound_decimal(bound, digits=3):
    if bound == 0:
        return "0"
    return "%.*e" % (digits - 1, bound.numerator / bound.denominator)


def bound_log10(bound):
    if bound == 0:
        return None
    return math.log10(bound.numerator) - math.log10(bound.denominator)


def dag_bound(dag):
    return soundness_bound(dag.n, dag.size())
