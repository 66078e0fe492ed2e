"""Univariate polynomials of degree at most 2 over GF(p)."""

from typing import NamedTuple, Optional

from . import field
from .field import P

POLY_BYTES = 3 * field.ELEM_BYTES


class DegreeError(ValueError):
    pass


class UniPoly(NamedTuple):
    """c0 + c1*x + c2*x^2. ``var`` records which variable x stands for, if any."""

    c0: int
    c1: int = 0
    c2: int = 0
    var: Optional[int] = None

    @classmethod
    def const(cls, c, var=None):
        return cls(c % P, 0, 0, var)

    @classmethod
    def from_coeffs(cls, coeffs, var=None):
        coeffs = [c % P for c in coeffs]
        while len(coeffs) > 3 and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) > 3:
            raise DegreeError("degree %d exceeds 2" % (len(coeffs) - 1))
        coeffs += [0] * (3 - len(coeffs))
        return cls(coeffs[0], coeffs[1], coeffs[2], var)

    def coeffs(self):
        return (self.c0, self.c1, self.c2)

    @property
    def degree(self):
        if self.c2:
            return 2
        if self.c1:
            return 1
        return 0

    def __call__(self, r):
        return eval_poly(self, r)

    def add(self, other):
        return UniPoly((self.c0 + other.c0) % P, (self.c1 + other.c1) % P,
                       (self.c2 + other.c2) % P, self.var if self.var is not None else other.var)

    def sub(self, other):
        return UniPoly((self.c0 - other.c0) % P, (self.c1 - other.c1) % P,
                       (self.c2 - other.c2) % P, self.var if self.var is not None else other.var)

    def scale(self, c):
        return UniPoly(self.c0 * c % P, self.c1 * c % P, self.c2 * c % P, self.var)

    def mul(self, other):
        """Product; raises DegreeError if the result would have degree > 2."""
        a, b = self, other
        c3 = (a.c1 * b.c2 + a.c2 * b.c1) % P
        c4 = a.c2 * b.c2 % P
        if c3 or c4:
            raise DegreeError("product has degree > 2")
        return UniPoly(a.c0 * b.c0 % P, (a.c0 * b.c1 + a.c1 * b.c0) % P,
                       (a.c0 * b.c2 + a.c1 * b.c1 + a.c2 * b.c0) % P,
                       a.var if a.var is not None else b.var)

    def to_bytes(self):
        return field.to_bytes(self.c0) + field.to_bytes(self.c1) + field.to_bytes(self.c2)

    @classmethod
    def from_bytes(cls, data, var=None):
        if len(data) != POLY_BYTES:
            raise ValueError("expected %d bytes, got %d" % (POLY_BYTES, len(data)))
        return cls(field.from_bytes(data[0:8]), field.from_bytes(data[8:16]),
                   field.from_bytes(data[16:24]), var)

    def is_canonical(self):
        return self.c0 < P and self.c1 < P and self.c2 < P

    def __str__(self):
        name = "x%d" % self.var if self.var is not None else "x"
        terms = []
        for c, mono in ((self.c0, ""), (self.c1, name), (self.c2, name + "^2")):
            if c:
                terms.append(("%d*%s" % (c, mono)) if mono and c != 1 else (mono or str(c)))
        return " + ".join(terms) if terms else "0"


def eval_poly(q, r):
    return (q.c0 + (q.c1 + q.c2 * r) * r) % P


def degree_reduce(q):
    """Fold x^2 down to x: c0 + c1 x + c2 x^2  ->  c0 + (c1 + c2) x."""
    return UniPoly(q.c0, (q.c1 + q.c2) % P, 0, q.var)


def interpolate3(v0, v1, v2, var=None):
    """The unique polynomial of degree <= 2 with q(0)=v0, q(1)=v1, q(2)=v2."""
    # second difference gives 2*c2
    c2 = (v2 - 2 * v1 + v0) * field.HALF % P
    c1 = (v1 - v0 - c2) % P
    return UniPoly(v0 % P, c1, c2, var)
