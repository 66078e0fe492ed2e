"""Arithmetic in GF(p) with the Mersenne prime p = 2^61 - 1.

Field elements are plain Python ints kept in canonical range [0, p).
"""

P = (1 << 61) - 1
HALF = 1 << 60  # 2^-1 mod P, i.e. (P + 1) // 2
ELEM_BYTES = 8


def reduce(x):
    """Reduce a nonnegative integer below 2^122 (or so) using Mersenne folding."""
    x = (x >> 61) + (x & P)
    x = (x >> 61) + (x & P)
    if x >= P:
        x -= P
    return x


def add(a, b):
    s = a + b
    if s >= P:
        s -= P
    return s


def sub(a, b):
    d = a - b
    if d < 0:
        d += P
    return d


def neg(a):
    return P - a if a else 0


def mul(a, b):
    # the product of two canonical elements is < 2^122; two folds bring it
    # below 2^61 + 1, then one conditional subtract finishes the job
    x = a * b
    x = (x >> 61) + (x & P)
    x = (x >> 61) + (x & P)
    if x >= P:
        x -= P
    return x


def inv(a):
    """Multiplicative inverse via extended Euclid. Raises ZeroDivisionError for 0."""
    a %= P
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(p)")
    t, new_t = 0, 1
    r, new_r = P, a
    while new_r:
        q = r // new_r
        t, new_t = new_t, t - q * new_t
        r, new_r = new_r, r - q * new_r
    return t % P


def half():
    return HALF


def power(a, e):
    return pow(a, e, P)


def random(rng):
    """Uniform element of GF(p) drawn from ``rng`` (anything with getrandbits).

    Rejection sampling on 61-bit draws; the only rejected value is P itself.
    """
    while True:
        x = rng.getrandbits(61)
        if x < P:
            return x


def canonical(x):
    return 0 <= x < P


def to_bytes(a):
    return a.to_bytes(ELEM_BYTES, "little")


def from_bytes(b):
    """Decode 8 little-endian bytes. Does not check canonicity; use canonical()."""
    return int.from_bytes(b, "little")
