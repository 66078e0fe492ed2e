import itertools
import random

import pytest

from cpcert import field
from cpcert.bdd import FALSE, OP_AND, OP_OR, TRUE, BddArena, BddError
from cpcert.brute import brute_force_count
from cpcert.field import HALF, P
from cpcert.generators import random_cpe
from cpcert.solver import BDDSolver, solve
from cpcert.unipoly import UniPoly


def multilinear_ext(arena, u, n, point):
    """Oracle: sum over binary b of f(b) * prod (x if b else 1-x)."""
    total = 0
    for bits in itertools.product((0, 1), repeat=n):
        bmap = {l: bits[l - 1] for l in range(1, n + 1)}
        if not arena.evaluate_binary(u, bmap):
            continue
        w = 1
        for l in range(1, n + 1):
            x = point[l]
            w = w * (x if bits[l - 1] else (1 - x)) % P
        total += w
    return total % P


def random_bdd(arena, rng, n, steps=8):
    u = arena.var(rng.randint(1, n))
    for _ in range(rng.randint(1, steps)):
        v = arena.var(rng.randint(1, n))
        if rng.random() < 0.5:
            v = arena.negate(v)
        u = arena.apply(rng.choice((OP_AND, OP_OR)), u, v)
    return u


@pytest.fixture
def arena():
    return BddArena()


@pytest.fixture
def three_terms_bdd(arena):
    x, y, z = arena.var(1), arena.var(2), arena.var(3)
    nx, ny, nz = arena.negate(x), arena.negate(y), arena.negate(z)
    t1 = arena.conj(arena.conj(x, y), nz)
    t2 = arena.conj(arena.conj(nx, y), z)
    t3 = arena.conj(arena.conj(x, ny), z)
    return arena.disj(arena.disj(t1, t2), t3)


class TestMk:
    def test_var(self, arena):
        u = arena.mk(1, FALSE, TRUE)
        assert u == arena.var(1)
        assert (arena.level[u], arena.lo[u], arena.hi[u]) == (1, FALSE, TRUE)

    def test_reduction(self, arena):
        u = arena.var(1)
        assert arena.mk(2, u, u) == u

    def test_hash_consing(self, arena):
        a = arena.mk(3, arena.var(1), arena.var(2))
        b = arena.mk(3, arena.var(1), arena.var(2))
        assert a == b

    def test_level_violation(self, arena):
        with pytest.raises(BddError):
            arena.mk(1, arena.var(2), TRUE)


class TestApply:
    def test_identities(self, arena):
        u = arena.disj(arena.var(1), arena.var(3))
        assert arena.apply(OP_AND, u, TRUE) == u
        assert arena.apply(OP_AND, u, FALSE) == FALSE
        assert arena.apply(OP_OR, u, FALSE) == u
        assert arena.apply(OP_OR, u, TRUE) == TRUE

    def test_or_xor_and_final(self, arena):
        x, y = arena.var(2), arena.var(1)
        xor = arena.disj(arena.conj(x, arena.negate(y)), arena.conj(arena.negate(x), y))
        both = arena.conj(x, y)
        assert arena.disj(xor, both) == arena.disj(x, y)

    def test_canonicity(self, arena, rng):
        # same predicate through different operation orders gives one handle
        for _ in range(100):
            vs = [arena.var(rng.randint(1, 6)) for _ in range(4)]
            a = arena.conj(arena.conj(vs[0], vs[1]), arena.disj(vs[2], vs[3]))
            b = arena.disj(arena.conj(arena.conj(vs[1], vs[0]), vs[3]),
                           arena.conj(vs[2], arena.conj(vs[0], vs[1])))
            assert a == b

    def test_invariants(self, arena, rng):
        for _ in range(50):
            random_bdd(arena, rng, 6)
        for w in range(2, len(arena)):
            assert arena.lo[w] != arena.hi[w]
            assert arena.level[w] > arena.level[arena.lo[w]]
            assert arena.level[w] > arena.level[arena.hi[w]]

    def test_unknown_op(self, arena):
        with pytest.raises(BddError):
            arena.apply(99, TRUE, TRUE)


class TestNegateRestrict:
    def test_negate(self, arena):
        assert arena.negate(TRUE) == FALSE
        u = arena.conj(arena.var(1), arena.var(2))
        assert arena.negate(arena.negate(u)) == u
        nx = arena.negate(arena.var(1))
        assert arena.count_models(nx, 1) == 1
        assert arena.evaluate_binary(nx, {1: 0})

    def test_restrict(self, arena, three_terms_bdd):
        assert arena.restrict(arena.var(1), 1, 1) == TRUE
        u = arena.var(2)
        assert arena.restrict(u, 1, 0) == u
        assert arena.restrict(three_terms_bdd, 3, 0) == arena.conj(arena.var(1), arena.var(2))


class TestCount:
    def test_examples(self, arena, three_terms_bdd):
        assert arena.count_models(TRUE, 3) == 8
        assert arena.count_models(FALSE, 5) == 0
        assert arena.count_models(three_terms_bdd, 3) == 3

    def test_against_enumeration(self, arena, rng):
        for _ in range(100):
            n = rng.randint(1, 8)
            u = random_bdd(arena, rng, n)
            want = sum(arena.evaluate_binary(u, dict(zip(range(1, n + 1), bits)))
                       for bits in itertools.product((0, 1), repeat=n))
            assert arena.count_models(u, n) == want

    def test_big_counts(self, arena):
        assert arena.count_models(TRUE, 100) == 1 << 100

    def test_n_below_root(self, arena):
        with pytest.raises(BddError):
            arena.count_models(arena.var(3), 2)


class TestEval:
    def test_three_terms(self, arena, three_terms_bdd):
        q = arena.eval_bdd(three_terms_bdd, {1: 1, 2: 1, 3: 0})
        assert q.coeffs() == (1, 0, 0)
        # x=1, z=0, y free -> y
        q = arena.eval_bdd(three_terms_bdd, {1: 1, 3: 0}, var=2)
        assert q == UniPoly(0, 1, 0, 2)

    def test_three_terms_polynomial(self, arena, three_terms_bdd, rng):
        # xy + yz + zx - 3xyz at random points
        for _ in range(20):
            x, y, z = (field.random(rng) for _ in range(3))
            want = (x * y + y * z + z * x - 3 * x * y * z) % P
            assert arena.eval_bdd(three_terms_bdd, {1: x, 2: y, 3: z}).c0 == want

    def test_true(self, arena):
        assert arena.eval_bdd(TRUE, {}).coeffs() == (1, 0, 0)

    def test_two_missing(self, arena):
        u = arena.conj(arena.var(1), arena.var(2))
        with pytest.raises(BddError):
            arena.eval_bdd(u, {})

    def test_binary_points(self, arena, rng):
        pairs = 0
        while pairs < 1000:
            n = rng.randint(1, 6)
            u = random_bdd(arena, rng, n)
            bits = {l: rng.randint(0, 1) for l in range(1, n + 1)}
            v = arena.eval_bdd(u, bits).c0
            assert v in (0, 1)
            assert v == int(arena.evaluate_binary(u, bits))
            pairs += 1

    def test_against_multilinear_oracle(self, arena, rng):
        for _ in range(60):
            n = rng.randint(1, 6)
            u = random_bdd(arena, rng, n)
            point = {l: field.random(rng) for l in range(1, n + 1)}
            assert arena.eval_bdd(u, point).c0 == multilinear_ext(arena, u, n, point)
            # leave one level open: the line through it matches the oracle
            f = rng.randint(1, n)
            q = arena.eval_bdd(u, {l: v for l, v in point.items() if l != f})
            assert q.c2 == 0
            assert q(point[f]) == multilinear_ext(arena, u, n, point)

    def test_half_point_count(self, arena, rng):
        for _ in range(100):
            n = rng.randint(1, 8)
            u = random_bdd(arena, rng, n)
            half = arena.eval_bdd(u, {l: HALF for l in range(1, n + 1)}).c0
            assert half * pow(2, n, P) % P == arena.count_models(u, n) % P

    def test_dot(self, arena):
        text = arena.to_dot(arena.var(1))
        assert text.startswith("digraph") and "dashed" in text


class TestSolver:
    def test_matches_brute(self, rng):
        for _ in range(200):
            dag = random_cpe(rng)
            s = BDDSolver(dag)
            s.build()
            count = s.count()
            assert count == brute_force_count(dag)
            assert s.half_value() * pow(2, dag.n, P) % P == count % P

    def test_solve_small_qbf(self, small_qbf):
        assert solve(small_qbf) == 1
