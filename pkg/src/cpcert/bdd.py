"""Hash-consed reduced ordered BDDs without complement edges.

Nodes are ints indexing parallel lists; 0 is FALSE and 1 is TRUE, both at
level 0.  A node at level L decides the variable at level L, and children
always sit at strictly lower levels.
"""

import sys

from . import field
from .field import P
from .unipoly import UniPoly

FALSE, TRUE = 0, 1
OP_AND, OP_OR = "and", "or"

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class BddError(ValueError):
    pass


class BddArena:
    def __init__(self):
        self.level = [0, 0]
        self.lo = [0, 1]
        self.hi = [0, 1]
        self.unique = {}
        self._memo = {OP_AND: {}, OP_OR: {}}
        self._neg = {FALSE: TRUE, TRUE: FALSE}
        self.apply_calls = 0

    def __len__(self):
        return len(self.level)

    def mk(self, level, lo, hi):
        if lo == hi:
            return lo
        lv = self.level
        if level <= lv[lo] or level <= lv[hi]:
            raise BddError("level %d not above children (%d, %d)" % (level, lv[lo], lv[hi]))
        key = (level, lo, hi)
        u = self.unique.get(key)
        if u is None:
            u = len(lv)
            lv.append(level)
            self.lo.append(lo)
            self.hi.append(hi)
            self.unique[key] = u
        return u

    def var(self, level):
        return self.mk(level, FALSE, TRUE)

    def clear_caches(self):
        self._memo = {OP_AND: {}, OP_OR: {}}

    # -- apply ----------------------------------------------------------

    def apply(self, op, u, v):
        if op == OP_AND:
            return self._and(u, v, self._memo[OP_AND])
        if op == OP_OR:
            return self._or(u, v, self._memo[OP_OR])
        raise BddError("unknown operator %r" % (op,))

    def _and(self, u, v, memo):
        if u == FALSE or v == FALSE:
            return FALSE
        if u == TRUE or u == v:
            return v
        if v == TRUE:
            return u
        if u > v:
            u, v = v, u
        key = (u, v)
        r = memo.get(key)
        if r is not None:
            return r
        self.apply_calls += 1
        lv, lo, hi = self.level, self.lo, self.hi
        lu, lw = lv[u], lv[v]
        if lu == lw:
            r = self.mk(lu, self._and(lo[u], lo[v], memo), self._and(hi[u], hi[v], memo))
        elif lu > lw:
            r = self.mk(lu, self._and(lo[u], v, memo), self._and(hi[u], v, memo))
        else:
            r = self.mk(lw, self._and(u, lo[v], memo), self._and(u, hi[v], memo))
        memo[key] = r
        return r

    def _or(self, u, v, memo):
        if u == TRUE or v == TRUE:
            return TRUE
        if u == FALSE or u == v:
            return v
        if v == FALSE:
            return u
        if u > v:
            u, v = v, u
        key = (u, v)
        r = memo.get(key)
        if r is not None:
            return r
        self.apply_calls += 1
        lv, lo, hi = self.level, self.lo, self.hi
        lu, lw = lv[u], lv[v]
        if lu == lw:
            r = self.mk(lu, self._or(lo[u], lo[v], memo), self._or(hi[u], hi[v], memo))
        elif lu > lw:
            r = self.mk(lu, self._or(lo[u], v, memo), self._or(hi[u], v, memo))
        else:
            r = self.mk(lw, self._or(u, lo[v], memo), self._or(u, hi[v], memo))
        memo[key] = r
        return r

    def conj(self, u, v):
        return self.apply(OP_AND, u, v)

    def disj(self, u, v):
        return self.apply(OP_OR, u, v)

    def negate(self, u):
        memo = self._neg
        r = memo.get(u)
        if r is None:
            r = self.mk(self.level[u], self.negate(self.lo[u]), self.negate(self.hi[u]))
            memo[u] = r
            memo[r] = u
        return r

    def restrict(self, u, level, b, memo=None):
        """<x := b> u where x is the variable at ``level``."""
        if memo is None:
            memo = {}
        lu = self.level[u]
        if lu < level:
            return u
        if lu == level:
            return self.hi[u] if b else self.lo[u]
        r = memo.get(u)
        if r is None:
            r = self.mk(lu, self.restrict(self.lo[u], level, b, memo),
                        self.restrict(self.hi[u], level, b, memo))
            memo[u] = r
        return r

    # -- queries ----------------------------------------------------------

    def nodes(self, u):
        """All nodes reachable from u (including terminals)."""
        seen = {u}
        stack = [u]
        lo, hi = self.lo, self.hi
        while stack:
            w = stack.pop()
            if w > TRUE:
                for c in (lo[w], hi[w]):
                    if c not in seen:
                        seen.add(c)
                        stack.append(c)
        return seen

    def size(self, u):
        return len(self.nodes(u))

    def count_models(self, u, n):
        """Satisfying assignments of u over the variables at levels 1..n."""
        if n < self.level[u]:
            raise BddError("n=%d below the level of the root (%d)" % (n, self.level[u]))
        lv, lo, hi = self.level, self.lo, self.hi
        memo = {FALSE: 0, TRUE: 1}

        def cnt(w):
            # models over levels 1..level(w)
            r = memo.get(w)
            if r is None:
                l = lv[w]
                a, b = lo[w], hi[w]
                r = (cnt(a) << (l - 1 - lv[a])) + (cnt(b) << (l - 1 - lv[b]))
                memo[w] = r
            return r

        return cnt(u) << (n - lv[u])

    def evaluate_binary(self, u, bits):
        """Boolean value under ``bits`` (level -> 0/1)."""
        while u > TRUE:
            u = self.hi[u] if bits[self.level[u]] else self.lo[u]
        return u == TRUE

    def eval_const(self, u, sigma, memo):
        """Field value of u when every level of u is assigned in ``sigma``."""
        r = memo.get(u)
        if r is not None:
            return r
        lo, hi = self.lo[u], self.hi[u]
        a = memo.get(lo)
        if a is None:
            a = self.eval_const(lo, sigma, memo)
        b = memo.get(hi)
        if b is None:
            b = self.eval_const(hi, sigma, memo)
        r = (a + sigma[self.level[u]] * (b - a)) % P
        memo[u] = r
        return r

    def eval_lin(self, u, sigma, free, cmemo, lmemo):
        """Value of u as a pair (a, b) meaning a + b*x_free.

        Nodes below ``free`` are constants and use ``cmemo``.
        """
        l = self.level[u]
        if l < free:
            r = cmemo.get(u)
            return (r if r is not None else self.eval_const(u, sigma, cmemo)), 0
        r = lmemo.get(u)
        if r is not None:
            return r
        if l == free:
            a = self.eval_const(self.lo[u], sigma, cmemo)
            b = self.eval_const(self.hi[u], sigma, cmemo)
            r = (a, (b - a) % P)
        else:
            a0, b0 = self.eval_lin(self.lo[u], sigma, free, cmemo, lmemo)
            a1, b1 = self.eval_lin(self.hi[u], sigma, free, cmemo, lmemo)
            s = sigma[l]
            r = ((a0 + s * (a1 - a0)) % P, (b0 + s * (b1 - b0)) % P)
        lmemo[u] = r
        return r

    def eval_bdd(self, u, sigma, var=None):
        """Univariate polynomial of u under ``sigma`` (level -> field value).

        At most one level of u may be missing from sigma; that level is the
        free variable of the result.
        """
        free = missing_level(self, u, sigma)
        if free is None:
            return UniPoly(self.eval_const(u, sigma, {FALSE: 0, TRUE: 1}), 0, 0, var)
        a, b = self.eval_lin(u, sigma, free, {FALSE: 0, TRUE: 1}, {})
        return UniPoly(a, b, 0, var)

    def to_dot(self, u, names=None):
        lines = ["digraph bdd {"]
        for w in sorted(self.nodes(u)):
            if w <= TRUE:
                lines.append('  n%d [shape=box,label="%d"];' % (w, w))
                continue
            l = self.level[w]
            label = names[l] if names else "x@%d" % l
            lines.append('  n%d [label="%s"];' % (w, label))
            lines.append("  n%d -> n%d [style=dashed];" % (w, self.lo[w]))
            lines.append("  n%d -> n%d;" % (w, self.hi[w]))
        lines.append("}")
        return "\n".join(lines)


def missing_level(arena, u, sigma):
    """The unique level of u's support absent from sigma, or None.

    Raises BddError when more than one level is missing.
    """
    free = None
    for w in arena.nodes(u):
        if w > TRUE:
            l = arena.level[w]
            if l not in sigma and l != free:
                if free is not None:
                    raise BddError("more than one free variable (levels %d, %d)" % (free, l))
                free = l
    return free
