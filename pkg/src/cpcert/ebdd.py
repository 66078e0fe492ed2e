"""Extended BDDs: the sequence of degree reductions produced by a
breadth-first Apply.

``compute_ebdd(arena, op, u1, u2)`` builds the graph of product nodes
<u op v> that a breadth-first Apply visits.  With n the top level of the two
operands, w_0 is the single product <u1 op u2>, and w_{i+1} is obtained from
w_i by replacing every product at level n-i with the BDD node deciding that
level over the products (or BDDs) of the cofactors.  So w_i is the view in
which exactly the products above level n-i are expanded, and w_n is the BDD
Apply would return.

Products with a terminal operand are *trivial*: their polynomial equals a
known BDD exactly (u and 1 is u, u or 0 is u, ...), so they are recorded
with that result and not expanded further.  Products of two terminals
collapse to a terminal right away.

References into the product graph are ints: r >= 0 is a plain BDD node,
r < 0 is product number -1-r.
"""

import bisect
from . import field
from .bdd import FALSE, OP_AND, OP_OR, TRUE, BddError
from .field import P
from .unipoly import UniPoly


class EbddError(ValueError):
    pass


def _trivial(op, u, v):
    """BDD equal (as a polynomial) to <u op v>, or None. Needs a terminal operand."""
    if op == OP_AND:
        if u == FALSE or v == FALSE:
            return FALSE
        if u == TRUE:
            return v
        if v == TRUE:
            return u
    else:
        if u == TRUE or v == TRUE:
            return TRUE
        if u == FALSE:
            return v
        if v == FALSE:
            return u
    return None


class EbddDiffLog:
    """The product graph of one breadth-first Apply.

    Attributes
    ----------
    n : top level of the operands (length of the reduction sequence)
    root : reference of w_0
    final : BDD of w_n (equals Apply's result)
    plevel, pu, pv : level and operands of each product
    c0, c1 : child references of non-trivial products (None for trivial ones)
    result : BDD each product resolves to
    diffs : level -> products expanded at that level
    """

    def __init__(self, arena, op, u1, u2):
        self.arena = arena
        self.op = op
        self.u1 = u1
        self.u2 = u2
        self.plevel = []
        self.pu = []
        self.pv = []
        self.c0 = []
        self.c1 = []
        self.result = []
        self.expand_levels = {}
        self._diffs = None
        self._by_level = None
        lv = arena.level
        self.n = max(lv[u1], lv[u2])
        self.root = None
        self.final = None

    # convenience --------------------------------------------------------

    @property
    def num_products(self):
        return len(self.plevel)

    def is_trivial(self, pid):
        return self.c0[pid] is None

    def product_level(self, ref):
        return self.plevel[-1 - ref] if ref < 0 else self.arena.level[ref]

    def resolve(self, ref):
        return self.result[-1 - ref] if ref < 0 else ref

    @property
    def diffs(self):
        """level -> products replaced at that level (expanded or trivial)."""
        if self._diffs is None:
            d = {L: list(b) for L, b in self.expand_levels.items()}
            for pid, c in enumerate(self.c0):
                if c is None:
                    d.setdefault(self.plevel[pid], []).append(pid)
            for b in d.values():
                b.sort()
            self._diffs = d
        return self._diffs

    def above(self, theta):
        """Products with level > theta, lowest level first."""
        if self._by_level is None:
            order = sorted(range(len(self.plevel)), key=self.plevel.__getitem__)
            self._by_level = (order, [self.plevel[p] for p in order])
        order, keys = self._by_level
        return order[bisect.bisect_right(keys, theta):]

    def diff(self, i):
        """Products replaced when going from w_i to w_{i+1}."""
        if not 0 <= i < self.n:
            raise EbddError("diff index %d out of range 0..%d" % (i, self.n - 1))
        return list(self.diffs.get(self.n - i, ()))


def compute_ebdd(arena, op, u1, u2):
    if op not in (OP_AND, OP_OR):
        raise EbddError("unknown operator %r" % (op,))
    log = EbddDiffLog(arena, op, u1, u2)
    lv, lo, hi = arena.level, arena.lo, arena.hi
    is_and = op == OP_AND
    plevel = []
    pkey = []     # (u, v) operands, u <= v
    kids = []     # (child0, child1) once expanded; None for trivial products
    triv = {}     # pid -> BDD equal to a trivial product
    table = {}
    buckets = {}

    def product(key):
        # create a product for a key not yet in the table
        u, v = key
        if v <= TRUE:
            # both terminals: collapse to the truth-table value
            ref = (u & v) if is_and else (u | v)
            table[key] = ref
            return ref
        pid = len(plevel)
        lu, lw = lv[u], lv[v]
        L = lu if lu > lw else lw
        plevel.append(L)
        pkey.append(key)
        kids.append(None)
        if u <= TRUE:
            # one terminal operand: the product equals a known BDD
            if is_and:
                triv[pid] = FALSE if u == FALSE else v
            else:
                triv[pid] = TRUE if u == TRUE else v
        else:
            b = buckets.get(L)
            if b is None:
                buckets[L] = [pid]
            else:
                b.append(pid)
        ref = -1 - pid
        table[key] = ref
        return ref

    key = (u1, u2) if u1 <= u2 else (u2, u1)
    log.root = product(key)
    get = table.get
    # breadth-first: level by level from the top; children are strictly lower
    for L in range(log.n, 0, -1):
        b = buckets.get(L)
        if not b:
            continue
        for pid in b:
            u, v = pkey[pid]
            if lv[u] == L:
                ua, ub = lo[u], hi[u]
            else:
                ua = ub = u
            if lv[v] == L:
                va, vb = lo[v], hi[v]
            else:
                va = vb = v
            k0 = (ua, va) if ua <= va else (va, ua)
            r0 = get(k0)
            if r0 is None:
                r0 = product(k0)
            k1 = (ub, vb) if ub <= vb else (vb, ub)
            r1 = get(k1)
            if r1 is None:
                r1 = product(k1)
            kids[pid] = (r0, r1)
    # resolve bottom-up
    result = [-1] * len(plevel)
    for pid, r in triv.items():
        result[pid] = r
    mk = arena.mk
    for L in range(1, log.n + 1):
        b = buckets.get(L)
        if not b:
            continue
        for pid in b:
            a, c = kids[pid]
            if a < 0:
                a = result[-1 - a]
            if c < 0:
                c = result[-1 - c]
            result[pid] = mk(L, a, c) if a != c else a
    log.plevel = plevel
    log.pu = [k[0] for k in pkey]
    log.pv = [k[1] for k in pkey]
    log.c0 = [k[0] if k else None for k in kids]
    log.c1 = [k[1] if k else None for k in kids]
    log.result = result
    log.expand_levels = buckets
    log.final = log.resolve(log.root)
    return log


class EbddView:
    """Read view of w_i: products above ``theta`` = n - i are expanded."""

    def __init__(self, log, i):
        if not 0 <= i <= log.n:
            raise EbddError("chain index %d out of range 0..%d" % (i, log.n))
        self.log = log
        self.i = i
        self.theta = log.n - i

    def is_expanded(self, pid):
        return self.log.plevel[pid] > self.theta

    def frontier(self):
        """Product nodes of w_i (reachable and not expanded), as product ids."""
        log = self.log
        out = []
        seen = set()
        stack = [log.root] if log.root < 0 else []
        while stack:
            ref = stack.pop()
            pid = -1 - ref
            if pid in seen:
                continue
            seen.add(pid)
            if self.is_expanded(pid):
                if log.c0[pid] is not None:
                    for c in (log.c0[pid], log.c1[pid]):
                        if c < 0:
                            stack.append(c)
            else:
                out.append(pid)
        return sorted(out)

    def as_bdd(self):
        """The BDD this view equals, if it has no product nodes left; else None."""
        if self.frontier():
            return None
        return self.log.final

    def levels(self):
        """Levels of variables occurring in the view."""
        log, A = self.log, self.log.arena
        out = set()
        bdd_roots = []
        stack = [log.root]
        seen = set()
        while stack:
            ref = stack.pop()
            if ref >= 0:
                bdd_roots.append(ref)
                continue
            pid = -1 - ref
            if pid in seen:
                continue
            seen.add(pid)
            if log.c0[pid] is None:
                bdd_roots.append(log.result[pid])
            elif self.is_expanded(pid):
                out.add(log.plevel[pid])
                stack.append(log.c0[pid])
                stack.append(log.c1[pid])
            else:
                bdd_roots.append(log.pu[pid])
                bdd_roots.append(log.pv[pid])
        for r in set(bdd_roots):
            for w in A.nodes(r):
                if w > TRUE:
                    out.add(A.level[w])
        return out

    def evaluate(self, sigma, free=None, var=None):
        """Polynomial of w_i under sigma (level -> value) with ``free`` unassigned."""
        return evaluate_view(self.log, self.theta, sigma, free, var)


def reconstruct_view(log, i):
    return EbddView(log, i)


def evaluate_ebdd(log, i, sigma, var=None):
    """Polynomial of w_i under ``sigma`` (level -> field value).

    Levels of the view missing from sigma are the free variable; more than
    one is an error.
    """
    view = EbddView(log, i)
    missing = [l for l in view.levels() if l not in sigma]
    if len(missing) > 1:
        raise EbddError("more than one free variable: levels %s" % sorted(missing))
    return view.evaluate(sigma, missing[0] if missing else None, var)


def _op_poly(op, a, b):
    """Combine two polynomials (triples) with the arithmetised operator."""
    a0, a1, a2 = a
    b0, b1, b2 = b
    # the operands are linear whenever this is called on a frontier product
    m0 = a0 * b0
    m1 = a0 * b1 + a1 * b0
    m2 = a0 * b2 + a1 * b1 + a2 * b0
    if (a1 * b2 + a2 * b1) % P or (a2 * b2) % P:
        raise EbddError("product polynomial exceeds degree 2")
    if op == OP_AND:
        return (m0 % P, m1 % P, m2 % P)
    return ((a0 + b0 - m0) % P, (a1 + b1 - m1) % P, (a2 + b2 - m2) % P)


def evaluate_view(log, theta, sigma, free=None, var=None):
    """Core of the evaluation: memoized recursion over the product graph.

    Nodes strictly below ``free`` cannot contain the free variable, so they
    are evaluated as constants.
    """
    A = log.arena
    op = log.op
    plevel, pu, pv, c0, c1, result = log.plevel, log.pu, log.pv, log.c0, log.c1, log.result
    cmemo = {FALSE: 0, TRUE: 1}
    is_and = op == OP_AND

    def const(ref):
        if ref >= 0:
            r = cmemo.get(ref)
            return r if r is not None else A.eval_const(ref, sigma, cmemo)
        r = pmemo_c.get(ref)
        if r is not None:
            return r
        pid = -1 - ref
        if c0[pid] is None:
            r = A.eval_const(result[pid], sigma, cmemo)
        elif plevel[pid] > theta:
            s = sigma[plevel[pid]]
            a = const(c0[pid])
            r = (a + s * (const(c1[pid]) - a)) % P
        else:
            a = A.eval_const(pu[pid], sigma, cmemo)
            b = A.eval_const(pv[pid], sigma, cmemo)
            r = a * b % P if is_and else (a + b - a * b) % P
        pmemo_c[ref] = r
        return r

    pmemo_c = {}
    if free is None:
        return UniPoly(const(log.root), 0, 0, var)

    lmemo = {}
    level = A.level
    eval_lin = A.eval_lin

    def value(ref):
        # children of an expanded product; products above theta are
        # already in pmemo because the loop runs bottom-up
        if ref >= 0:
            if level[ref] < free:
                r = cmemo.get(ref)
                return (r if r is not None else A.eval_const(ref, sigma, cmemo)), 0, 0
            a, b = eval_lin(ref, sigma, free, cmemo, lmemo)
            return a, b, 0
        pid = -1 - ref
        if plevel[pid] < free:
            r = (const(ref), 0, 0)
        elif c0[pid] is None:
            a, b = eval_lin(result[pid], sigma, free, cmemo, lmemo)
            r = (a, b, 0)
        else:
            r = _op_poly(op, value(pu[pid]), value(pv[pid]))
        pmemo[ref] = r
        return r

    pmemo = {}
    get = pmemo.get
    for pid in log.above(theta):
        lvl = plevel[pid]
        u = c0[pid]
        if u is None:
            r = value(result[pid])
        else:
            v = c1[pid]
            x = get(u) if u < 0 else None
            if x is None:
                x = value(u)
            y = get(v) if v < 0 else None
            if y is None:
                y = value(v)
            x0, x1, x2 = x
            y0, y1, y2 = y
            if lvl == free:
                r = (x0, (y0 - x0) % P, 0)
            else:
                s = sigma[lvl]
                r = ((x0 + s * (y0 - x0)) % P, (x1 + s * (y1 - x1)) % P,
                     (x2 + s * (y2 - x2)) % P)
        pmemo[-1 - pid] = r
    root = log.root
    c = get(root) if root < 0 else None
    if c is None:
        c = value(root)
    return UniPoly(c[0], c[1], c[2], var)


class ChainWalker:
    """Incremental evaluation of one eBDD sequence along a degree-reduction walk.

    The verifier walks a chain from the fully reduced end back to the
    operator: each challenge opens the next higher variable, and every
    variable opened earlier has since been fixed to a random value.  Expanded
    nodes only ever use values above the open variable, which stay the same
    for the whole walk, so their top-down path weights are computed once.
    Values below the open variable are final once computed.  The answer is

        S_low + sum over nodes R at the open level of weight(R) * poly(R)

    where S_low collects the weighted constant values of nodes below the
    open level that hang off expanded nodes.  Moving one level up adds the
    weighted values of the previously open level and removes the
    contribution of the nodes that just stopped being expanded; each node is
    touched a constant number of times per walk.

    Requests that do not continue the current walk start a new one, so the
    results always equal ``evaluate_view``.
    """

    def __init__(self, log):
        self.log = log
        self.resets = 0
        self.steps = 0
        self._st = None
        self._bdd_levels = None
        self._levels = None

    def _prepare(self):
        """Group the BDD nodes under trivial products by level (once per log)."""
        log, A = self.log, self.log.arena
        alevel, alo, ahi = A.level, A.lo, A.hi
        seen = set()
        stack = [r for pid, r in enumerate(log.result) if log.c0[pid] is None]
        if log.root >= 0:
            stack.append(log.root)
        by_level = {}
        while stack:
            w = stack.pop()
            if w <= TRUE or w in seen:
                continue
            seen.add(w)
            by_level.setdefault(alevel[w], []).append(w)
            stack.append(alo[w])
            stack.append(ahi[w])
        self._bdd_levels = by_level
        self._levels = sorted(set(by_level) | set(log.expand_levels), reverse=True)

    def _cval(self, ref):
        """Constant value of a frontier node below the open level."""
        st = self._st
        cm = st.cmemo
        if ref >= 0:
            r = cm.get(ref)
            return r if r is not None else self.log.arena.eval_const(ref, st.sigma, cm)
        pid = -1 - ref
        r = st.pval.get(pid)
        if r is not None:
            return r
        log = self.log
        ec = log.arena.eval_const
        if log.c0[pid] is None:
            u = log.result[pid]
            r = cm.get(u)
            if r is None:
                r = ec(u, st.sigma, cm)
        else:
            u, v = log.pu[pid], log.pv[pid]
            a = cm.get(u)
            if a is None:
                a = ec(u, st.sigma, cm)
            b = cm.get(v)
            if b is None:
                b = ec(v, st.sigma, cm)
            r = a * b % P if log.op == OP_AND else (a + b - a * b) % P
        st.pval[pid] = r
        return r

    def _lin(self, u, f):
        A, st = self.log.arena, self._st
        cm = st.cmemo
        if A.level[u] < f:
            a = cm.get(u)
            return (a if a is not None else A.eval_const(u, st.sigma, cm)), 0
        lo, hi = A.lo[u], A.hi[u]
        a = cm.get(lo)
        if a is None:
            a = A.eval_const(lo, st.sigma, cm)
        b = cm.get(hi)
        if b is None:
            b = A.eval_const(hi, st.sigma, cm)
        return a, (b - a) % P

    def _at_level(self, f):
        """Answer at open level f: S_low plus the weighted open-level polynomials.

        The per-node polynomials are kept so that the next step can turn
        them into constants without evaluating the nodes again.
        """
        st, log = self._st, self.log
        c0 = st.s_low
        c1 = c2 = 0
        pc, bc = st.pc, st.bc
        is_and = log.op == OP_AND
        open_p = st.open_p = []
        open_b = st.open_b = []
        lin = self._lin
        A = log.arena
        alevel, alo, ahi = A.level, A.lo, A.hi
        cm = st.cmemo
        pu, pv = log.pu, log.pv
        for pid in log.expand_levels.get(f, ()):
            c = pc.get(pid)
            if not c:
                continue
            c %= P
            u = pu[pid]
            if alevel[u] < f:
                a0 = cm.get(u)
                if a0 is None:
                    a0 = A.eval_const(u, st.sigma, cm)
                a1 = 0
            else:
                a0, a1 = lin(u, f)
            u = pv[pid]
            if alevel[u] < f:
                b0 = cm.get(u)
                if b0 is None:
                    b0 = A.eval_const(u, st.sigma, cm)
                b1 = 0
            else:
                b0, b1 = lin(u, f)
            m0, m1, m2 = a0 * b0, a0 * b1 + a1 * b0, a1 * b1
            if not is_and:
                m0, m1, m2 = a0 + b0 - m0, a1 + b1 - m1, -m2
            c0 += c * m0
            c1 += c * m1
            c2 += c * m2
            open_p.append((pid, c, m0, m1, m2))
        for w in self._bdd_levels.get(f, ()):
            c = bc.get(w)
            if c:
                c %= P
                a, b = lin(w, f)
                c0 += c * a
                c1 += c * b
                open_b.append((w, c, a, b))
        return c0 % P, c1 % P, c2 % P

    def _start(self, theta, sigma, f):
        log = self.log
        self.resets += 1
        st = self._st = _WalkState(theta, dict(sigma), f, log.num_products)
        pc, bc = st.pc, st.bc
        c0, c1, result = log.c0, log.c1, log.result
        A = log.arena
        alo, ahi = A.lo, A.hi
        root = log.root
        if root < 0 and c0[-1 - root] is None:
            root = result[-1 - root]
        if root < 0:
            pc[-1 - root] = 1
        else:
            bc[root] = 1
        for L in self._levels:
            if L <= theta:
                break
            s = sigma[L]
            t = 1 - s
            for pid in log.expand_levels.get(L, ()):
                c = pc.get(pid)
                if not c:
                    continue
                c %= P
                for ref, w in ((c0[pid], c * t), (c1[pid], c * s)):
                    if ref < 0:
                        k = -1 - ref
                        if c0[k] is None:
                            ref = result[k]
                            bc[ref] = bc.get(ref, 0) + w
                        else:
                            pc[k] = pc.get(k, 0) + w
                    else:
                        bc[ref] = bc.get(ref, 0) + w
            for u in self._bdd_levels.get(L, ()):
                c = bc.get(u)
                if not c:
                    continue
                c %= P
                lo, hi = alo[u], ahi[u]
                bc[lo] = bc.get(lo, 0) + c * t
                bc[hi] = bc.get(hi, 0) + c * s
        # only nodes that received a weight contribute below f
        s_low = bc.get(TRUE, 0)
        plevel, alevel = log.plevel, A.level
        cval = self._cval
        for pid, c in pc.items():
            if plevel[pid] < f and c:
                s_low += c % P * cval(-1 - pid)
        for u, c in bc.items():
            if u > TRUE and alevel[u] < f and c:
                s_low += c % P * cval(u)
        st.s_low = s_low % P

    def _continues(self, theta, sigma, f):
        st = self._st
        if st is None or f <= st.theta or theta < f:
            return False
        old = st.sigma
        if f in sigma or f not in old or st.f not in sigma or len(sigma) != len(old):
            return False
        for k, v in sigma.items():
            if k != st.f and old.get(k) != v:
                return False
        return True

    def _advance(self, theta, sigma, f):
        st, log = self._st, self.log
        self.steps += 1
        f_prev = st.f
        st.sigma[f_prev] = sigma[f_prev]
        pc, bc = st.pc, st.bc
        s_low = st.s_low
        # the previously open level is now fixed and joins the constant part
        r = sigma[f_prev]
        pval, cmemo = st.pval, st.cmemo
        for pid, c, m0, m1, m2 in st.open_p:
            v = (m0 + r * (m1 + r * m2)) % P
            pval[pid] = v
            s_low += c * v
        for u, c, a, b in st.open_b:
            v = (a + r * b) % P
            cmemo[u] = v
            s_low += c * v
        # nodes at f stop being expanded: drop what they pushed downwards
        s = st.sigma[f]
        t = 1 - s
        A = log.arena
        cval = self._cval
        c0, c1 = log.c0, log.c1
        for pid in log.expand_levels.get(f, ()):
            c = pc.get(pid)
            if c:
                u = c0[pid]
                a = pval.get(-1 - u) if u < 0 else cmemo.get(u)
                if a is None:
                    a = cval(u)
                u = c1[pid]
                b = pval.get(-1 - u) if u < 0 else cmemo.get(u)
                if b is None:
                    b = cval(u)
                s_low -= c % P * ((a + s * (b - a)) % P)
        alo, ahi = A.lo, A.hi
        for u in self._bdd_levels.get(f, ()):
            c = bc.get(u)
            if c:
                a = cmemo.get(alo[u])
                if a is None:
                    a = cval(alo[u])
                b = cmemo.get(ahi[u])
                if b is None:
                    b = cval(ahi[u])
                s_low -= c % P * ((a + s * (b - a)) % P)
        del st.sigma[f]
        st.s_low = s_low % P
        st.theta = theta
        st.f = f

    def _adjacent(self, theta, f):
        """True when no node sits strictly between f and theta."""
        for L in self._levels:
            if f < L <= theta:
                return False
            if L <= f:
                break
        return True

    def evaluate(self, theta, sigma, free, var=None):
        log = self.log
        if (free is None or theta >= log.n or theta < free
                or log.product_level(log.root) <= theta):
            return evaluate_view(log, theta, sigma, free, var)
        if self._levels is None:
            self._prepare()
        if not self._adjacent(theta, free):
            return evaluate_view(log, theta, sigma, free, var)
        if self._continues(theta, sigma, free):
            self._advance(theta, sigma, free)
        else:
            self._start(theta, sigma, free)
        c = self._at_level(free)
        return UniPoly(c[0], c[1], c[2], var)


class _WalkState:
    def __init__(self, theta, sigma, f, num_products):
        self.theta = theta
        self.sigma = sigma
        self.f = f
        self.pc = {}
        self.pval = {}
        self.bc = {}
        self.cmemo = {FALSE: 0, TRUE: 1}
        self.s_low = 0
        self.open_p = []
        self.open_b = []
