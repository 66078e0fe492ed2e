"""Circuits with partial evaluation (CPEs) and the virtual degree-reduction view.

A CpeDag is an append-only, hash-consed arena of nodes.  Variables are
positive ints; every variable also has a *level* (1 = nearest the leaves,
highest = at the root) used by the BDD layer and by the degree-reduction
chains.

The CPD view addresses the chain of degree reductions sitting above each
binary node with a CpdRef ``(base, j)``.  For an And/Or node with k free
variables v_1..v_k ordered by level from highest to lowest, ``(base, 0)``
is the operator itself and ``(base, j)`` is delta_{v_j} applied to
``(base, j-1)``; ``(base, k)`` is the top of the chain and the node that
parents see.  Every other node only has ``j = 0``.
"""

from typing import NamedTuple

TRUE, FALSE, VAR, NOT, AND, OR, PEVAL = range(7)
KIND_NAMES = ("true", "false", "var", "not", "and", "or", "peval")


class CircuitError(ValueError):
    pass


def _bits(mask):
    """Indices of set bits, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class CpeDag:
    """Hash-consed CPE arena over variables 1..num_vars.

    Node fields live in parallel lists: ``kind``, ``arg`` (variable or first
    child), ``arg2`` (second child or PEval bit) and ``arg3`` (PEval child).
    ``free[u]`` is the free-variable set of node u as a bitset over variable
    indices.
    """

    def __init__(self, num_vars, order=None):
        self.num_vars = num_vars
        self.kind = []
        self.arg = []
        self.arg2 = []
        self.arg3 = []
        self.free = []
        self._table = {}
        self.root = None
        self.set_order(order)

    # -- variable order -------------------------------------------------

    def set_order(self, order=None):
        """Fix the variable order. ``order`` lists variables from the root
        downward (first entry gets the highest level). Variables not listed
        are placed below in index order."""
        n = self.num_vars
        if order is None:
            order = list(range(n, 0, -1))
        seen = set()
        for x in order:
            if not 1 <= x <= n:
                raise CircuitError("variable %d out of range 1..%d" % (x, n))
            if x in seen:
                raise CircuitError("variable %d listed twice in order" % x)
            seen.add(x)
        rest = [x for x in range(n, 0, -1) if x not in seen]
        top_down = list(order) + rest
        self.level = [0] * (n + 1)
        self.var_at = [0] * (n + 1)
        for i, x in enumerate(top_down):
            lvl = n - i
            self.level[x] = lvl
            self.var_at[lvl] = x

    # -- construction ---------------------------------------------------

    def _mk(self, kind, a=0, b=0, c=0, free=0):
        key = (kind, a, b, c)
        u = self._table.get(key)
        if u is None:
            u = len(self.kind)
            self.kind.append(kind)
            self.arg.append(a)
            self.arg2.append(b)
            self.arg3.append(c)
            self.free.append(free)
            self._table[key] = u
        return u

    def true(self):
        return self._mk(TRUE)

    def false(self):
        return self._mk(FALSE)

    def const(self, b):
        return self.true() if b else self.false()

    def var(self, x):
        if not 1 <= x <= self.num_vars:
            raise CircuitError("variable %d out of range 1..%d" % (x, self.num_vars))
        return self._mk(VAR, x, free=1 << x)

    def neg(self, u):
        return self._mk(NOT, u, free=self.free[u])

    def conj(self, u, v):
        return self._mk(AND, u, v, free=self.free[u] | self.free[v])

    def disj(self, u, v):
        return self._mk(OR, u, v, free=self.free[u] | self.free[v])

    def peval(self, x, b, u):
        """Partial evaluation <x := b> u. Requires x to be free in u."""
        if not (self.free[u] >> x) & 1:
            raise CircuitError("partial evaluation of variable %d which is not free" % x)
        return self._mk(PEVAL, x, 1 if b else 0, u, free=self.free[u] & ~(1 << x))

    def forall(self, x, u):
        """<x:=0>u AND <x:=1>u; returns u itself if x is not free in it."""
        if not (self.free[u] >> x) & 1:
            return u
        return self.conj(self.peval(x, 0, u), self.peval(x, 1, u))

    def exists(self, x, u):
        if not (self.free[u] >> x) & 1:
            return u
        return self.disj(self.peval(x, 0, u), self.peval(x, 1, u))

    def balanced(self, op, nodes, empty):
        """Combine ``nodes`` with a balanced tree of ``op`` (AND or OR)."""
        nodes = list(nodes)
        if not nodes:
            return self.const(empty)
        mk = self.conj if op == AND else self.disj
        while len(nodes) > 1:
            nxt = [mk(nodes[i], nodes[i + 1]) for i in range(0, len(nodes) - 1, 2)]
            if len(nodes) % 2:
                nxt.append(nodes[-1])
            nodes = nxt
        return nodes[0]

    # -- queries --------------------------------------------------------

    def __len__(self):
        return len(self.kind)

    def children(self, u):
        k = self.kind[u]
        if k in (AND, OR):
            return (self.arg[u], self.arg2[u])
        if k == NOT:
            return (self.arg[u],)
        if k == PEVAL:
            return (self.arg3[u],)
        return ()

    def free_vars(self, u):
        return _bits(self.free[u])

    def free_by_level(self, u):
        """Free variables of u sorted by level, highest first."""
        lv = self.level
        return sorted(_bits(self.free[u]), key=lambda x: -lv[x])

    @property
    def n(self):
        """Number of free variables of the root."""
        return bin(self.free[self.root]).count("1")

    def postorder(self, root=None):
        """Nodes reachable from root, children before parents."""
        root = self.root if root is None else root
        out = []
        seen = set()
        stack = [(root, False)]
        while stack:
            u, expanded = stack.pop()
            if expanded:
                out.append(u)
                continue
            if u in seen:
                continue
            seen.add(u)
            stack.append((u, True))
            for c in reversed(self.children(u)):
                if c not in seen:
                    stack.append((c, False))
        return out

    def size(self, root=None):
        """|phi|: number of distinct nodes reachable from the root."""
        return len(self.postorder(root))

    def check(self):
        """Verify the structural invariants of every node; raises CircuitError."""
        for u in range(len(self.kind)):
            k = self.kind[u]
            for c in self.children(u):
                if c >= u:
                    raise CircuitError("node %d has child %d that is not older" % (u, c))
            if k == VAR:
                want = 1 << self.arg[u]
            elif k in (TRUE, FALSE):
                want = 0
            elif k == NOT:
                want = self.free[self.arg[u]]
            elif k in (AND, OR):
                want = self.free[self.arg[u]] | self.free[self.arg2[u]]
            else:
                cf = self.free[self.arg3[u]]
                if not (cf >> self.arg[u]) & 1:
                    raise CircuitError("node %d evaluates a variable that is not free" % u)
                want = cf & ~(1 << self.arg[u])
            if want != self.free[u]:
                raise CircuitError("node %d has inconsistent free set" % u)

    def evaluate(self, assignment, root=None):
        """Boolean value of the circuit under ``assignment`` (var -> 0/1)."""
        root = self.root if root is None else root
        memo = {}

        def ev(u, env):
            key = (u, tuple(sorted((x, env[x]) for x in _bits(self.free[u]))))
            if key in memo:
                return memo[key]
            k = self.kind[u]
            if k == TRUE:
                r = True
            elif k == FALSE:
                r = False
            elif k == VAR:
                r = bool(env[self.arg[u]])
            elif k == NOT:
                r = not ev(self.arg[u], env)
            elif k == AND:
                r = ev(self.arg[u], env) and ev(self.arg2[u], env)
            elif k == OR:
                r = ev(self.arg[u], env) or ev(self.arg2[u], env)
            else:
                env2 = dict(env)
                env2[self.arg[u]] = self.arg2[u]
                r = ev(self.arg3[u], env2)
            memo[key] = r
            return r

        return ev(root, dict(assignment))

    def describe(self, u):
        k = self.kind[u]
        if k == VAR:
            return "x%d" % self.arg[u]
        if k == PEVAL:
            return "<x%d:=%d>#%d" % (self.arg[u], self.arg2[u], self.arg3[u])
        return "%s(%s)" % (KIND_NAMES[k], ", ".join("#%d" % c for c in self.children(u)))


# -- the CPD view -----------------------------------------------------------


class CpdRef(NamedTuple):
    base: int
    j: int


class Cpd:
    """Degree-reduction view of a CpeDag: refs in topological order plus the
    child relation and the variable each delta node reduces."""

    def __init__(self, dag):
        self.dag = dag
        self.chain_vars = {}
        refs = []
        for u in reversed(dag.postorder()):
            if dag.kind[u] in (AND, OR):
                vs = dag.free_by_level(u)
                self.chain_vars[u] = vs
                for j in range(len(vs), -1, -1):
                    refs.append(CpdRef(u, j))
            else:
                refs.append(CpdRef(u, 0))
        self.refs = refs
        self.ordinal = {r: i for i, r in enumerate(refs)}

    def __len__(self):
        return len(self.refs)

    def top(self, u):
        vs = self.chain_vars.get(u)
        return CpdRef(u, len(vs) if vs else 0)

    def is_top(self, ref):
        return ref.j == len(self.chain_vars.get(ref.base, ()))

    def delta_var(self, ref):
        """Variable reduced by the delta node ``ref`` (requires ref.j > 0)."""
        return self.chain_vars[ref.base][ref.j - 1]

    def child_refs(self, ref):
        u, j = ref
        if j > 0:
            return [CpdRef(u, j - 1)]
        return [self.top(c) for c in self.dag.children(u)]

    def binary_bases(self):
        return list(self.chain_vars)


def cpd_topo(dag):
    """All CpdRefs of the dag, parents before children, root first."""
    return list(Cpd(dag).refs)


def cpd_child_refs(dag, ref, cpd=None):
    cpd = cpd or Cpd(dag)
    return cpd.child_refs(CpdRef(*ref))
