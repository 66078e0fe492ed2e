"""Reference #CP solver: build a BDD for every circuit node bottom-up."""

import time

from .bdd import OP_AND, OP_OR, BddArena
from .circuit import AND, FALSE, NOT, OR, PEVAL, TRUE, VAR
from . import field


class BDDSolver:
    """Computes the BDD of every node of a CpeDag.

    ``binary_hook(node, op, u, v)`` replaces Apply for And/Or nodes when
    given; the prover uses it to record the eBDD sequence instead.
    """

    def __init__(self, dag, arena=None, binary_hook=None):
        self.dag = dag
        self.arena = arena or BddArena()
        self.binary_hook = binary_hook
        self.bdd = {}
        self.build_seconds = 0.0

    def build(self):
        t0 = time.perf_counter()
        dag, A = self.dag, self.arena
        lvl = dag.level
        bdd = self.bdd
        for u in dag.postorder():
            if u in bdd:
                continue
            k = dag.kind[u]
            if k == TRUE:
                r = 1
            elif k == FALSE:
                r = 0
            elif k == VAR:
                r = A.var(lvl[dag.arg[u]])
            elif k == NOT:
                r = A.negate(bdd[dag.arg[u]])
            elif k in (AND, OR):
                op = OP_AND if k == AND else OP_OR
                a, b = bdd[dag.arg[u]], bdd[dag.arg2[u]]
                if self.binary_hook is not None:
                    r = self.binary_hook(u, op, a, b)
                else:
                    A.clear_caches()
                    r = A.apply(op, a, b)
            else:
                r = A.restrict(bdd[dag.arg3[u]], lvl[dag.arg[u]], dag.arg2[u])
            bdd[u] = r
        self.build_seconds += time.perf_counter() - t0
        return bdd[dag.root]

    @property
    def root(self):
        return self.bdd[self.dag.root]

    def count(self):
        """Exact number of satisfying assignments over the root's free variables."""
        dag = self.dag
        if dag.root not in self.bdd:
            self.build()
        total = self.arena.count_models(self.root, dag.num_vars)
        return total >> (dag.num_vars - dag.n)

    def half_value(self):
        """Value of the root polynomial at the all-1/2 point."""
        lvls = range(1, self.dag.num_vars + 1)
        sigma = {l: field.HALF for l in lvls}
        return self.arena.eval_bdd(self.root, sigma).c0


def solve(dag):
    s = BDDSolver(dag)
    s.build()
    return s.count()
