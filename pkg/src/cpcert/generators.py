"""Random and structured instances for tests and benchmarks."""

from .circuit import AND, OR, CpeDag
from .qdimacs import QdimacsInstance


def random_cpe(rng, num_vars=None, max_nodes=30):
    """A random CPE using every node kind, with at most ``max_nodes`` nodes.

    Builds nodes bottom-up from a pool; PEval is only applied to nodes
    that have the variable free.  The root is the last node built.
    """
    n = num_vars if num_vars is not None else rng.randint(1, 10)
    while True:
        dag = CpeDag(n)
        pool = []
        target = rng.randint(3, max_nodes)
        while len(dag) < target:
            if len(pool) < 2 or rng.random() < 0.25:
                r = rng.random()
                if r < 0.08:
                    u = dag.true()
                elif r < 0.16:
                    u = dag.false()
                else:
                    u = dag.var(rng.randint(1, n))
            else:
                kind = rng.choice(("not", "and", "or", "and", "or", "peval", "peval"))
                # favour recent nodes so the circuit gets some depth
                a = pool[max(0, len(pool) - 1 - int(rng.expovariate(0.3)))]
                b = rng.choice(pool)
                if kind == "not":
                    u = dag.neg(a)
                elif kind == "and":
                    u = dag.conj(a, b)
                elif kind == "or":
                    u = dag.disj(a, b)
                else:
                    fv = dag.free_vars(a)
                    if not fv:
                        continue
                    u = dag.peval(rng.choice(fv), rng.randint(0, 1), a)
            if len(dag) > max_nodes:
                break
            pool.append(u)
        if len(dag) > max_nodes:
            continue
        dag.root = pool[-1]
        return dag


def random_cnf(rng, num_vars, num_clauses, width=3):
    clauses = []
    for _ in range(num_clauses):
        k = min(width, num_vars)
        vs = rng.sample(range(1, num_vars + 1), k)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return clauses


def random_qdimacs(rng, num_vars, num_clauses, width=3, blocks=0):
    """Random k-CNF with an optional alternating prefix of ``blocks`` blocks."""
    inst = QdimacsInstance(num_vars, [], random_cnf(rng, num_vars, num_clauses, width))
    if blocks:
        vs = list(range(1, num_vars + 1))
        rng.shuffle(vs)
        q = rng.choice("ae")
        cuts = sorted(rng.sample(range(1, num_vars), min(blocks, num_vars) - 1)) if num_vars > 1 else []
        start = 0
        for c in cuts + [num_vars]:
            if c > start:
                inst.prefix.append((q, sorted(vs[start:c])))
                q = "a" if q == "e" else "e"
            start = c
    return inst


def banded_qbf(rng, num_vars, clause_ratio=2.0, band=3, width=3, free=2, block=4):
    """Random CNF whose clauses only use variables within a window of
    ``band`` consecutive indices, under an alternating prefix.

    The first ``free`` variables (highest indices) are left free; the rest are
    split into alternating blocks of ``block`` variables.  With the default
    order the BDDs stay narrow, so sizes grow roughly linearly with
    ``num_vars``.
    """
    m = int(round(clause_ratio * num_vars))
    clauses = []
    for _ in range(m):
        lo = rng.randint(1, max(1, num_vars - band + 1))
        window = list(range(lo, min(num_vars, lo + band - 1) + 1))
        k = min(width, len(window))
        vs = rng.sample(window, k)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    inst = QdimacsInstance(num_vars, [], clauses)
    order = list(range(num_vars, 0, -1))
    rest = order[free:]
    q = "a"
    for i in range(0, len(rest), block):
        inst.prefix.append((q, sorted(rest[i:i + block])))
        q = "e" if q == "a" else "a"
    return inst


def domino_like(k, rows=2):
    """A small tiling-style #SAT family: rows of k cells, each cell picks
    exactly one of two colours and adjacent cells may not share a colour
    unless at a row end.  Variables grow as 2*k*rows."""
    n = 2 * k * rows
    clauses = []

    def v(r, c, col):
        return 1 + 2 * (r * k + c) + col

    for r in range(rows):
        for c in range(k):
            clauses.append([v(r, c, 0), v(r, c, 1)])
            clauses.append([-v(r, c, 0), -v(r, c, 1)])
            if c + 1 < k:
                for col in range(2):
                    clauses.append([-v(r, c, col), -v(r, c + 1, col)])
            if r + 1 < rows:
                clauses.append([-v(r, c, 0), -v(r + 1, c, 0)])
    return QdimacsInstance(n, [], clauses)


def sum_of_nodes(dag):
    return sum(1 for u in dag.postorder() if dag.kind[u] in (AND, OR))
