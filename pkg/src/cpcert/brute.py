"""Exhaustive model counting by truth tables, used as an independent oracle.

Every node is evaluated to a truth table over all ``num_vars`` variables,
stored as a Python int with one bit per assignment.  Variable x corresponds
to bit x-1 of the assignment index.
"""

from .circuit import AND, FALSE, NOT, OR, PEVAL, TRUE, VAR, CircuitError

MAX_BRUTE_VARS = 25


class GuardError(CircuitError):
    pass


def _var_masks(n):
    """masks[x] has bit a set iff assignment a gives variable x the value 1."""
    size = 1 << n
    full = (1 << size) - 1
    masks = [0] * (n + 1)
    for x in range(1, n + 1):
        step = 1 << (x - 1)
        # step zeros then step ones, repeated by doubling up to the full width
        m = ((1 << step) - 1) << step
        width = 2 * step
        while width < size:
            m |= m << width
            width *= 2
        masks[x] = m
    return masks, full


def truth_tables(dag, root=None):
    n = dag.num_vars
    if n > MAX_BRUTE_VARS:
        raise GuardError("brute force limited to %d variables, instance has %d"
                         % (MAX_BRUTE_VARS, n))
    masks, full = _var_masks(n)
    order = dag.postorder(root)
    # free tables as soon as their last parent is evaluated
    refs = {}
    for u in order:
        for c in dag.children(u):
            refs[c] = refs.get(c, 0) + 1
    table = {}
    for u in order:
        k = dag.kind[u]
        if k == TRUE:
            t = full
        elif k == FALSE:
            t = 0
        elif k == VAR:
            t = masks[dag.arg[u]]
        elif k == NOT:
            t = full ^ table[dag.arg[u]]
        elif k == AND:
            t = table[dag.arg[u]] & table[dag.arg2[u]]
        elif k == OR:
            t = table[dag.arg[u]] | table[dag.arg2[u]]
        else:
            x, b, c = dag.arg[u], dag.arg2[u], dag.arg3[u]
            shift = 1 << (x - 1)
            m = masks[x]
            if b:
                part = table[c] & m
                t = part | (part >> shift)
            else:
                part = table[c] & ~m & full
                t = part | (part << shift)
        for c in dag.children(u):
            refs[c] -= 1
            if refs[c] == 0:
                del table[c]
        table[u] = t
    return table, full


def brute_force_count(dag, root=None):
    """Number of satisfying assignments over the root's free variables."""
    root = dag.root if root is None else root
    table, _ = truth_tables(dag, root)
    hits = bin(table[root]).count("1")
    bound = dag.num_vars - bin(dag.free[root]).count("1")
    return hits >> bound
