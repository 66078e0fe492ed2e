"""QDIMACS reading/writing and translation into a CPE.

Quantifier blocks are desugared innermost-first into partial-evaluation
macros.  Unquantified variables, and the outermost block when it is
existential, stay free and are counted over.
"""

from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Tuple

from .circuit import AND, OR, CircuitError, CpeDag


class QdimacsError(CircuitError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__("line %d: %s" % (line, msg) if line is not None else msg)


@dataclass
class QdimacsInstance:
    num_vars: int
    prefix: List[Tuple[str, List[int]]] = dc_field(default_factory=list)
    clauses: List[List[int]] = dc_field(default_factory=list)

    def free_vars(self):
        """Variables counted over: unquantified ones plus an outermost 'e' block."""
        quantified = {x for _, xs in self.prefix for x in xs}
        free = [x for x in range(1, self.num_vars + 1) if x not in quantified]
        if self.prefix and self.prefix[0][0] == "e":
            free = sorted(set(free) | set(self.prefix[0][1]))
        return free

    def bound_blocks(self):
        """Quantifier blocks that get desugared, outermost first."""
        if self.prefix and self.prefix[0][0] == "e":
            return self.prefix[1:]
        return list(self.prefix)

    def to_text(self):
        lines = ["p cnf %d %d" % (self.num_vars, len(self.clauses))]
        for q, xs in self.prefix:
            lines.append("%s %s 0" % (q, " ".join(map(str, xs))))
        for cl in self.clauses:
            lines.append(" ".join(map(str, cl + [0])))
        return "\n".join(lines) + "\n"


def read_qdimacs(text) -> QdimacsInstance:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii", errors="replace")
    inst = None
    seen_q = set()
    current = []
    current_line = None
    clauses_started = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        toks = line.split()
        if toks[0] == "p":
            if inst is not None:
                raise QdimacsError("duplicate header", lineno)
            if len(toks) != 4 or toks[1] != "cnf":
                raise QdimacsError("expected 'p cnf <vars> <clauses>'", lineno)
            try:
                nv, _nc = int(toks[2]), int(toks[3])
            except ValueError:
                raise QdimacsError("non-integer in header", lineno) from None
            if nv < 0 or _nc < 0:
                raise QdimacsError("negative count in header", lineno)
            inst = QdimacsInstance(nv)
            continue
        if inst is None:
            raise QdimacsError("data before 'p cnf' header", lineno)
        if toks[0] in ("a", "e"):
            if clauses_started or current:
                raise QdimacsError("quantifier line after clauses", lineno)
            try:
                nums = [int(t) for t in toks[1:]]
            except ValueError:
                raise QdimacsError("non-integer in quantifier line", lineno) from None
            if not nums or nums[-1] != 0:
                raise QdimacsError("quantifier line must end with 0", lineno)
            xs = nums[:-1]
            for x in xs:
                if x <= 0 or x > inst.num_vars:
                    raise QdimacsError("variable %d out of range 1..%d" % (x, inst.num_vars), lineno)
                if x in seen_q:
                    raise QdimacsError("variable %d quantified more than once" % x, lineno)
                seen_q.add(x)
            if inst.prefix and inst.prefix[-1][0] == toks[0]:
                inst.prefix[-1][1].extend(xs)
            elif xs:
                inst.prefix.append((toks[0], list(xs)))
            continue
        for t in toks:
            try:
                lit = int(t)
            except ValueError:
                raise QdimacsError("unexpected token %r" % t, lineno) from None
            if lit == 0:
                inst.clauses.append(current)
                current = []
                clauses_started = True
                continue
            if abs(lit) > inst.num_vars:
                raise QdimacsError("variable %d out of range 1..%d" % (abs(lit), inst.num_vars), lineno)
            if not current:
                current_line = lineno
            current.append(lit)
    if inst is None:
        raise QdimacsError("missing 'p cnf' header")
    if current:
        raise QdimacsError("clause not terminated by 0", current_line)
    return inst


def default_order(inst: QdimacsInstance):
    """Variables from the root downward: free variables first, then the
    quantifier blocks from outermost to innermost; inside a group higher
    indices sit higher."""
    groups = [inst.free_vars()] + [xs for _, xs in inst.bound_blocks()]
    order = []
    for g in groups:
        order.extend(sorted(g, reverse=True))
    return order


def read_order_file(text):
    """Whitespace-separated variable indices, root first; 'c' and '#' start comments."""
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii", errors="replace")
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("c"):
            continue
        for t in line.split():
            try:
                x = int(t)
            except ValueError:
                raise QdimacsError("bad variable index %r in order file" % t, lineno) from None
            if x != 0:
                out.append(abs(x))
    return out


def build_cpe(inst: QdimacsInstance, order: Optional[List[int]] = None) -> CpeDag:
    dag = CpeDag(inst.num_vars, order if order is not None else default_order(inst))
    clause_nodes = []
    for cl in inst.clauses:
        lits = [dag.var(l) if l > 0 else dag.neg(dag.var(-l)) for l in cl]
        clause_nodes.append(dag.balanced(OR, lits, False))
    phi = dag.balanced(AND, clause_nodes, True)
    # free variables missing from the matrix still count: x or not x
    taut = []
    for x in inst.free_vars():
        if not (dag.free[phi] >> x) & 1:
            v = dag.var(x)
            taut.append(dag.disj(v, dag.neg(v)))
    if taut:
        phi = dag.balanced(AND, [phi] + taut, True)
    for q, xs in reversed(inst.bound_blocks()):
        for x in reversed(xs):
            phi = dag.forall(x, phi) if q == "a" else dag.exists(x, phi)
    dag.root = phi
    return dag


def parse_qdimacs(text, order=None) -> CpeDag:
    return build_cpe(read_qdimacs(text), order)
