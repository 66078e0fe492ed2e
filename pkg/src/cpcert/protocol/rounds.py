"""The round structure of CPCertify as a generator shared by both parties.

``cpcertify(cpd)`` yields events and is resumed with their results:

* ``Ask``: a challenge on one CPD node under assignment ``sigma`` (variable
  -> field value) with at most one variable ``var`` left open.  Resume with
  the answer: an int when ``var`` is None, otherwise a UniPoly in ``var``.
* ``Draw``: resume with a fresh uniformly random field element.

The generator returns a Verdict.  The verifier drives it with real
randomness and the prover's replies; the prover drives an identical copy
with the values it reads off the wire, which keeps both sides' assignments
in sync without ever sending them.
"""

from enum import IntEnum
from typing import NamedTuple, Optional

from .. import field
from ..circuit import AND, FALSE, NOT, OR, PEVAL, TRUE, VAR
from ..field import P
from ..unipoly import degree_reduce, eval_poly


class Reason(IntEnum):
    MERGE_CONSISTENCY = 1   # some k_i differs from p_i at sigma_i(x)
    MERGE_MISMATCH = 2      # claims on one node disagree after unification
    OPERATOR = 3            # k is not k1*k2 (and) or k1+k2-k1*k2 (or)
    DELTA = 4               # degree-reduced answer does not match k
    LEAF = 5                # leaf value differs from the claim
    PROTOCOL_VIOLATION = 6  # malformed or unexpected message
    PROVER_ABORT = 7
    GUARD = 8               # 2^n >= p, count would wrap


KIND_INIT, KIND_MERGE, KIND_DELTA, KIND_CHILD = "init", "merge", "delta", "child"


class Ask(NamedTuple):
    kind: str
    ordinal: int
    var: Optional[int]
    sigma: dict


class Draw(NamedTuple):
    pass


DRAW = Draw()


class Verdict(NamedTuple):
    accepted: bool
    count_mod_p: Optional[int] = None
    reason: Optional[Reason] = None
    ordinal: Optional[int] = None

    @classmethod
    def accept(cls, m):
        return cls(True, m)

    @classmethod
    def reject(cls, reason, ordinal=None):
        return cls(False, None, Reason(reason), ordinal)

    def __str__(self):
        if self.accepted:
            return "ACCEPT count_mod_p=%d" % self.count_mod_p
        where = "" if self.ordinal is None else " at node %d" % self.ordinal
        return "REJECT %s%s" % (self.reason.name.lower().replace("_", "-"), where)


def cpcertify(cpd, stats=None):
    """Run the protocol over ``cpd``; see the module docstring for the event protocol."""
    dag = cpd.dag
    refs = cpd.refs
    ordinal = cpd.ordinal
    kind = dag.kind
    level = dag.level
    free_order = {}

    def free_sorted(u):
        vs = free_order.get(u)
        if vs is None:
            vs = cpd.chain_vars.get(u)
            if vs is None:
                vs = dag.free_by_level(u)
            free_order[u] = vs
        return vs

    root = dag.root
    sigma0 = {x: field.HALF for x in dag.free_vars(root)}
    n = len(sigma0)
    K = yield Ask(KIND_INIT, 0, None, sigma0)
    claims = {0: [(sigma0, K)]}
    asks = 1
    for o, ref in enumerate(refs):
        cl = claims.pop(o, None)
        if not cl:
            continue
        u, j = ref
        # step (b): unify all claims about this node
        if len(cl) > 1:
            sigmas = [s for s, _ in cl]
            ks = [k for _, k in cl]
            for x in free_sorted(u):
                first = sigmas[0][x]
                if all(s[x] == first for s in sigmas):
                    continue
                polys = []
                for s in sigmas:
                    s_open = dict(s)
                    del s_open[x]
                    asks += 1
                    p = yield Ask(KIND_MERGE, o, x, s_open)
                    polys.append(p)
                for i, s in enumerate(sigmas):
                    if eval_poly(polys[i], s[x]) != ks[i]:
                        return Verdict.reject(Reason.MERGE_CONSISTENCY, o)
                r = yield DRAW
                new_sigmas = []
                for i, s in enumerate(sigmas):
                    s = dict(s)
                    s[x] = r
                    new_sigmas.append(s)
                    ks[i] = eval_poly(polys[i], r)
                sigmas = new_sigmas
            k = ks[0]
            if any(ki != k for ki in ks):
                return Verdict.reject(Reason.MERGE_MISMATCH, o)
            sigma = sigmas[0]
        else:
            sigma, k = cl[0]
        # step (c): replace the claim by claims about the children
        if j > 0:
            x = cpd.chain_vars[u][j - 1]
            child = ordinal[(u, j - 1)]
            s_open = dict(sigma)
            del s_open[x]
            asks += 1
            p = yield Ask(KIND_DELTA, child, x, s_open)
            if eval_poly(degree_reduce(p), sigma[x]) != k:
                return Verdict.reject(Reason.DELTA, o)
            r = yield DRAW
            s_new = dict(s_open)
            s_new[x] = r
            claims.setdefault(child, []).append((s_new, eval_poly(p, r)))
            continue
        t = kind[u]
        if t == AND or t == OR:
            vals = []
            targets = []
            for c in (dag.arg[u], dag.arg2[u]):
                cref = cpd.top(c)
                co = ordinal[cref]
                sc = {x: sigma[x] for x in dag.free_vars(c)}
                asks += 1
                kc = yield Ask(KIND_CHILD, co, None, sc)
                vals.append(kc)
                targets.append((co, sc, kc))
            k1, k2 = vals
            m = k1 * k2 % P
            expect = m if t == AND else (k1 + k2 - m) % P
            if expect != k:
                return Verdict.reject(Reason.OPERATOR, o)
            for co, sc, kc in targets:
                claims.setdefault(co, []).append((sc, kc))
        elif t == NOT:
            co = ordinal[cpd.top(dag.arg[u])]
            claims.setdefault(co, []).append((sigma, (1 - k) % P))
        elif t == PEVAL:
            co = ordinal[cpd.top(dag.arg3[u])]
            s_new = dict(sigma)
            s_new[dag.arg[u]] = dag.arg2[u]
            claims.setdefault(co, []).append((s_new, k))
        else:
            if t == TRUE:
                c = 1
            elif t == FALSE:
                c = 0
            else:
                c = sigma[dag.arg[u]]
            if c != k:
                return Verdict.reject(Reason.LEAF, o)
    assert not claims, "claims left on unvisited nodes"
    if stats is not None:
        stats["asks"] = asks
    return Verdict.accept(K * pow(2, n, P) % P)
