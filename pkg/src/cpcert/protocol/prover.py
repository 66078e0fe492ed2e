"""The honest prover (plus fault injection for soundness experiments).

The prover builds a BDD for every circuit node, recording the eBDD
sequence of each binary node on the way, and answers challenges by
evaluating those diagrams.  It runs a shadow copy of the round generator
so it knows the verifier's assignments without receiving them.
"""

import random
import time

from .. import field
from ..bdd import BddArena
from ..circuit import AND, OR, Cpd
from ..ebdd import compute_ebdd, evaluate_view
from ..solver import BDDSolver
from ..unipoly import UniPoly
from . import wire
from .rounds import Ask, Draw, cpcertify

NONE, FLIP_INITIAL_K, ADD_ONE, RANDOM_POLY = "none", "flip-initial-K", "add-one", "random-poly"
MODES = (NONE, FLIP_INITIAL_K, ADD_ONE, RANDOM_POLY)


class ProverError(RuntimeError):
    pass


class Corruption:
    """Which answer to tamper with and how.

    ``target`` counts answers from 0 (the initial claim K is answer 0).
    The fault stream is derived from ``seed`` but kept apart from the
    verifier's: seeding both identically would make the first "random"
    answer equal the verifier's first challenge point.
    """

    def __init__(self, mode=NONE, target=0, seed=0):
        if mode not in MODES:
            raise ValueError("unknown corruption mode %r (choose from %s)" % (mode, ", ".join(MODES)))
        self.mode = mode
        self.target = 0 if mode == FLIP_INITIAL_K else target
        self.rng = random.Random("inject:%d" % seed)
        self.applied = False

    def apply(self, index, value):
        if self.mode == NONE or index != self.target:
            return value
        self.applied = True
        if self.mode in (FLIP_INITIAL_K, ADD_ONE):
            if isinstance(value, UniPoly):
                return value._replace(c0=field.add(value.c0, 1))
            return field.add(value, 1)
        if isinstance(value, UniPoly):
            return UniPoly(field.random(self.rng), field.random(self.rng),
                           field.random(self.rng), value.var)
        return field.random(self.rng)


class Prover:
    def __init__(self, dag, opt_eval=False, corruption=None):
        self.dag = dag
        self.cpd = Cpd(dag)
        self.opt_eval = opt_eval
        self.corruption = corruption or Corruption()
        self.arena = BddArena()
        self.logs = {}
        self.solver = BDDSolver(dag, self.arena, binary_hook=self._record)
        self.built = False
        self.build_seconds = 0.0
        self.answer_seconds = 0.0
        self.answers = 0
        self._walkers = {}
        self._gen = None
        self._event = None
        self.verdict_frame = None

    def _record(self, u, op, a, b):
        log = compute_ebdd(self.arena, op, a, b)
        self.logs[u] = log
        return log.final

    def build(self):
        if not self.built:
            t0 = time.perf_counter()
            self.solver.build()
            self.built = True
            self.build_seconds = time.perf_counter() - t0
        return self

    # -- evaluation -------------------------------------------------------

    def evaluate(self, ref, sigma, var):
        """Honest value (var None) or polynomial in ``var`` of CPD node ``ref``."""
        dag = self.dag
        lvl = dag.level
        u, j = ref
        s = {lvl[x]: v for x, v in sigma.items()}
        free = None if var is None else lvl[var]
        log = self.logs.get(u)
        if log is None or j == len(self.cpd.chain_vars[u]):
            bdd = self.solver.bdd[u]
            A = self.arena
            if free is None:
                return A.eval_const(bdd, s, {0: 0, 1: 1})
            a, b = A.eval_lin(bdd, s, free, {0: 0, 1: 1}, {})
            return UniPoly(a, b, 0, var)
        theta = lvl[self.cpd.chain_vars[u][j - 1]] - 1 if j > 0 else log.n
        if self.opt_eval and free is not None:
            walker = self._walkers.get(u)
            if walker is None:
                from ..ebdd import ChainWalker
                walker = self._walkers[u] = ChainWalker(log)
            q = walker.evaluate(theta, s, free, var)
        else:
            q = evaluate_view(log, theta, s, free, var)
        return q.c0 if var is None else q

    def answer(self, ask):
        t0 = time.perf_counter()
        value = self.evaluate(self.cpd.refs[ask.ordinal], ask.sigma, ask.var)
        value = self.corruption.apply(self.answers, value)
        self.answers += 1
        self.answer_seconds += time.perf_counter() - t0
        return value

    # -- wire driver ------------------------------------------------------

    def handle(self, data):
        """Process one verifier frame; returns the reply frame or None."""
        try:
            f = wire.decode(data)
        except wire.WireError:
            return wire.abort()
        if f.tag in (wire.ACCEPT, wire.REJECT):
            self.verdict_frame = f
            return None
        if f.tag not in (wire.CHALLENGE, wire.CHALLENGE_R):
            return wire.abort(f.ordinal)
        self.build()
        if self._gen is None:
            self._gen = cpcertify(self.cpd)
            self._event = next(self._gen)
        try:
            ev = self._event
            if f.tag == wire.CHALLENGE_R:
                if not isinstance(ev, Draw):
                    return wire.abort(f.ordinal)
                ev = self._gen.send(f.value)
            if not isinstance(ev, Ask) or ev.ordinal != f.ordinal or ev.var != f.var:
                return wire.abort(f.ordinal)
            value = self.answer(ev)
            try:
                self._event = self._gen.send(value)
            except StopIteration:
                self._event = None
            return wire.answer(ev.ordinal, ev.var, value)
        except StopIteration:
            return wire.abort(f.ordinal)


def lower_bound_answers(cpd):
    """Answers every complete run contains: K, plus per binary node its delta
    challenges and the two child challenges."""
    return 1 + sum(len(vs) + 2 for vs in cpd.chain_vars.values())
