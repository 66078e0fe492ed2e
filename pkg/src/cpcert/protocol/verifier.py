"""The verifier: drives the round generator against a channel."""

import random
import time

from .. import field
from ..circuit import Cpd
from ..field import P
from . import wire
from .channel import ChannelError
from .rounds import Ask, Reason, Verdict, cpcertify

MAX_FREE_VARS = 60  # 2^n must stay below p so the count cannot wrap


class GuardError(ValueError):
    pass


def check_guard(dag):
    if dag.n > MAX_FREE_VARS:
        raise GuardError("%d free variables: 2^n >= p, the certified count would wrap" % dag.n)


class VerifierStats:
    def __init__(self):
        self.rounds = 0
        self.draws = 0
        self.seconds = 0.0

    def as_dict(self):
        return {"rounds": self.rounds, "draws": self.draws, "seconds": self.seconds}


def _read_reply(reply, ask):
    """Validate a prover reply against the pending challenge; returns the value or None."""
    try:
        f = wire.decode(reply)
    except wire.WireError:
        return None, Reason.PROTOCOL_VIOLATION
    if f.tag == wire.ABORT:
        return None, Reason.PROVER_ABORT
    want = wire.ANSWER_VALUE if ask.var is None else wire.ANSWER_POLY
    if f.tag != want or f.ordinal != ask.ordinal or f.var != ask.var:
        return None, Reason.PROTOCOL_VIOLATION
    if ask.var is None:
        v = f.value
        if v >= P:
            return None, Reason.PROTOCOL_VIOLATION
        return v, None
    q = f.poly
    if not q.is_canonical():
        return None, Reason.PROTOCOL_VIOLATION
    return q, None


def run_verifier(dag, channel, seed, cpd=None, stats=None):
    """Run CPCertify as the verifier. Returns a Verdict and sends it to the prover.

    ``seed`` seeds the verifier's own random.Random; pass an object with
    ``getrandbits`` instead to supply a different source.
    """
    stats = stats if stats is not None else VerifierStats()
    t_start = time.perf_counter()
    prover_before = channel.prover_seconds
    rng = seed if hasattr(seed, "getrandbits") else random.Random(seed)
    cpd = cpd or Cpd(dag)
    try:
        check_guard(dag)
    except GuardError:
        verdict = Verdict.reject(Reason.GUARD)
        channel.finish(wire.reject(verdict.reason))
        return verdict
    gen = cpcertify(cpd)
    pending_r = None
    verdict = None
    try:
        ev = next(gen)
        while True:
            if isinstance(ev, Ask):
                frame = wire.challenge(ev.ordinal, ev.var, pending_r)
                pending_r = None
                stats.rounds += 1
                try:
                    reply = channel.exchange(frame)
                except ChannelError:
                    verdict = Verdict.reject(Reason.PROTOCOL_VIOLATION, ev.ordinal)
                    break
                value, problem = _read_reply(reply, ev)
                if problem is not None:
                    verdict = Verdict.reject(problem, ev.ordinal)
                    break
                ev = gen.send(value)
            else:
                pending_r = field.random(rng)
                stats.draws += 1
                ev = gen.send(pending_r)
    except StopIteration as stop:
        verdict = stop.value
    gen.close()
    if verdict.accepted:
        frame = wire.accept(verdict.count_mod_p)
    else:
        frame = wire.reject(verdict.reason, verdict.ordinal)
    try:
        channel.finish(frame)
    except ChannelError:
        if verdict.accepted:
            verdict = Verdict.reject(Reason.PROTOCOL_VIOLATION)
    stats.seconds += (time.perf_counter() - t_start) - (channel.prover_seconds - prover_before)
    return verdict
