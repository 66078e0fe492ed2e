"""One-call certification: honest or faulty prover plus verifier in-process."""

import os
import random
import sys
import time
from dataclasses import dataclass
from typing import Optional

from ..circuit import Cpd
from . import wire
from .bound import bound_log10, dag_bound
from .channel import InProcessChannel, PipeChannel, ReplayChannel
from .prover import Corruption, Prover
from .transcript import Transcript
from .verifier import VerifierStats, run_verifier


@dataclass
class CertifyResult:
    verdict: object
    seed: int
    transcript: Optional[Transcript]
    bytes_sent: int
    bytes_received: int
    rounds: int
    prover_ms: float
    verifier_ms: float
    soundness_bound: object
    answers: int = 0

    @property
    def bytes_total(self):
        return self.bytes_sent + self.bytes_received

    def stats(self, count=None):
        v = self.verdict
        m = v.count_mod_p if v.accepted else None
        return {
            "v": 1,
            "bytes_sent": self.bytes_sent,
            "bytes_received": self.bytes_received,
            "rounds": self.rounds,
            "prover_ms": round(self.prover_ms, 3),
            "verifier_ms": round(self.verifier_ms, 3),
            "soundness_bound_log10": bound_log10(self.soundness_bound),
            "count_mod_p": m,
            # the guard keeps 2^n below p, so an accepted m is the count itself
            "count": m if count is None else count,
        }


def certify(dag, seed=None, opt_eval=False, corruption=None, record=True, prover=None):
    """Run prover and verifier over an in-process channel."""
    if seed is None:
        seed = random.SystemRandom().getrandbits(64)
    prover = prover or Prover(dag, opt_eval=opt_eval, corruption=corruption)
    prover.build()
    channel = InProcessChannel(prover, record=record)
    stats = VerifierStats()
    verdict = run_verifier(dag, channel, seed, stats=stats)
    tr = Transcript(seed, channel.frames) if record else None
    return CertifyResult(
        verdict=verdict,
        seed=seed,
        transcript=tr,
        bytes_sent=channel.bytes_sent,
        bytes_received=channel.bytes_received,
        rounds=stats.rounds,
        prover_ms=(prover.build_seconds + prover.answer_seconds) * 1000.0,
        verifier_ms=stats.seconds * 1000.0,
        soundness_bound=dag_bound(dag),
        answers=prover.answers,
    )


def certify_pipe(dag, prover_argv, seed=None, record=True):
    """Run the verifier here and the prover in a subprocess."""
    if seed is None:
        seed = random.SystemRandom().getrandbits(64)
    channel = PipeChannel(prover_argv, record=record)
    stats = VerifierStats()
    t0 = time.perf_counter()
    try:
        verdict = run_verifier(dag, channel, seed, stats=stats)
    finally:
        channel.close()
    tr = Transcript(seed, channel.frames) if record else None
    return CertifyResult(
        verdict=verdict, seed=seed, transcript=tr,
        bytes_sent=channel.bytes_sent, bytes_received=channel.bytes_received,
        rounds=stats.rounds,
        # across a pipe the prover's share is the time spent waiting on it
        prover_ms=channel.prover_seconds * 1000.0,
        verifier_ms=stats.seconds * 1000.0,
        soundness_bound=dag_bound(dag),
    )


@dataclass
class ReplayResult:
    verdict: object
    recorded: Optional[object]
    matches: bool
    truncated: bool
    failed_check: Optional[object] = None


def replay(dag, data):
    """Re-run the verifier on a recorded transcript's prover messages.

    When a check fails but the recording carries on with further
    challenges, the recorded verifier cannot have been running on this
    instance with these answers (it would have stopped at the same check),
    so the transcript is rejected as a protocol violation; the failed check
    is kept in ``failed_check``.
    """
    from .rounds import Reason, Verdict
    from .transcript import split_header
    seed, body = split_header(data)
    channel = ReplayChannel(body)
    verdict = run_verifier(dag, channel, seed)
    recorded = None
    failed_check = None
    if channel.recorded_verdict is not None:
        try:
            recorded = wire.decode(channel.recorded_verdict)
        except wire.WireError:
            recorded = None
    if (not verdict.accepted and recorded is not None
            and recorded.tag in (wire.CHALLENGE, wire.CHALLENGE_R)
            and verdict.reason != Reason.PROTOCOL_VIOLATION):
        failed_check = verdict.reason
        verdict = Verdict.reject(Reason.PROTOCOL_VIOLATION, verdict.ordinal)
    if verdict.accepted:
        mine = wire.decode(wire.accept(verdict.count_mod_p))
    else:
        mine = wire.decode(wire.reject(verdict.reason, verdict.ordinal))
    matches = recorded == mine and not channel.trailing
    return ReplayResult(verdict, recorded, matches, channel.truncated, failed_check)
