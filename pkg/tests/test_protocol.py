import random
import sys
from fractions import Fraction

import pytest

from cpcert.brute import brute_force_count
from cpcert.circuit import AND, Cpd, CpeDag
from cpcert.field import P
from cpcert.generators import random_cpe, random_qdimacs
from cpcert.protocol import (Corruption, GuardError, Prover, Reason, certify, cpcertify,
                             lower_bound_answers, run_verifier, soundness_bound)
from cpcert.protocol import wire
from cpcert.protocol.bound import bound_decimal, bound_log10, dag_bound
from cpcert.protocol.channel import Channel, ChannelError, InProcessChannel
from cpcert.protocol.prover import ADD_ONE, FLIP_INITIAL_K, RANDOM_POLY
from cpcert.protocol.rounds import Ask, Draw
from cpcert.protocol.session import certify_pipe
from cpcert.protocol.verifier import check_guard
from cpcert.qdimacs import build_cpe

from conftest import small_qbf_dag


class TamperChannel(InProcessChannel):
    """Honest prover, but reply number ``at`` is replaced by ``fn(reply)``."""

    def __init__(self, prover, at, fn):
        super().__init__(prover)
        self.at = at
        self.fn = fn
        self.count = 0

    def _exchange(self, frame):
        reply = super()._exchange(frame)
        if self.count == self.at:
            reply = self.fn(reply)
        self.count += 1
        return reply


def honest_run(dag, seed=1, **kw):
    return certify(dag, seed=seed, **kw)


class TestHonest:
    def test_small_qbf(self, small_qbf):
        res = honest_run(small_qbf)
        assert res.verdict.accepted
        assert res.verdict.count_mod_p == 1
        assert res.answers >= lower_bound_answers(Cpd(small_qbf))

    def test_random_instances(self, rng):
        for _ in range(60):
            dag = random_cpe(rng)
            want = brute_force_count(dag)
            for seed in (1, 2):
                res = honest_run(dag, seed=seed)
                assert res.verdict.accepted, str(res.verdict)
                assert res.verdict.count_mod_p == want % P

    def test_qdimacs_instances(self, rng):
        for _ in range(5):
            dag = build_cpe(random_qdimacs(rng, 8, 12, blocks=2))
            res = honest_run(dag, seed=rng.getrandbits(64))
            assert res.verdict.accepted
            assert res.verdict.count_mod_p == brute_force_count(dag)

    def test_opt_eval_same_transcript(self, rng):
        for _ in range(10):
            dag = build_cpe(random_qdimacs(rng, 9, 14))
            a = honest_run(dag, seed=5)
            b = honest_run(dag, seed=5, opt_eval=True)
            assert a.transcript.to_bytes() == b.transcript.to_bytes()

    def test_constant_root(self):
        dag = CpeDag(1)
        dag.root = dag.true()
        res = honest_run(dag)
        assert res.verdict.accepted and res.verdict.count_mod_p == 1

    def test_stats(self, small_qbf):
        res = honest_run(small_qbf)
        st = res.stats()
        assert st["v"] == 1
        assert st["count"] == 1 and st["count_mod_p"] == 1
        assert st["bytes_sent"] + st["bytes_received"] == res.bytes_total
        assert st["rounds"] == res.rounds > 0


class TestDishonest:
    @pytest.mark.parametrize("mode", [FLIP_INITIAL_K, ADD_ONE, RANDOM_POLY])
    def test_every_target_rejected(self, small_qbf, mode):
        honest = honest_run(small_qbf).answers
        for target in range(honest):
            c = Corruption(mode, target, seed=target)
            res = honest_run(small_qbf, seed=target + 10, corruption=c)
            assert c.applied
            assert not res.verdict.accepted
            if mode == FLIP_INITIAL_K:
                break

    def test_random_instances(self, rng):
        for _ in range(30):
            dag = random_cpe(rng)
            honest = honest_run(dag, seed=1).answers
            target = rng.randrange(honest)
            c = Corruption(rng.choice([ADD_ONE, RANDOM_POLY]), target, seed=rng.getrandbits(32))
            res = honest_run(dag, seed=rng.getrandbits(64), corruption=c)
            assert not res.verdict.accepted

    def test_same_seed_as_verifier(self):
        # a leaf answer is the challenge point itself; the fault stream must
        # not reproduce it when both sides share a seed
        dag = CpeDag(1)
        x = dag.var(1)
        dag.root = dag.peval(1, 0, dag.disj(x, dag.neg(x)))
        honest = honest_run(dag, seed=5)
        assert honest.verdict.accepted
        for target in range(1, honest.answers):
            c = Corruption(RANDOM_POLY, target, seed=5)
            assert not honest_run(dag, seed=5, corruption=c).verdict.accepted

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            Corruption("lie-loudly")


class TestMalformedReplies:
    def run(self, dag, at, fn):
        prover = Prover(dag).build()
        ch = TamperChannel(prover, at, fn)
        return run_verifier(dag, ch, 3)

    def test_abort(self, small_qbf):
        v = self.run(small_qbf, 0, lambda r: wire.abort())
        assert v.reason == Reason.PROVER_ABORT

    def test_non_canonical_value(self, small_qbf):
        v = self.run(small_qbf, 0, lambda r: r[:7] + P.to_bytes(8, "little"))
        assert v.reason == Reason.PROTOCOL_VIOLATION

    def test_wrong_ordinal(self, small_qbf):
        def bump(r):
            f = wire.decode(r)
            return wire.Frame(f.tag, f.ordinal + 1, f.var, f.payload).encode()
        v = self.run(small_qbf, 2, bump)
        assert v.reason == Reason.PROTOCOL_VIOLATION

    def test_garbage(self, small_qbf):
        v = self.run(small_qbf, 1, lambda r: b"\x99" * 3)
        assert v.reason == Reason.PROTOCOL_VIOLATION

    def test_channel_failure(self, small_qbf):
        class Broken(Channel):
            def _exchange(self, frame):
                raise ChannelError("gone")
        v = run_verifier(small_qbf, Broken(), 1)
        assert v.reason == Reason.PROTOCOL_VIOLATION

    def test_prover_aborts_on_out_of_order(self, small_qbf):
        p = Prover(small_qbf)
        reply = p.handle(wire.challenge(5, None))
        assert wire.decode(reply).tag == wire.ABORT
        assert wire.decode(p.handle(b"\x01")).tag == wire.ABORT


class TestGuard:
    def wide(self, n):
        dag = CpeDag(n)
        vs = [dag.var(x) for x in range(1, n + 1)]
        dag.root = dag.balanced(AND, [dag.disj(v, dag.neg(v)) for v in vs], True)
        return dag

    def test_guard_rejects(self):
        dag = self.wide(61)
        with pytest.raises(GuardError):
            check_guard(dag)
        res = certify(dag, seed=1, prover=Prover(dag))
        assert res.verdict.reason == Reason.GUARD

    def test_sixty_is_fine(self):
        check_guard(self.wide(60))


class TestRounds:
    def test_oracle_driven_generator(self, rng):
        # drive the shared round logic with answers from a fresh prover, no wire
        for _ in range(20):
            dag = random_cpe(rng)
            cpd = Cpd(dag)
            prover = Prover(dag).build()
            gen = cpcertify(cpd)
            ev = next(gen)
            asks = 0
            try:
                while True:
                    if isinstance(ev, Ask):
                        asks += 1
                        ev = gen.send(prover.evaluate(cpd.refs[ev.ordinal], ev.sigma, ev.var))
                    else:
                        assert isinstance(ev, Draw)
                        ev = gen.send(rng.randrange(P))
            except StopIteration as stop:
                verdict = stop.value
            assert verdict.accepted
            assert verdict.count_mod_p == brute_force_count(dag) % P
            assert asks >= lower_bound_answers(cpd)

    def test_challenges_bounded(self, rng):
        for _ in range(30):
            dag = random_cpe(rng)
            res = honest_run(dag)
            n, size = max(dag.n, 1), dag.size()
            assert res.rounds <= 3 * n * size + 2 * size + 1


class TestBound:
    def test_reference_value(self):
        b = soundness_bound(1000, 10 ** 5)
        assert b == Fraction(4 * 1000 * 10 ** 5, P)
        assert 1.6e-10 < float(b) < 1.8e-10
        assert bound_decimal(b) == "1.73e-10"
        assert -9.8 < bound_log10(b) < -9.7

    def test_zero(self):
        assert soundness_bound(0, 10) == 0
        assert bound_log10(Fraction(0)) is None
        assert bound_decimal(Fraction(0)) == "0"

    def test_dag_bound(self, small_qbf):
        assert dag_bound(small_qbf) == soundness_bound(1, small_qbf.size())


class TestPipe:
    def test_pipe_matches_in_process(self, tmp_path):
        f = tmp_path / "small_qbf.qdimacs"
        f.write_text("p cnf 2 1\na 2 0\n-1 2 0\n")
        from cpcert.cli import load_instance
        dag = load_instance(str(f))
        argv = [sys.executable, "-m", "cpcert", "prove", str(f)]
        piped = certify_pipe(dag, argv, seed=9)
        local = certify(dag, seed=9)
        assert piped.verdict == local.verdict
        assert piped.verdict.accepted
        assert piped.transcript.to_bytes() == local.transcript.to_bytes()
