"""Command-line front end.

    cpcert solve FILE
    cpcert certify FILE [--seed S] [--transcript OUT] [--inject MODE] [--opt-eval] [--order F] [--json]
    cpcert verify-transcript TRANSCRIPT --instance FILE
    cpcert brute FILE
    cpcert stats FILE

Exit codes: 0 solved / accepted, 1 rejected, 2 bad input, 3 guard.
"""

import argparse
import json
import os
import random
import sys
import time

from .brute import MAX_BRUTE_VARS, GuardError as BruteGuardError, brute_force_count
from .circuit import CircuitError
from .protocol import wire
from .protocol.bound import bound_decimal, dag_bound
from .protocol.channel import serve
from .protocol.prover import MODES, NONE, Corruption, Prover
from .protocol.session import certify, certify_pipe, replay
from .protocol.transcript import TranscriptError
from .protocol.verifier import MAX_FREE_VARS
from .qdimacs import QdimacsError, build_cpe, read_order_file, read_qdimacs
from .solver import BDDSolver

EXIT_OK, EXIT_REJECT, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read_text(path):
    try:
        with open(path, "rb") as fh:
            return fh.read().decode("ascii", errors="replace")
    except OSError as e:
        raise InputError("cannot read %s: %s" % (path, e.strerror or e)) from None


def load_instance(path, order_path=None):
    """Parse a QDIMACS file (and optional order file) into a CPE."""
    try:
        inst = read_qdimacs(_read_text(path))
        order = read_order_file(_read_text(order_path)) if order_path else None
        return build_cpe(inst, order)
    except QdimacsError as e:
        raise InputError("%s: %s" % (path, e)) from None
    except CircuitError as e:
        raise InputError("%s: %s" % (order_path or path, e)) from None


def pick_seed(arg):
    if arg is not None:
        return arg
    env = os.environ.get("CPCERT_SEED")
    if env:
        try:
            return int(env, 0) & 0xFFFFFFFFFFFFFFFF
        except ValueError:
            raise InputError("CPCERT_SEED is not an integer: %r" % env) from None
    return random.SystemRandom().getrandbits(64)


def _seed_arg(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be an integer") from None
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _emit(args, report, lines):
    if getattr(args, "json", False):
        print(json.dumps(report, sort_keys=True))
    else:
        for line in lines:
            print(line)


# -- commands ---------------------------------------------------------------

def cmd_solve(args):
    dag = load_instance(args.file, args.order)
    t0 = time.perf_counter()
    count = BDDSolver(dag).count()
    ms = (time.perf_counter() - t0) * 1000.0
    verdict = "SAT" if count else "UNSAT"
    _emit(args, {"count": count, "result": verdict, "free_vars": dag.n, "solve_ms": round(ms, 3)},
          ["count %d" % count, verdict])
    return EXIT_OK


def _guard(dag, limit):
    if dag.n > limit:
        print("error: %d free variables exceeds the guard of %d" % (dag.n, limit), file=sys.stderr)
        return True
    return False


def _prover_argv(args):
    argv = [sys.executable, "-m", "cpcert", "prove", args.file]
    if args.order:
        argv += ["--order", args.order]
    if args.opt_eval:
        argv.append("--opt-eval")
    if args.inject != NONE:
        argv += ["--inject", args.inject, "--inject-target", str(args.inject_target)]
    return argv


def _run_certify(args):
    dag = load_instance(args.file, args.order)
    if _guard(dag, min(args.max_vars, MAX_FREE_VARS)):
        return dag, None
    seed = pick_seed(args.seed)
    print("seed %d" % seed, file=sys.stderr if args.json else sys.stdout)
    record = bool(args.transcript)
    if args.pipe:
        res = certify_pipe(dag, _prover_argv(args), seed=seed, record=record)
    else:
        corruption = Corruption(args.inject, args.inject_target, seed)
        res = certify(dag, seed=seed, opt_eval=args.opt_eval, corruption=corruption, record=record)
    if record:
        try:
            with open(args.transcript, "wb") as fh:
                fh.write(res.transcript.to_bytes())
        except OSError as e:
            raise InputError("cannot write %s: %s" % (args.transcript, e.strerror or e)) from None
    return dag, res


def cmd_certify(args):
    dag, res = _run_certify(args)
    if res is None:
        return EXIT_GUARD
    v = res.verdict
    report = res.stats()
    report.update({"seed": res.seed, "verdict": "ACCEPT" if v.accepted else "REJECT",
                   "soundness_bound": bound_decimal(res.soundness_bound)})
    if not v.accepted:
        report["reason"] = v.reason.name
        report["ordinal"] = v.ordinal
    lines = ["verdict %s" % (v,)]
    if v.accepted:
        lines.append("count %d" % v.count_mod_p)
    lines += [
        "soundness bound %s" % bound_decimal(res.soundness_bound),
        "bytes %d (sent %d, received %d)" % (res.bytes_total, res.bytes_sent, res.bytes_received),
        "rounds %d" % res.rounds,
        "prover %.1f ms, verifier %.1f ms" % (res.prover_ms, res.verifier_ms),
    ]
    if args.transcript:
        lines.append("transcript %s" % args.transcript)
    _emit(args, report, lines)
    return EXIT_OK if v.accepted else EXIT_REJECT


def cmd_stats(args):
    args.json = True
    dag, res = _run_certify(args)
    if res is None:
        return EXIT_GUARD
    report = res.stats()
    report["seed"] = res.seed
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK if res.verdict.accepted else EXIT_REJECT


def cmd_verify_transcript(args):
    dag = load_instance(args.instance, args.order)
    try:
        with open(args.file, "rb") as fh:
            data = fh.read()
    except OSError as e:
        raise InputError("cannot read %s: %s" % (args.file, e.strerror or e)) from None
    try:
        res = replay(dag, data)
    except TranscriptError as e:
        raise InputError("%s: %s" % (args.file, e)) from None
    if res.truncated:
        raise InputError("%s: transcript is truncated" % args.file)
    print("verdict %s" % (res.verdict,))
    if res.failed_check is not None:
        print("the recording continues past a failed %s check (wrong instance or edited answers)"
              % res.failed_check.name.lower().replace("_", "-"))
    if not res.matches and res.verdict.accepted:
        print("note: recorded verdict differs from the replayed one")
    return EXIT_OK if res.verdict.accepted else EXIT_REJECT


def cmd_brute(args):
    dag = load_instance(args.file, args.order)
    try:
        count = brute_force_count(dag)
    except BruteGuardError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_GUARD
    print("count %d" % count)
    print("SAT" if count else "UNSAT")
    return EXIT_OK


def cmd_prove(args):
    """Prover half of ``certify --pipe``: frames on stdin, replies on stdout."""
    dag = load_instance(args.file, args.order)
    corruption = Corruption(args.inject, args.inject_target, 0)
    prover = Prover(dag, opt_eval=args.opt_eval, corruption=corruption).build()
    serve(prover, sys.stdin.buffer, sys.stdout.buffer)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="cpcert", description="Certifying #CP solver.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="QDIMACS instance")
        p.add_argument("--order", metavar="FILE", help="variable order, root first")

    p = sub.add_parser("solve", help="count models with the BDD solver")
    common(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    for name, func, text in (("certify", cmd_certify, "solve and certify the count"),
                             ("stats", cmd_stats, "certify and print JSON statistics")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--seed", type=_seed_arg, help="verifier seed (default: $CPCERT_SEED or random)")
        p.add_argument("--transcript", metavar="OUT", help="write the transcript here")
        p.add_argument("--inject", choices=MODES, default=NONE, help="make the prover lie")
        p.add_argument("--inject-target", type=int, default=0, metavar="K",
                       help="index of the answer to corrupt (0 = initial claim)")
        p.add_argument("--opt-eval", action="store_true", help="incremental evaluation along chains")
        p.add_argument("--pipe", action="store_true", help="run the prover in a subprocess")
        p.add_argument("--max-vars", type=int, default=MAX_FREE_VARS,
                       help="refuse instances with more free variables (at most %d)" % MAX_FREE_VARS)
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("verify-transcript", help="replay a recorded transcript")
    p.add_argument("file", help="transcript file")
    p.add_argument("--instance", required=True, metavar="FILE")
    p.add_argument("--order", metavar="FILE")
    p.set_defaults(func=cmd_verify_transcript)

    p = sub.add_parser("brute", help="exhaustive count (at most %d variables)" % MAX_BRUTE_VARS)
    common(p)
    p.set_defaults(func=cmd_brute)

    p = sub.add_parser("prove")  # internal, used by certify --pipe
    common(p)
    p.add_argument("--opt-eval", action="store_true")
    p.add_argument("--inject", choices=MODES, default=NONE)
    p.add_argument("--inject-target", type=int, default=0)
    p.set_defaults(func=cmd_prove)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    except wire.WireError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
