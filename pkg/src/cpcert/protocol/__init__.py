"""The CPCertify protocol: shared round logic, verifier, prover, wire format."""

from .bound import soundness_bound
from .prover import Corruption, Prover, lower_bound_answers
from .rounds import Reason, Verdict, cpcertify
from .session import certify, replay
from .verifier import GuardError, run_verifier

__all__ = [
    "Corruption", "GuardError", "Prover", "Reason", "Verdict", "certify", "cpcertify",
    "lower_bound_answers", "replay", "run_verifier", "soundness_bound",
]
