"""Certifying #CP solver: BDD-based prover and a small verifier for the
CPCertify interactive protocol over GF(2^61 - 1)."""

__version__ = "0.1.0"
