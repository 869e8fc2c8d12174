"""Orthogonal constant-amplitude sequence toolkit for OFDM preambles."""

__version__ = "0.1.0"

from . import factorlab, rachsim, seqforge, seqverify, spectra  # noqa: F401,E402
