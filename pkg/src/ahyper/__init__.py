"""Confluent A-hypergeometric toolkit.

Certifies the combinatorial invariants of an integer point configuration
(normalized volume, nonresonance, non-degeneracy), finds and classifies
the Morse critical points of the associated Laurent polynomial, builds
rapid-decay integration cycles and steepest-descent thimbles, evaluates
the period integrals numerically, and produces saddle-point expansions
and Stokes-line data.
"""

__version__ = "0.1.0"
