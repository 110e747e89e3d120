"""
Verification Module

Randomized property suites (CPTP, ELBO bound, global/instance
equivalence, divergence axioms).
"""
