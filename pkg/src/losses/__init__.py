"""
Losses Module

Fidelity, relative-entropy, Jensen-Shannon and Wasserstein divergences.
"""
