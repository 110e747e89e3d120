"""
CLI Module

Command-line interface for zeta-qvae (gen, train, check, report).
"""
