"""
Scoring Module

Reconstruction and classification metrics, plus report tables over
run directories.
"""
