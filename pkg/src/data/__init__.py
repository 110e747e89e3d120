"""
Data Module

Density-matrix datasets: generators, CSV ingestion, splits and bundles.
"""
