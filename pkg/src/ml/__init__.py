"""
Machine Learning Module

Autoencoder model, objectives, COBYLA training, the quantum-kernel
classifier and the experiment pipeline.
"""
