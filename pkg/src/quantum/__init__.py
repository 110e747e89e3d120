"""
Quantum Module

Dense density-matrix simulation:
- linalg.py: kron, partial trace, spectral functions, random states
- states.py: DensityMatrix, embeddings, global states, Bloch coordinates
- channel.py: Rzz/Ry ansatz and the dilated encoder/decoder channels
"""
