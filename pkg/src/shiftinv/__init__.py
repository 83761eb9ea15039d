"""Shift invariance of colored vertex models, random walks and polymers.

Exact checks live in vertexcore, latticepf, fusion and walkcov; polysim
samples the stochastic models and stattest compares the samples.
"""

__version__ = "0.1.0"
