"""Holomorphic maps from the unit ball into Type IV domains.

Executable catalog of proper and isometric maps, Bergman and indefinite
metrics, automorphism group actions, the classification of isometries of the
ball into ``D^IV_{n+1}``, and exact jet checks on Heisenberg models.
"""

__version__ = "0.1.0"
