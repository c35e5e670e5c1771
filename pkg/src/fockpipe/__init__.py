"""Truncated Fock-space simulation of heralded entangled photon-added coherent states."""

__version__ = "0.1.0"
