"""Bounded-confidence opinion dynamics with media, experts and gossip on scale-free networks."""

__version__ = "0.1.0"
