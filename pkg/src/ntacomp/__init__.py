"""Compositional model checking for networks of timed automata with broadcast
channels, binary channels, shared variables and committed locations."""

__version__ = "0.1.0"
