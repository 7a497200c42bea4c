"""geosim: geographic automata and multi-agent geosimulation engine."""

__version__ = "0.1.0"
