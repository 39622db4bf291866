"""Exact and quasiparticle-picture entanglement Hamiltonians after free-fermion quenches."""

__version__ = "0.1.0"
