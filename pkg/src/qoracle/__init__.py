"""Grover oracle compiler: database encoding, logic synthesis and verification."""

__version__ = "0.1.0"
