"""Quantum thermometry with a probe coupled to a sample through ancilla qubits."""

__version__ = "0.1.0"
