"""Dense two-qubit quantum mechanics: matrices, gates, states and the protocol."""
