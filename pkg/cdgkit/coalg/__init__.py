"""Curved DG coalgebras, comodules, contramodules and the functors between them."""
