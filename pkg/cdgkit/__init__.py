"""Exact computations with curved DG algebras, coalgebras and their module categories."""
