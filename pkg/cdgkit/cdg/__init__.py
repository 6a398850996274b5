"""Curved DG algebras, their modules, Hom complexes and standard constructions."""
