"""Exact fields and graded linear algebra."""
