"""Truncated bar construction, twisted functors and the comparison isomorphisms."""
