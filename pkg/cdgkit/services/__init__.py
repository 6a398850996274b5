"""Orchestration: test families, oracles, certificates, manifests and runs."""
