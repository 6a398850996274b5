"""Pydantic models for manifests and reports."""
