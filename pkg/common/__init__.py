"""Shared settings, logging, errors and random streams for sparsecluster."""
