"""Benchmark front end: run requests, sweeps and the published tables."""
