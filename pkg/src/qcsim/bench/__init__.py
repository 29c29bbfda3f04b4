"""Benchmark harness, scaling fits, memory estimates and top-k validation."""
