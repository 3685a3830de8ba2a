"""Integration tests for ScholarSource backend."""
