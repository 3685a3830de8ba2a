"""Unit tests for ScholarSource backend."""
