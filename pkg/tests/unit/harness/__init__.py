"""Unit tests for harness modules."""
