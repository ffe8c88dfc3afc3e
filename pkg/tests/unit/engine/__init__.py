"""Unit tests for engine modules."""
