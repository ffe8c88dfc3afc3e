"""Unit tests for LVS Sim."""
