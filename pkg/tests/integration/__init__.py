"""Integration tests for LVS Sim."""
