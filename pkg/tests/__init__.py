"""LVS Sim test suite."""
