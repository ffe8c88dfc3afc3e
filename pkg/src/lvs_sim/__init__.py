"""
LVS Sim - simulator of WiFi-hotspot location validation for participatory sensing.

Users validate each other's declared positions through mobile hotspots;
chains of sight expose colluding and covering attackers, and a
subjective-logic reputation filters the reports of spoofers.
"""

__version__ = "0.1.0"
