"""
Simulation engine for LVS Sim.

- mobility: truncated Levy walk
- topology: neighbor graphs and MHS selection
- protocol: validation rounds and epochs
- cos: chains of sight and attack detectors
- reputation: opinions, verdicts and report acceptance
- adversary: attacker policies
"""

from .adversary import Adversary
from .cos import AreaKnowledge, Chain, DetectorHistory, exchange_round, merge_knowledge
from .events import Declaration, SpotEvent
from .protocol import EpochState, ValidationLedger, epoch_finished, run_round
from .reputation import OpinionTriple, ReputationBook, Verdict, classify, update_opinion
from .topology import NeighborGraph, greedy_mhs_select, neighbor_graph, optimal_mhs_bruteforce

__all__ = [
    "Adversary",
    "AreaKnowledge",
    "Chain",
    "Declaration",
    "DetectorHistory",
    "EpochState",
    "NeighborGraph",
    "OpinionTriple",
    "ReputationBook",
    "SpotEvent",
    "ValidationLedger",
    "Verdict",
    "classify",
    "epoch_finished",
    "exchange_round",
    "greedy_mhs_select",
    "merge_knowledge",
    "neighbor_graph",
    "optimal_mhs_bruteforce",
    "run_round",
    "update_opinion",
]
