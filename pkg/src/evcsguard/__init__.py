"""Cyber attack prediction and decoy planning for EV charging stations.

Pipeline: STRIDE threats on a data-flow diagram, weighted attack-defense
trees, a supervised HMM over attack steps decoded with Viterbi, and POMCP
decoy placement against attackers that stray from the predicted path.
"""

from .errors import EvcsGuardError
from .hmm import DecodedPath, HmmModel, count_corpus, train, viterbi
from .planner import MonitoringModel, PlannerConfig, build_pomdp, compute_ppi, pomcp_search
from .threats import enumerate_threats, load_dfd
from .tree import compute_ods, enumerate_scenarios, parse_tree, serialize_tree

__version__ = "0.1.0"

__all__ = [
    "DecodedPath",
    "EvcsGuardError",
    "HmmModel",
    "MonitoringModel",
    "PlannerConfig",
    "build_pomdp",
    "compute_ods",
    "compute_ppi",
    "count_corpus",
    "enumerate_scenarios",
    "enumerate_threats",
    "load_dfd",
    "parse_tree",
    "pomcp_search",
    "serialize_tree",
    "train",
    "viterbi",
]
