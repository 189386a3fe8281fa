"""PseudoAMR: turn SRL and dependency annotations into AMR-like graphs,
linearize them for sequence-to-sequence training, and score graphs with Smatch."""
from .dp import DP_PRESETS, DpAmrizeConfig, amrize_dp, dp_preset
from .finegrained import METRICS, fine_grained
from .graph import AmrGraph, Edge, GraphError, Node, isomorphic, reentrancy_count, validate
from .ingest import DepTree, SrlFrameSet, read_conllu, read_srl_jsonl
from .lemmatizer import lemmatize_token
from .linearize import LinearizeError, LinearSeq, delinearize, linearize, restore, tag_sequence
from .penman import PenmanError, from_penman, read_penman, to_penman, write_penman
from .smatch import MetricScore, ScoreReport, TripleSet, brute_force_smatch, extract_triples, smatch
from .srl import SRL_PRESETS, SrlAmrizeConfig, amrize_srl, srl_preset

__all__ = [
    "AmrGraph", "Node", "Edge", "GraphError", "validate", "isomorphic", "reentrancy_count",
    "to_penman", "from_penman", "read_penman", "write_penman", "PenmanError",
    "DepTree", "SrlFrameSet", "read_conllu", "read_srl_jsonl",
    "SrlAmrizeConfig", "SRL_PRESETS", "srl_preset", "amrize_srl",
    "DpAmrizeConfig", "DP_PRESETS", "dp_preset", "amrize_dp", "lemmatize_token",
    "LinearSeq", "LinearizeError", "linearize", "delinearize", "restore", "tag_sequence",
    "TripleSet", "MetricScore", "ScoreReport", "extract_triples", "smatch", "brute_force_smatch",
    "METRICS", "fine_grained",
]
