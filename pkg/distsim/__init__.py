"""Round-synchronous simulator of the seeding / averaging / query clustering protocol."""

from distsim.config import SimConfig, expected_seed_count
from distsim.protocol import (
    UNLABELED,
    DiffusionState,
    InvariantReport,
    LabelAssignment,
    ProtocolRun,
    SimTranscript,
    activation_mask,
    activation_probabilities,
    averaging_round,
    misclassified_volume,
    query_labels,
    resolve_rounds,
    run_protocol,
    run_protocol_detailed,
    seeding,
    words_per_round,
)

__all__ = [
    "UNLABELED",
    "DiffusionState",
    "InvariantReport",
    "LabelAssignment",
    "ProtocolRun",
    "SimConfig",
    "SimTranscript",
    "activation_mask",
    "activation_probabilities",
    "averaging_round",
    "expected_seed_count",
    "misclassified_volume",
    "query_labels",
    "resolve_rounds",
    "run_protocol",
    "run_protocol_detailed",
    "seeding",
    "words_per_round",
]
