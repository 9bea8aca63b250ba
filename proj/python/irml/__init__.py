"""Python surface of the implicit semantic communication laboratory.

Thin re-export of the compiled _irml module: knowledge-graph synthesis,
semantic codec training, channel simulation, decoding, imitation-based
interpreters, the federated convergence bound, and the experiment runner.
"""

from _irml import (  # noqa: F401
    EmbeddingTable,
    IrmlComputeError,
    IrmlConfigError,
    IrmlDataError,
    KnowledgeGraph,
    encode_entities,
    estimate_channel,
    hard_decode,
    known_experiments,
    load_triples,
    recover_with_reasoning,
    run_experiment,
    scale_free_kg,
    theorem3_bound,
    toy_mdp,
    train_encoder,
    train_interpreter,
    transmit_entities,
)

__all__ = [
    "EmbeddingTable",
    "IrmlComputeError",
    "IrmlConfigError",
    "IrmlDataError",
    "KnowledgeGraph",
    "encode_entities",
    "estimate_channel",
    "hard_decode",
    "known_experiments",
    "load_triples",
    "recover_with_reasoning",
    "run_experiment",
    "scale_free_kg",
    "theorem3_bound",
    "toy_mdp",
    "train_encoder",
    "train_interpreter",
    "transmit_entities",
]
