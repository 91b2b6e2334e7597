from .encoding import (
    INPUT_SIZE,
    decode_hands,
    encode_averaged,
    encode_exact,
    legal_mask,
)
from .network import (
    AdamState,
    ModelCorruptError,
    NetConfig,
    PolicyValueNet,
    TrainingDivergedError,
    TrainingSample,
    batch_loss,
    kl_divergence,
    masked_policy,
    train_step,
)
from .play import NetAgent

__all__ = [
    "INPUT_SIZE", "decode_hands", "encode_averaged", "encode_exact",
    "legal_mask", "AdamState", "ModelCorruptError", "NetConfig",
    "PolicyValueNet", "TrainingDivergedError", "TrainingSample",
    "batch_loss", "kl_divergence", "masked_policy", "train_step", "NetAgent",
]
