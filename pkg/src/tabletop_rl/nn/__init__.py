"""Policy network: masked MLP with analytic PPO gradients.

Hot numeric kernels have two implementations: a numba-compiled path and a
pure-numpy reference. Selection happens in :mod:`tabletop_rl.nn.kernels`;
set ``TABLETOP_RL_NO_NUMBA=1`` to force the numpy path.
"""
from .net import (
    CheckpointError,
    MlpParams,
    PolicyCheckpoint,
    forward,
    init_params,
    load_checkpoint,
    sample_actions,
    save_checkpoint,
)

__all__ = [
    "CheckpointError",
    "MlpParams",
    "PolicyCheckpoint",
    "forward",
    "init_params",
    "load_checkpoint",
    "sample_actions",
    "save_checkpoint",
]
