"""Kernel backend selection.

The numba path is used when numba imports cleanly; set
``TABLETOP_RL_NO_NUMBA=1`` to force the pure-numpy fallback. The two
backends agree within float32 rounding (see tests) but are not bit
identical; determinism guarantees hold per backend.
"""
from __future__ import annotations

import os

from . import kernels_numpy

if os.environ.get("TABLETOP_RL_NO_NUMBA", "").strip() not in ("", "0"):
    _impl = kernels_numpy
    BACKEND = "numpy"
else:
    try:
        from . import kernels_numba as _impl
        BACKEND = "numba"
    except ImportError:
        _impl = kernels_numpy
        BACKEND = "numpy"

policy_forward = _impl.policy_forward
ppo_loss = _impl.ppo_loss
ppo_grads = _impl.ppo_grads
gae = _impl.gae
