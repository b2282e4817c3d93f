"""Multi-agent tabletop game engine with self-play PPO training.

Six games behind one forward-model interface, action masks over fixed
enumerated action spaces, game-agnostic reward functions, baseline agents
(Random / one-step look-ahead / MCTS), and a checkpoint-pool self-play
PPO trainer with periodic evaluation.
"""

__version__ = "0.1.0"

from . import games  # noqa: E402,F401  (registers the game implementations)
