"""Slack-regularized exponential weights for combinatorial bandits."""
from .action_space import ActionSet, basis_plus_hypercube, canonical_basis, dimensional_rank, hypercube_actions, path_actions
from .harness import AdversaryConfig, GameRecord, PolicyConfig, RegretSeries, pseudo_regret, run_game, run_replicated
from .nnmf import NnmfResult, factorize, min_nonneg_rank
from .policies import ALGORITHMS, NnmfConfig, Policy

__version__ = "0.1.0"
