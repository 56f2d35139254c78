"""Command-line entry point: build an experiment, run the replicas, write the CSV."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import adversary as adv
from .action_space import basis_plus_hypercube, canonical_basis, hypercube_actions, load_routes
from .errors import ConfigurationError, SlackBanditError, UnsupportedActionSetError
from .harness import AdversaryConfig, ExperimentSpec, PolicyConfig, run_game, run_replicated
from .io import ingest_jester, trace_path, write_results_csv, write_trace_csv
from .policies import ALGORITHMS, NnmfConfig

log = logging.getLogger("slackbandit")

ACTION_KINDS = ("basis", "hypercube", "paths", "mixed")
ADVERSARY_KINDS = {"fixed": adv.FIXED, "stochastic": adv.STOCHASTIC, "jester": adv.DATASET}

# (d, T, runs) match the reference network and ratings experiments; "mixed" is the canonical
# basis plus the first 2d hypercube corners.
PRESETS = {
    "network-d10": dict(dim=10, horizon=10000, runs=100, adversary="fixed", actions="mixed"),
    "network-d15": dict(dim=15, horizon=100, runs=100, adversary="fixed", actions="mixed"),
    "jester-d20": dict(dim=20, horizon=10000, runs=100, adversary="jester", actions="basis"),
}


@dataclass
class ExperimentConfig:
    algo: str = "extexp2"
    actions: str = "basis"
    dim: int = 10
    max_actions: int | None = None  # hypercube / mixed: corners to enumerate (None -> 2d)
    adversary: str = "fixed"
    horizon: int = 1000
    runs: int = 10
    seed: int = 0
    loss_seed: int = 0  # draws the fixed loss vector when no loss file is given
    eta: float | None = None
    alpha: float | None = None
    slack_source: str = "estimate"
    nnmf: NnmfConfig = field(default_factory=NnmfConfig)
    loss_file: str | None = None
    routes_file: str | None = None
    jester_file: str | None = None
    output_path: str = "results.csv"
    parallelism: int = 1
    verbose: bool = False
    preset: str | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seeds"] = list(range(self.seed, self.seed + self.runs))
        return d

    def validate(self) -> None:
        if self.algo not in ALGORITHMS:
            raise ConfigurationError(f"unknown algorithm {self.algo!r}")
        if self.actions not in ACTION_KINDS:
            raise ConfigurationError(f"unknown action set kind {self.actions!r}")
        if self.adversary not in ADVERSARY_KINDS:
            raise ConfigurationError(f"unknown adversary {self.adversary!r}")
        if self.dim < 1 or self.horizon < 1 or self.runs < 1 or self.parallelism < 1:
            raise ConfigurationError("dim, horizon, runs and parallelism must be positive")
        if self.eta is not None and self.eta < 0:
            raise ConfigurationError("eta must be >= 0")
        if self.alpha is not None and not 0 <= self.alpha <= 1:
            raise ConfigurationError("alpha must lie in [0, 1]")
        if self.nnmf.tol <= 0 or self.nnmf.window < 1 or self.nnmf.max_iter < 1 or self.nnmf.restarts < 1:
            raise ConfigurationError("nnmf tol, window, max_iter and restarts must be positive")
        if self.algo in ("exp3", "exp3p") and self.actions != "basis":
            raise ConfigurationError(f"{self.algo} requires --actions basis")
        if self.actions == "paths" and not self.routes_file:
            raise ConfigurationError("--actions paths needs --routes-file")
        if self.adversary == "jester" and not self.jester_file:
            raise ConfigurationError("--adversary jester needs --jester-file")
        for name in ("loss_file", "routes_file", "jester_file"):
            f = getattr(self, name)
            if f is not None and not Path(f).is_file():
                raise ConfigurationError(f"{name.replace('_', '-')} {f!r} does not exist")


def build_actions(cfg: ExperimentConfig):
    extra = cfg.max_actions if cfg.max_actions is not None else 2 * cfg.dim
    if cfg.actions == "basis":
        return canonical_basis(cfg.dim)
    if cfg.actions == "hypercube":
        return hypercube_actions(cfg.dim, extra)
    if cfg.actions == "mixed":
        return basis_plus_hypercube(cfg.dim, extra)
    return load_routes(cfg.routes_file, cfg.dim)


def build_adversary(cfg: ExperimentConfig) -> AdversaryConfig:
    kind = ADVERSARY_KINDS[cfg.adversary]
    if kind == adv.FIXED:
        if cfg.loss_file:
            loss = adv.load_fixed_loss(cfg.loss_file)
        else:
            loss = np.random.default_rng(cfg.loss_seed).random(cfg.dim)
        return AdversaryConfig(kind, fixed_loss=loss)
    if kind == adv.DATASET:
        return AdversaryConfig(kind, ratings=ingest_jester(cfg.jester_file, cfg.dim).rows)
    return AdversaryConfig(kind)


def build_spec(cfg: ExperimentConfig) -> ExperimentSpec:
    cfg.validate()
    actions = build_actions(cfg)
    if cfg.algo in ("exp3", "exp3p") and not actions.is_canonical_basis():
        raise UnsupportedActionSetError(f"{cfg.algo} requires the canonical basis action set")
    opponent = build_adversary(cfg)
    if opponent.dim is not None and opponent.dim != actions.dim:
        raise ConfigurationError(f"loss dimension {opponent.dim} does not match --dim {actions.dim}")
    policy = PolicyConfig(cfg.algo, cfg.eta, cfg.alpha, cfg.nnmf, cfg.slack_source)
    return ExperimentSpec(policy, opponent, actions, cfg.horizon)


def run_experiment(cfg: ExperimentConfig):
    spec = build_spec(cfg)
    log.info("%s on %r, T=%d, %d runs", cfg.algo, spec.actions, cfg.horizon, cfg.runs)
    series = run_replicated(spec, cfg.runs, cfg.seed, cfg.parallelism)
    write_results_csv(series, cfg, cfg.output_path)
    if cfg.verbose:
        rec = run_game(spec.policy, spec.adversary, spec.actions, spec.horizon, cfg.seed, verbose=True)
        write_trace_csv(rec.trace, trace_path(cfg.output_path))
    return series


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slackbandit",
                                description="Replicated combinatorial bandit games with pseudo-regret output.")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--algo", choices=ALGORITHMS)
    p.add_argument("--actions", choices=ACTION_KINDS)
    p.add_argument("--dim", type=int)
    p.add_argument("--max-actions", type=int, help="hypercube corners to enumerate (default 2*dim)")
    p.add_argument("--horizon", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--loss-seed", type=int)
    p.add_argument("--eta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--adversary", choices=sorted(ADVERSARY_KINDS))
    p.add_argument("--slack-source", choices=("estimate", "observed"))
    p.add_argument("--loss-file")
    p.add_argument("--routes-file")
    p.add_argument("--jester-file")
    p.add_argument("--nnmf-tol", type=float)
    p.add_argument("--nnmf-window", type=int)
    p.add_argument("--nnmf-restarts", type=int)
    p.add_argument("--nnmf-max-iter", type=int)
    p.add_argument("--nnmf-rmax", type=int)
    p.add_argument("--parallelism", type=int)
    p.add_argument("--out", dest="output_path")
    p.add_argument("--verbose", action="store_true", default=None)
    return p


_NNMF_FLAGS = {"nnmf_tol": "tol", "nnmf_window": "window", "nnmf_restarts": "restarts",
               "nnmf_max_iter": "max_iter", "nnmf_rmax": "r_max"}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values = dict(PRESETS[args.preset]) if args.preset else {}
    nnmf = NnmfConfig()
    for key, val in vars(args).items():
        if val is None:
            continue
        if key in _NNMF_FLAGS:
            setattr(nnmf, _NNMF_FLAGS[key], val)
        else:
            values[key] = val
    return ExperimentConfig(nnmf=nnmf, **values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        cfg.validate()
    except (ConfigurationError, TypeError) as exc:
        parser.print_usage(sys.stderr)
        print(f"slackbandit: error: {exc}", file=sys.stderr)
        return 2
    try:
        run_experiment(cfg)
    except UnsupportedActionSetError as exc:
        parser.print_usage(sys.stderr)
        print(f"slackbandit: error: {exc}", file=sys.stderr)
        return 2
    except (SlackBanditError, OSError) as exc:
        print(f"slackbandit: error: {exc}", file=sys.stderr)
        return 1
    print(cfg.output_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
