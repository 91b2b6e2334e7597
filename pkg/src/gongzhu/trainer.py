"""Double-dummy self-play training loop.

All four seats of a self-play game are driven by tree search over the
true deal, so policy targets come from a searcher that sees every hand.
Inputs use the exact-hands encoding from the mover's perspective and the
value target is the end-of-game team point differential signed for the
mover's team.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .agents import Agent, MrGreed, MrRandom
from .cards import POINT_CARD_ORDER
from .engine import Score, deal, score
from .evaluate import match
from .mcts import (FastState, SearchConfig, encode_fast, net_evaluator,
                   sample_from_visits, search)
from .nn import (AdamState, NetConfig, PolicyValueNet, TrainingSample,
                 kl_divergence, masked_policy, train_step)
from .nn.network import stack_samples
from .nn.play import NetAgent

__all__ = [
    "ReplayBuffer",
    "TrainRunConfig",
    "selfplay_game",
    "train_epoch",
    "progress_eval",
    "run_training",
    "METRIC_COLUMNS",
]

METRIC_COLUMNS = ("batch", "loss_kl", "loss_v", "wpg_random", "wpg_greed")


class ReplayBuffer:
    """Sliding window over the most recent self-play batches.

    Training always sees the newest batch plus the previous ``window - 1``;
    older batches are dropped wholesale.  At the default sizes that is
    3 x 64 games x 52 plays = 9984 samples once the window is full.
    """

    def __init__(self, window: int = 3):
        if window < 1:
            raise ValueError("window must be >= 1")
        self.window = window
        self._batches: List[List[TrainingSample]] = []

    def __len__(self) -> int:
        return sum(len(b) for b in self._batches)

    def push_batch(self, samples: Sequence[TrainingSample]) -> None:
        self._batches.append(list(samples))
        if len(self._batches) > self.window:
            del self._batches[: len(self._batches) - self.window]

    def samples(self) -> List[TrainingSample]:
        return [s for batch in self._batches for s in batch]


@dataclass(frozen=True)
class TrainRunConfig:
    games_per_batch: int = 64
    batches: int = 1
    seed: int = 0
    out_dir: Optional[Path] = None
    net_config: NetConfig = NetConfig()
    iterations_per_batch: int = 3
    window: int = 3
    explore_plays: int = 32
    eval_deals: int = 16
    checkpoint_every: int = 16
    keep_checkpoints: int = 8

    def __post_init__(self):
        positive = ("games_per_batch", "batches", "iterations_per_batch",
                    "window", "eval_deals", "checkpoint_every",
                    "keep_checkpoints")
        for name in positive:
            if getattr(self, name) < 1:
                raise ValueError(name + " must be positive")
        if self.explore_plays < 0:
            raise ValueError("explore_plays must be >= 0")


def _game_seed(seed: int, index: int) -> int:
    return seed * 1_000_003 + index


def _pile_cards(mask: int) -> frozenset:
    return frozenset(POINT_CARD_ORDER[i] for i in range(16) if mask >> i & 1)


def selfplay_game(net: PolicyValueNet, seed: int, explore_plays: int = 32
                  ) -> Tuple[List[TrainingSample], Score]:
    """Play one game with every seat searching the true deal.

    Returns one sample per play (52 in all) and the final score.  The
    search budget is twice the legal-move count at every decision; moves
    are sampled from the visit distribution for the first
    ``explore_plays`` plays and taken greedily after that.
    """
    rng = Random(f"selfplay:{seed}")
    fast = FastState.from_state(deal(seed))
    evaluator = net_evaluator(net)
    config = SearchConfig.training()
    samples: List[TrainingSample] = []
    movers: List[int] = []
    while not fast.finished:
        mover = fast.to_play
        probs, _ = search(fast, evaluator, config)
        mask = np.zeros(52)
        for card in fast.legal_cards():
            mask[card] = 1.0
        samples.append(TrainingSample(input=encode_fast(fast, mover),
                                      target_policy=probs,
                                      target_value=0.0,
                                      legal_mask=mask))
        movers.append(mover)
        tau = 1.0 if len(movers) <= explore_plays else 0.0
        fast.play(sample_from_visits(probs, tau, rng))
    diff = float(fast.team_differential())
    for sample, mover in zip(samples, movers):
        sample.target_value = diff if mover % 2 == 0 else -diff
    return samples, score([_pile_cards(m) for m in fast.piles])


def train_epoch(buffer: ReplayBuffer, net: PolicyValueNet, opt: AdamState,
                iterations: int = 3) -> Dict[str, float]:
    """Adam passes over the whole buffer window; the net updates in place.

    Returns the post-update loss split into its policy (mean KL) and
    value (mean absolute error) parts.  A divergence signal raised inside
    the optimizer propagates out untouched.
    """
    samples = buffer.samples()
    if not samples:
        raise ValueError("replay buffer is empty")
    X, T, V, M = stack_samples(samples)
    train_step(net, opt, X, T, V, M, iterations=iterations)
    logits, values = net.forward_batch(X)
    kl = float(kl_divergence(T, masked_policy(logits.astype(float), M)).mean())
    v_err = float(np.abs(values.astype(float) - V).mean())
    return {"loss_kl": kl, "loss_v": v_err,
            "loss": kl + net.config.lam * v_err}


def progress_eval(net: PolicyValueNet, opponents: Mapping[str, Agent],
                  deals: int, seed: int = 0) -> Dict[str, float]:
    """WPG of greedy net play against each named opponent."""
    agent = NetAgent(net)
    return {name: match(agent, opponents[name], deals, seed=seed).wpg
            for name in sorted(opponents)}


def _prune_checkpoints(out_dir: Path, keep: int) -> None:
    files = sorted(out_dir.glob("checkpoint-*.gzpv"))
    for stale in files[:-keep]:
        stale.unlink()


def run_training(config: TrainRunConfig,
                 net: Optional[PolicyValueNet] = None,
                 log: Optional[Callable[[str], None]] = None
                 ) -> Tuple[PolicyValueNet, List[Dict[str, float]]]:
    """Self-play, train, checkpoint; returns the net and per-batch metrics.

    With ``config.out_dir`` set, metrics stream to metrics.csv as they are
    produced, a checkpoint lands every ``checkpoint_every`` batches (only
    the most recent ``keep_checkpoints`` survive) and the final weights go
    to model.gzpv.  Identical configs give bit-identical weights.
    """
    if net is None:
        net = PolicyValueNet(config.net_config, seed=config.seed)
    opt = AdamState()
    buffer = ReplayBuffer(config.window)
    opponents: Dict[str, Agent] = {"random": MrRandom(), "greed": MrGreed()}
    eval_seed = config.seed ^ 0x5EED
    out_dir = Path(config.out_dir) if config.out_dir is not None else None
    handle = None
    writer = None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        handle = open(out_dir / "metrics.csv", "w", newline="")
        writer = csv.DictWriter(handle, fieldnames=METRIC_COLUMNS)
        writer.writeheader()
    rows: List[Dict[str, float]] = []
    game_index = 0
    try:
        for batch in range(1, config.batches + 1):
            batch_samples: List[TrainingSample] = []
            for _ in range(config.games_per_batch):
                game, _ = selfplay_game(net, _game_seed(config.seed,
                                                        game_index),
                                        explore_plays=config.explore_plays)
                batch_samples.extend(game)
                game_index += 1
            buffer.push_batch(batch_samples)
            losses = train_epoch(buffer, net, opt,
                                 iterations=config.iterations_per_batch)
            wpg = progress_eval(net, opponents, config.eval_deals,
                                seed=eval_seed)
            row: Dict[str, float] = {"batch": batch,
                                     "loss_kl": losses["loss_kl"],
                                     "loss_v": losses["loss_v"],
                                     "wpg_random": wpg["random"],
                                     "wpg_greed": wpg["greed"]}
            rows.append(row)
            if writer is not None:
                writer.writerow(row)
                handle.flush()
            if log is not None:
                log("batch %d loss_kl=%.4f loss_v=%.2f wpg_random=%.1f"
                    " wpg_greed=%.1f" % (batch, row["loss_kl"],
                                         row["loss_v"], row["wpg_random"],
                                         row["wpg_greed"]))
            if out_dir is not None and batch % config.checkpoint_every == 0:
                net.save(out_dir / ("checkpoint-%06d.gzpv" % batch))
                _prune_checkpoints(out_dir, config.keep_checkpoints)
        if out_dir is not None:
            net.save(out_dir / "model.gzpv")
    finally:
        if handle is not None:
            handle.close()
    return net, rows
