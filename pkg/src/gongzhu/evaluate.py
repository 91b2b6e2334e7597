"""Benchmarking: paired matches, combat matrices, and an intransitivity score.

The headline number everywhere is WPG, the mean per-deal point margin of
one partnership over another.  Matches are duplicate-style: every board
is replayed with the partnerships swapped over the same cards and the two
margins are averaged, which cancels deal luck outright and lets an agent
measure exactly 0.0 against itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from random import Random
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np
from scipy import stats

from .agents import Agent
from .engine import GameState, deal, play

__all__ = [
    "EvalReport",
    "match",
    "combat",
    "combat_matrix",
    "matrix_from_reports",
    "epsilon",
    "bootstrap_epsilon",
    "one_sided_p",
]


def _deal_seed(seed: int, index: int) -> int:
    return seed * 1_000_003 + index


def _seat_rng(seed: int, index: int, seat: int) -> Random:
    # keyed to the seat rather than the agent so the swapped replay of a
    # board sees identical randomness; self-play pairs then cancel exactly
    return Random(f"{seed}:{index}:{seat}")


def _play_out(state: GameState, seats: Sequence[Agent],
              rngs: Sequence[Random]) -> GameState:
    while not state.finished:
        mover = state.to_play
        card = seats[mover].choose(state.view(mover), rngs[mover])
        state = play(state, card)
    return state


@dataclass(frozen=True)
class EvalReport:
    """Team A's results: margin per deal, rates per game."""

    wpg: float
    stderr: float
    win_rate: float
    draw_rate: float
    loss_rate: float
    games: int
    per_deal: Tuple[float, ...]

    @property
    def z(self) -> float:
        if self.stderr > 0:
            return self.wpg / self.stderr
        return 0.0 if self.wpg == 0 else math.copysign(math.inf, self.wpg)


def match(team_a: Agent, team_b: Agent, deals: int, seed: int = 0,
          paired: bool = True) -> EvalReport:
    """Play ``deals`` boards with A on seats 0/2 and B on seats 1/3.

    One board contributes one observation: the A-minus-B margin, averaged
    over the two seatings when ``paired``.  Win/draw/loss rates count
    individual games (two per board when paired).
    """
    if deals < 1:
        raise ValueError("deals must be >= 1")
    sides = (2 if paired else 1)
    obs = np.empty(deals)
    wins = draws = 0
    for index in range(deals):
        board = deal(_deal_seed(seed, index))
        total = 0.0
        for flip in range(sides):
            if flip:
                seats = (team_b, team_a, team_b, team_a)
            else:
                seats = (team_a, team_b, team_a, team_b)
            rngs = [_seat_rng(seed, index, s) for s in range(4)]
            final = _play_out(board, seats, rngs)
            team0, team1 = final.scores().per_team
            a_pts, b_pts = (team1, team0) if flip else (team0, team1)
            total += a_pts - b_pts
            if a_pts > b_pts:
                wins += 1
            elif a_pts == b_pts:
                draws += 1
        obs[index] = total / sides
    games = deals * sides
    stderr = float(obs.std(ddof=1) / math.sqrt(deals)) if deals > 1 else 0.0
    losses = games - wins - draws
    return EvalReport(wpg=float(obs.mean()), stderr=stderr,
                      win_rate=wins / games, draw_rate=draws / games,
                      loss_rate=losses / games, games=games,
                      per_deal=tuple(float(x) for x in obs))


def combat(agents: Sequence[Agent], deals: int, seed: int = 0
           ) -> Dict[Tuple[int, int], EvalReport]:
    """Full round-robin; returns a report per unordered index pair."""
    reports: Dict[Tuple[int, int], EvalReport] = {}
    for i, j in combinations(range(len(agents)), 2):
        pair_seed = seed * 7919 + 53 * i + j
        reports[(i, j)] = match(agents[i], agents[j], deals, seed=pair_seed)
    return reports


def matrix_from_reports(n: int,
                        reports: Mapping[Tuple[int, int], EvalReport]
                        ) -> np.ndarray:
    xi = np.zeros((n, n))
    for (i, j), report in reports.items():
        xi[i, j] = report.wpg
        xi[j, i] = -report.wpg
    return xi


def combat_matrix(agents: Sequence[Agent], deals: int,
                  seed: int = 0) -> np.ndarray:
    """Antisymmetric matrix of pairwise WPG values, zero diagonal."""
    return matrix_from_reports(len(agents), combat(agents, deals, seed=seed))


def epsilon(xi: np.ndarray) -> float:
    """How intransitive a pairwise-score matrix is, in [0, 1].

    For every strategy triple the transitivity gap is
    ``xi_ij + xi_jk - xi_ik``; the statistic is the sum of squared gaps
    over the sum of gaps weighted by the three magnitudes involved.  Any
    matrix generated from a rating vector scores 0 (all gaps vanish, and
    0/0 maps to 0); rock-paper-scissors scores 1; rescaling xi changes
    nothing.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.ndim != 2 or xi.shape[0] != xi.shape[1]:
        raise ValueError("xi must be a square matrix")
    n = xi.shape[0]
    if n < 3:
        raise ValueError("epsilon needs at least 3 strategies")
    num = 0.0
    den = 0.0
    for i, j, k in combinations(range(n), 3):
        gap = abs(xi[i, j] + xi[j, k] - xi[i, k])
        num += gap * gap
        den += gap * (abs(xi[i, j]) + abs(xi[j, k]) + abs(xi[i, k]))
    return num / den if den > 0.0 else 0.0


def bootstrap_epsilon(n: int, reports: Mapping[Tuple[int, int], EvalReport],
                      resamples: int = 200, seed: int = 0
                      ) -> Tuple[float, float]:
    """Point estimate of epsilon plus a bootstrap standard error.

    Each resample redraws every pair's per-deal margins with replacement,
    rebuilds the matrix from the resampled means and recomputes epsilon.
    """
    rng = np.random.default_rng(seed)
    point = epsilon(matrix_from_reports(n, reports))
    margins = {pair: np.asarray(r.per_deal) for pair, r in reports.items()}
    draws = np.empty(resamples)
    for b in range(resamples):
        xi = np.zeros((n, n))
        for (i, j), obs in margins.items():
            m = float(obs[rng.integers(0, len(obs), len(obs))].mean())
            xi[i, j] = m
            xi[j, i] = -m
        draws[b] = epsilon(xi)
    return point, float(draws.std(ddof=1))


def one_sided_p(observations: Sequence[float]) -> float:
    """P-value for mean(observations) > 0 under a one-sample t-test."""
    arr = np.asarray(observations, dtype=float)
    result = stats.ttest_1samp(arr, 0.0, alternative="greater")
    return float(result.pvalue)
