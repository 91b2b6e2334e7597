"""Match persistence: an append-only record log plus derived statistics.

Every completed game becomes one JSON line holding the engine-format
record text and the surrounding metadata.  Nothing else is stored; all
statistics (leaderboard, head-to-head matrix, intransitivity) are
rebuilt from the log, so the log is the single source of truth and a
half-written trailing line after a crash is simply skipped.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..engine import GameState
from ..evaluate import EvalReport, bootstrap_epsilon, epsilon, matrix_from_reports
from ..records import parse_game, serialize_game

RECORD_FILE = "records.jsonl"


class ReplayMismatchError(RuntimeError):
    """A stored record no longer re-scores to its stored result."""


@dataclass(frozen=True)
class MatchRecord:
    game_id: str
    players: Tuple[str, str, str, str]
    started: str
    finished: str
    record: str
    per_player: Tuple[int, int, int, int]
    per_team: Tuple[int, int]

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "MatchRecord":
        raw = json.loads(line)
        return cls(game_id=raw["game_id"], players=tuple(raw["players"]),
                   started=raw["started"], finished=raw["finished"],
                   record=raw["record"],
                   per_player=tuple(raw["per_player"]),
                   per_team=tuple(raw["per_team"]))


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def report_from_margins(margins: Sequence[float]) -> EvalReport:
    """Eval-style report over independent per-game margins (A minus B)."""
    obs = np.asarray(margins, dtype=float)
    if obs.size == 0:
        raise ValueError("no games between this pair")
    stderr = (float(obs.std(ddof=1) / math.sqrt(obs.size))
              if obs.size > 1 else 0.0)
    return EvalReport(wpg=float(obs.mean()), stderr=stderr,
                      win_rate=float((obs > 0).mean()),
                      draw_rate=float((obs == 0).mean()),
                      loss_rate=float((obs < 0).mean()),
                      games=int(obs.size),
                      per_deal=tuple(float(x) for x in obs))


class RecordStore:
    """Loads, appends, and summarizes match records under one directory."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.path = self.root / RECORD_FILE
        self._records: List[MatchRecord] = []
        self._by_id: Dict[str, MatchRecord] = {}
        self.skipped_lines = 0
        if self.path.exists():
            for line in self.path.read_text().splitlines():
                if not line.strip():
                    continue
                try:
                    record = MatchRecord.from_json(line)
                except (json.JSONDecodeError, KeyError, TypeError):
                    self.skipped_lines += 1
                    continue
                self._remember(record)

    def _remember(self, record: MatchRecord) -> None:
        self._records.append(record)
        self._by_id[record.game_id] = record

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> Tuple[MatchRecord, ...]:
        return tuple(self._records)

    def get(self, game_id: str) -> Optional[MatchRecord]:
        return self._by_id.get(game_id)

    def next_game_id(self) -> str:
        return f"g-{len(self._records) + 1:06d}"

    def append(self, state: GameState, players: Sequence[str],
               started: str, finished: Optional[str] = None,
               game_id: Optional[str] = None) -> MatchRecord:
        if not state.finished:
            raise ValueError("only finished games are recorded")
        if game_id is None or game_id in self._by_id:
            game_id = self.next_game_id()
        score = state.scores()
        record = MatchRecord(
            game_id=game_id,
            players=tuple(players),
            started=started,
            finished=finished or utc_now(),
            record=serialize_game(state),
            per_player=tuple(score.per_player),
            per_team=tuple(score.per_team),
        )
        with self.path.open("a") as fh:
            fh.write(record.to_json() + "\n")
        self._remember(record)
        return record

    def verify(self, record: MatchRecord) -> None:
        """Re-parse and re-score; raises if the stored result drifted."""
        state = parse_game(record.record)
        if not state.finished:
            raise ReplayMismatchError(f"{record.game_id}: incomplete record")
        score = state.scores()
        if (tuple(score.per_player) != record.per_player
                or tuple(score.per_team) != record.per_team):
            raise ReplayMismatchError(
                f"{record.game_id}: replay scored {score.per_player}, "
                f"stored {record.per_player}")

    def verify_all(self) -> int:
        for record in self._records:
            self.verify(record)
        return len(self._records)

    # --- statistics -------------------------------------------------------

    def pair_margins(self) -> Dict[Tuple[str, str], List[float]]:
        """Per-game margins keyed by (team A label, team B label).

        Only games where partners share a name have a well-defined label
        pair; mixed-partner games are ignored here.
        """
        margins: Dict[Tuple[str, str], List[float]] = {}
        for record in self._records:
            a, b, c, d = record.players
            if a != c or b != d or a == b:
                continue
            diff = float(record.per_team[0] - record.per_team[1])
            if a <= b:
                margins.setdefault((a, b), []).append(diff)
            else:
                margins.setdefault((b, a), []).append(-diff)
        return margins

    def pair_reports(self) -> Dict[Tuple[str, str], EvalReport]:
        return {pair: report_from_margins(values)
                for pair, values in self.pair_margins().items()}

    def leaderboard(self, baseline: str = "greed") -> List[dict]:
        rows = []
        for (a, b), report in self.pair_reports().items():
            if b == baseline and a != baseline:
                rows.append({"agent": a, "games": report.games,
                             "wpg": report.wpg, "stderr": report.stderr})
            elif a == baseline and b != baseline:
                rows.append({"agent": b, "games": report.games,
                             "wpg": -report.wpg, "stderr": report.stderr})
        rows.sort(key=lambda row: -row["wpg"])
        return rows

    def matrix(self) -> dict:
        reports = self.pair_reports()
        agents = sorted({name for pair in reports for name in pair})
        index = {name: i for i, name in enumerate(agents)}
        n = len(agents)
        wpg = [[None] * n for _ in range(n)]
        games = [[0] * n for _ in range(n)]
        for i in range(n):
            wpg[i][i] = 0.0
        for (a, b), report in reports.items():
            i, j = index[a], index[b]
            wpg[i][j] = report.wpg
            wpg[j][i] = -report.wpg
            games[i][j] = games[j][i] = report.games
        return {"agents": agents, "wpg": wpg, "games": games}

    def intransitivity(self, resamples: int = 200, seed: int = 0) -> dict:
        """Epsilon over every agent subset with complete pairwise data."""
        reports = self.pair_reports()
        agents = sorted({name for pair in reports for name in pair})
        covered = [name for name in agents
                   if all((min(name, other), max(name, other)) in reports
                          for other in agents if other != name)]
        if len(covered) < 3:
            return {"agents": covered, "epsilon": None,
                    "reason": "need complete pairwise data for 3+ agents"}
        # label order and index order agree, so stored pairs stay (i < j)
        index = {name: i for i, name in enumerate(covered)}
        indexed = {(index[a], index[b]): report
                   for (a, b), report in reports.items()
                   if a in index and b in index}
        xi = matrix_from_reports(len(covered), indexed)
        point, stderr = bootstrap_epsilon(len(covered), indexed,
                                          resamples=resamples, seed=seed)
        return {"agents": covered, "epsilon": epsilon(xi),
                "bootstrap": point, "stderr": stderr}
