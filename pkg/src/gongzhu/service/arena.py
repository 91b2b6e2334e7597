"""Game hosting: seats, turn flow, timeouts, and record persistence.

A table is a single serialized state machine; only its game loop
mutates game state.  Remote players are prompted with ``your_turn`` and
answered with broadcasts; every legality decision is made here against
the engine, never trusted from the wire.
"""

from __future__ import annotations

import asyncio
from random import Random
from typing import Callable, Dict, List, Optional, Sequence

from ..agents import MrRandom, make_agent
from ..cards import POINT_CARDS
from ..engine import GameState, PlayerView, deal, play, resolve_trick
from . import protocol
from .store import MatchRecord, RecordStore, utc_now

DEFAULT_TURN_TIMEOUT = 30.0


class SessionClosed(Exception):
    """The remote side went away; whoever awaits it must cope."""


class LocalSeat:
    """A server-side agent occupying a seat."""

    remote = False

    def __init__(self, agent, name: Optional[str] = None):
        self.agent = agent
        self.name = name or getattr(agent, "name", "agent")

    def pick(self, view: PlayerView, rng: Random) -> int:
        return self.agent.choose(view, rng)


class RemoteSeat:
    """A connected client occupying a seat."""

    remote = True

    def __init__(self, session):
        self.session = session
        self.name = session.name


class GameTable:
    def __init__(self, name: str, agents: Sequence[str], store: RecordStore,
                 seed: int = 0, turn_timeout: float = DEFAULT_TURN_TIMEOUT,
                 hint_fn: Optional[Callable[[PlayerView], Dict[int, float]]]
                 = None, max_games: Optional[int] = None):
        if len(agents) != 4:
            raise ValueError("a table needs exactly four fill agents")
        self.name = name
        self.store = store
        self.seed = seed
        self.turn_timeout = turn_timeout
        self.hint_fn = hint_fn
        self.max_games = max_games
        self.rng = Random(f"table:{name}:{seed}")
        self.seats: List[object] = [LocalSeat(make_agent(spec))
                                    for spec in agents]
        self.games_played = 0
        self.state: Optional[GameState] = None
        self.game_id: Optional[str] = None
        self._loop_task: Optional[asyncio.Task] = None

    # --- seating ----------------------------------------------------------

    def player_names(self) -> List[str]:
        return [occupant.name for occupant in self.seats]

    def _claimable(self, seat: int) -> bool:
        occupant = self.seats[seat]
        return not (occupant.remote and occupant.session.alive)

    async def claim(self, session, seat: Optional[int] = None) -> int:
        if seat is None:
            seat = next((i for i in range(4) if self._claimable(i)), None)
            if seat is None:
                raise protocol.ProtocolError("table is full")
        elif not self._claimable(seat):
            raise protocol.ProtocolError(f"seat {seat} is taken")
        self.seats[seat] = RemoteSeat(session)
        await session.send(protocol.seat_reply(seat, self.player_names()))
        if self.state is not None and not self.state.finished:
            await session.send(protocol.state_sync_message(
                self.state.view(seat), self.game_id))
        self.ensure_running()
        return seat

    def release(self, session) -> None:
        for seat, occupant in enumerate(self.seats):
            if occupant.remote and occupant.session is session:
                self.seats[seat] = LocalSeat(MrRandom())

    def has_remotes(self) -> bool:
        return any(occupant.remote and occupant.session.alive
                   for occupant in self.seats)

    def ensure_running(self) -> None:
        if self._loop_task is None or self._loop_task.done():
            self._loop_task = asyncio.ensure_future(self._run_games())

    async def wait_idle(self) -> None:
        if self._loop_task is not None:
            await self._loop_task

    # --- game flow ---------------------------------------------------------

    async def _run_games(self) -> None:
        while self.has_remotes():
            if (self.max_games is not None
                    and self.games_played >= self.max_games):
                break
            await self.play_one_game()

    async def _broadcast(self, message: dict) -> None:
        for occupant in self.seats:
            if occupant.remote:
                await occupant.session.send(message)

    async def _pick(self, seat: int, view: PlayerView) -> int:
        loop = asyncio.get_event_loop()
        deadline = loop.time() + self.turn_timeout
        prompted = None
        while True:
            occupant = self.seats[seat]
            if not occupant.remote:
                return occupant.pick(view, self.rng)
            session = occupant.session
            if prompted is not session:
                hint = self.hint_fn(view) if self.hint_fn else None
                await session.send(protocol.your_turn_message(
                    view, self.turn_timeout, hint))
                prompted = session
                deadline = loop.time() + self.turn_timeout
            try:
                message = await asyncio.wait_for(
                    session.next_play(), timeout=deadline - loop.time())
            except asyncio.TimeoutError:
                # forfeit the turn, keep the seat
                return self.rng.choice(sorted(view.legal_moves()))
            except SessionClosed:
                if self.seats[seat] is occupant:
                    self.seats[seat] = LocalSeat(MrRandom())
                continue
            try:
                card = protocol.parse_card_field(message)
            except protocol.ProtocolError as exc:
                await session.send(protocol.error_message(str(exc)))
                continue
            if card not in view.legal_moves():
                await session.send(protocol.error_message(
                    "illegal play", legal=protocol.your_turn_message(
                        view, 0.0)["legal"]))
                prompted = None  # re-prompt with a fresh deadline
                continue
            return card

    async def play_one_game(self) -> MatchRecord:
        deal_seed = self.seed * 1_000_003 + self.games_played
        state = deal(deal_seed)
        self.state = state
        self.game_id = self.store.next_game_id()
        players = tuple(self.player_names())
        started = utc_now()
        for seat, occupant in enumerate(self.seats):
            if occupant.remote:
                await occupant.session.send(protocol.deal_message(
                    state.view(seat), self.game_id))
        while not state.finished:
            seat = state.to_play
            view = state.view(seat)
            card = await self._pick(seat, view)
            state = play(state, card)
            self.state = state
            await self._broadcast(protocol.play_message(seat, card))
            if len(state.history) % 4 == 0:
                trick = state.history[-4:]
                winner = resolve_trick(trick)
                captured = [e.card for e in trick if e.card in POINT_CARDS]
                await self._broadcast(protocol.trick_result_message(
                    winner, trick, captured))
        record = self.store.append(state, players, started,
                                   game_id=self.game_id)
        score = state.scores()
        await self._broadcast(protocol.game_result_message(
            record.game_id, score.per_player, score.per_team))
        self.games_played += 1
        self.state = None
        self.game_id = None
        return record


def run_local_games(agents: Sequence[str], games: int, store: RecordStore,
                    seed: int = 0) -> List[MatchRecord]:
    """Play server-side games without any transport and persist them."""
    seats = [make_agent(spec) for spec in agents]
    names = tuple(getattr(agent, "name", spec)
                  for agent, spec in zip(seats, agents))
    records = []
    for index in range(games):
        state = deal(seed * 1_000_003 + index)
        rngs = [Random(f"local:{seed}:{index}:{seat}") for seat in range(4)]
        started = utc_now()
        while not state.finished:
            seat = state.to_play
            card = seats[seat].choose(state.view(seat), rngs[seat])
            state = play(state, card)
        records.append(store.append(state, names, started))
    return records
