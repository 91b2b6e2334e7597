"""
Dealing, playing and scoring one game
=====================================

Runs a full 52-card game with random legal play, prints every trick as
it resolves, and shows that the text record round-trips.
"""

import random

from gongzhu import deal, play, legal_moves, resolve_trick
from gongzhu import card_name, parse_game, serialize_game

state = deal(seed=2024)
rng = random.Random(7)

# the engine is a pure value type: play() hands back a new state
while not state.finished:
    state = play(state, rng.choice(sorted(legal_moves(state))))
    if len(state.history) % 4 == 0:
        trick = state.history[-4:]
        plays = "  ".join(f"{e.player}:{card_name(e.card)}" for e in trick)
        print(f"trick {len(state.history) // 4:2d}   {plays}   "
              f"-> seat {resolve_trick(trick)}")

score = state.scores()
print()
print("per player:", score.per_player)
print("per team:  ", score.per_team)

# one line of text captures the whole game, bit-exactly
record = serialize_game(state)
print()
print(record[:72] + "...")
assert parse_game(record) == state
print("parse(serialize(game)) == game")
