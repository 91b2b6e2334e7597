"""
Tree search on a perfect-information endgame
============================================

Builds a two-trick endgame where every line can be enumerated, compares
the exhaustive game value with the search value, and prints where the
visits went.
"""

import random

from gongzhu import deal, play, legal_moves, card_name
from gongzhu.mcts import FastState, search

# play a random game down to the last 8 cards
state = deal(seed=31)
rng = random.Random(5)
for _ in range(44):
    state = play(state, rng.choice(sorted(legal_moves(state))))

fs = FastState.from_state(state)


def minimax(node):
    if node.finished:
        return float(node.team_differential())
    values = [minimax(node.child(c)) for c in node.legal_cards()]
    return max(values) if node.to_play % 2 == 0 else min(values)


exact = minimax(fs)


def no_knowledge(node):
    # a blank evaluator: all guidance must come from the tree itself
    return 0.0


probs, value = search(fs, no_knowledge, count=4000)
mover_sign = 1 if fs.to_play % 2 == 0 else -1

print(f"seat to play: {fs.to_play}")
print(f"exhaustive team-0 value: {exact:+.0f}")
print(f"search value (mover view {value:+.1f}) -> team-0 "
      f"{mover_sign * value:+.1f}")
print()
print("visit distribution over legal cards:")
for card in sorted(fs.legal_cards()):
    bar = "#" * int(probs[card] * 40)
    print(f"  {card_name(card)}  {probs[card]:6.1%}  {bar}")
