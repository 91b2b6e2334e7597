"""
Looking inside an imperfect-information decision
================================================

The belief player cannot see the other hands, so it samples scenarios
(complete assignments of the unseen cards), weights them by how
plausible the observed play history makes them, and averages per-action
values across scenarios.  This prints one decision's full working.
"""

import random

from gongzhu import deal, play, legal_moves, card_name
from gongzhu.belief import make_strata, weighted_value_report
from gongzhu.nn import PolicyValueNet

net = PolicyValueNet.load("tests/data/smoke_net/model.gzpv")

# walk a random game to the middle and stop at a real decision,
# one with several legal cards and the dangerous cards still unseen
state = deal(seed=12)
rng = random.Random(12)
for _ in range(22):
    state = play(state, rng.choice(sorted(legal_moves(state))))
while (len(legal_moves(state)) < 4
       or len(make_strata(state.view(state.to_play))) < 3):
    state = play(state, rng.choice(sorted(legal_moves(state))))
view = state.view(state.to_play)

print(f"seat {view.player} to play, {len(view.legal_moves())} legal moves,"
      f" {len(view.unseen_cards)} unseen cards")

# strata pin the most consequential unseen cards to specific opponents
strata = make_strata(view)
print(f"{len(strata)} strata over the tracked key cards")

q, report = weighted_value_report(view, net, rng=random.Random(0),
                                  use_search=False)

print()
print("sampled scenarios (plausibility score -> normalized weight):")
for entry in report["scenarios"]:
    print(f"  score {entry['score']:.3f}  weight {entry['weight']:.3f}")

print()
print("importance-weighted value of each legal card:")
for token, value in sorted(report["q"].items(), key=lambda kv: -kv[1]):
    print(f"  {token}  {value:+7.1f}")

best = max(q, key=q.get)
print()
print(f"chosen card: {card_name(best)}")
