"""
The arena store and its statistics
==================================

Plays a small round-robin entirely server-side, persists every game to
an append-only record log, then rebuilds the leaderboard, the pairwise
matrix and the intransitivity statistic from the log alone — the same
numbers the HTTP API serves.
"""

import tempfile

from gongzhu.service import RecordStore, run_local_games

root = tempfile.mkdtemp(prefix="arena-demo-")
store = RecordStore(root)

for a, b in [("random", "greed"), ("random", "if"), ("greed", "if")]:
    run_local_games((a, b, a, b), games=6, store=store, seed=1)

print(f"{len(store)} games in {root}/records.jsonl")

# every stored record re-parses and re-scores to the stored result
store.verify_all()
print("replay verification passed")

print()
print("leaderboard against the greed baseline:")
for row in store.leaderboard():
    print(f"  {row['agent']:>7}  wpg {row['wpg']:+7.1f} "
          f"± {row['stderr']:.1f}  over {row['games']} games")

print()
summary = store.matrix()
print("pairwise wpg matrix", summary["agents"], ":")
for name, row in zip(summary["agents"], summary["wpg"]):
    cells = "  ".join("   none" if v is None else f"{v:+7.1f}" for v in row)
    print(f"  {name:>7}  {cells}")

print()
eps = store.intransitivity(resamples=100, seed=0)
print(f"intransitivity epsilon = {eps['epsilon']:.3f} "
      f"± {eps['stderr']:.3f} (0 = a clean pecking order)")
