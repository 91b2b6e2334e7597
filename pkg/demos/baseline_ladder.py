"""
The baseline ladder: Random < If < Greed
========================================

Measures winning points per game (WPG) between the three rule-based
agents with paired deals: each board is replayed with the teams
swapped, so deal luck cancels out of the margin.
"""

from gongzhu.agents import MrGreed, MrIf, MrRandom
from gongzhu.evaluate import match

DEALS = 200

for name_a, name_b, team_a, team_b in [
    ("if", "random", MrIf(), MrRandom()),
    ("greed", "if", MrGreed(), MrIf()),
    ("greed", "random", MrGreed(), MrRandom()),
]:
    report = match(team_a, team_b, DEALS, seed=11)
    print(f"{name_a:>5} vs {name_b:<6}  wpg {report.wpg:+7.1f} "
          f"± {report.stderr:5.1f}   z {report.z:5.1f}   "
          f"wins {report.win_rate:.0%}")

# the ladder direction (not the paper-scale magnitudes) is the point:
# every rung is positive with a decisive z score
