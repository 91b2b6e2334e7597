"""
A miniature self-play training run
==================================

Trains a small policy-value network for a few batches of double-dummy
self-play and watches the losses move.  The real entry point for long
runs is `gongzhu train`; this keeps everything small enough to finish
in about a minute.
"""

from gongzhu.nn import NetConfig
from gongzhu.trainer import TrainRunConfig, run_training

config = TrainRunConfig(
    games_per_batch=8,
    batches=4,
    seed=3,
    net_config=NetConfig(depth=2, width=32),
    eval_deals=4,
)

net, rows = run_training(config, log=print)

print()
print("loss trajectory (KL to the search visit distribution, and the")
print("absolute error of the value head against final margins):")
for row in rows:
    print(f"  batch {row['batch']}: kl {row['loss_kl']:.4f}   "
          f"v {row['loss_v']:.1f}")

# the same config and seed always give bit-identical weights
again, _ = run_training(config)
assert all((a == b).all() for a, b in zip(net.params(), again.params()))
print()
print("re-running the same seed reproduced the weights bit for bit")
