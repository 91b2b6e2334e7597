"""Command line front end: training, head-to-head evaluation, serving."""

import argparse
import json
import sys
from pathlib import Path

from .agents import make_agent


def _agent_spec(spec: str, model: str = None) -> str:
    # bare net-backed names pick up --model so `--a scrofa` works
    if model and spec in ("net", "mcts", "scrofa"):
        return f"{spec}:{model}"
    return spec


def _cmd_train(args) -> int:
    from .nn import NetConfig
    from .trainer import TrainRunConfig, run_training

    config = TrainRunConfig(
        games_per_batch=args.games_per_batch, batches=args.batches,
        seed=args.seed, out_dir=Path(args.out),
        net_config=NetConfig(depth=args.depth, width=args.width),
        eval_deals=args.eval_deals)
    run_training(config, log=print)
    print(f"model and metrics written to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    from .evaluate import match

    team_a = make_agent(_agent_spec(args.a, args.model))
    team_b = make_agent(_agent_spec(args.b, args.model))
    report = match(team_a, team_b, args.deals, seed=args.seed,
                   paired=not args.unpaired)
    payload = {
        "schema": 1,
        "a": args.a, "b": args.b,
        "deals": args.deals, "paired": not args.unpaired,
        "seed": args.seed,
        "report": {
            "wpg": report.wpg, "stderr": report.stderr, "z": report.z,
            "win_rate": report.win_rate, "draw_rate": report.draw_rate,
            "loss_rate": report.loss_rate, "games": report.games,
        },
    }
    text = json.dumps(payload, indent=2)
    if args.json:
        Path(args.json).write_text(text + "\n")
    print(text)
    return 0


def _cmd_serve(args) -> int:
    from .service import ServiceConfig, serve

    agents = tuple(spec.strip() for spec in args.agents.split(",")
                   if spec.strip())
    config = ServiceConfig(
        store_dir=args.store, host=args.host, port=args.port,
        http_port=args.http_port, agents=agents or ("greed",),
        turn_timeout=args.timeout, seed=args.seed,
        hint_agent=args.hint, static_dir=args.static,
        max_games=args.max_games)
    def announce(host, tcp_port, http_port):
        print(f"arena on tcp://{host}:{tcp_port}, "
              f"http://{host}:{http_port}", flush=True)

    serve(config, announce=announce)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gongzhu")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="self-play training run")
    train.add_argument("--games-per-batch", type=int, default=64)
    train.add_argument("--batches", type=int, default=1)
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--out", required=True,
                       help="directory for model.gzpv and metrics.csv")
    train.add_argument("--depth", type=int, default=16)
    train.add_argument("--width", type=int, default=512)
    train.add_argument("--eval-deals", type=int, default=16)
    train.set_defaults(run=_cmd_train)

    ev = sub.add_parser("eval", help="paired head-to-head match")
    ev.add_argument("--a", default="if", help="agent spec for seats 0/2")
    ev.add_argument("--b", default="greed", help="agent spec for seats 1/3")
    ev.add_argument("--deals", type=int, default=1024)
    ev.add_argument("--paired", action="store_true",
                    help="accepted for symmetry; pairing is the default")
    ev.add_argument("--unpaired", action="store_true",
                    help="play each board once instead of both seatings")
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--json", help="also write the report to this file")
    ev.add_argument("--model",
                    help="model path for bare net/mcts/scrofa specs")
    ev.set_defaults(run=_cmd_eval)

    serve = sub.add_parser("serve", help="run the arena servers")
    serve.add_argument("--port", type=int, default=9000)
    serve.add_argument("--http-port", type=int, default=None)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--agents", default="greed",
                       help="comma list of fill agents, cycled over seats")
    serve.add_argument("--store", default="arena-store")
    serve.add_argument("--timeout", type=float, default=30.0)
    serve.add_argument("--seed", type=int, default=0)
    serve.add_argument("--hint", default=None,
                       help="scrofa:<model> to send per-action hints")
    serve.add_argument("--static", default=None,
                       help="directory with a built web UI bundle")
    serve.add_argument("--max-games", type=int, default=None)
    serve.set_defaults(run=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.run(args)


if __name__ == "__main__":
    sys.exit(main())
