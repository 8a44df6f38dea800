"""Command-line interface: ``bandgan {synth,train,recover,eval,gradcheck}``.

Exit codes: 0 success, 2 configuration or usage, 3 I/O, 4 dimension or
domain, 5 training (including a failed gradient check), 6 API misuse,
7 undefined metric.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import BandganError

log = logging.getLogger("bandgan")


def _experiment(args):
    from .config import ExperimentConfig, load_config, parse_config

    overrides = {"seed": args.seed, "epochs": getattr(args, "epochs", None), "mode": getattr(args, "mode", None)}
    if args.config:
        cfg = load_config(args.config, overrides)
    else:
        cfg = parse_config("", overrides)
    return cfg


def _synth(args):
    from .pipeline import cmd_synth

    cfg = _experiment(args)
    for split, path in cmd_synth(cfg, args.out).items():
        print(f"{split}: {path}")


def _train(args):
    from .pipeline import cmd_train

    cfg = _experiment(args)
    state = cmd_train(cfg, data_dir=args.data, out_dir=args.out, resume=args.resume)
    last = state.loss_history[-1] if state.loss_history else None
    if last is not None:
        print(f"epoch {last.epoch}: generator loss {last.generator:.4f}, validation SNR {last.val_snr_db:.2f} dB")


def _recover(args):
    from .pipeline import cmd_recover

    cmd_recover(args.checkpoint, args.input, args.out)
    print(args.out)


def _eval(args):
    from .pipeline import cmd_eval

    report = cmd_eval(args.checkpoint, args.data, args.out, svg=args.svg)
    sys.stdout.write(report.to_text())


def _gradcheck(args):
    from .errors import TrainingError
    from .gradcheck import oracle_suite

    failed = False
    for name, report in oracle_suite(n=args.n, seed=args.seed):
        print(f"{name:40s} {report}")
        failed |= not report.passed
    if failed:
        raise TrainingError("gradient check failed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bandgan", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate train/val/test datasets")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_synth)

    p = sub.add_parser("train", help="train the generator and critic")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--data", help="dataset directory (default: --out)")
    p.add_argument("--resume", help="checkpoint to continue from")
    p.add_argument("--epochs", type=int, help="total epochs, overrides the config")
    p.add_argument("--mode", choices=["wgan", "standard"])
    p.set_defaults(func=_train)

    p = sub.add_parser("recover", help="recover a notched signal (CSV) with a trained generator")
    p.add_argument("checkpoint")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_recover)

    p = sub.add_parser("eval", help="score a checkpoint on the test split")
    p.add_argument("checkpoint")
    p.add_argument("--data", required=True, help="directory holding test.sgds")
    p.add_argument("--out", required=True)
    p.add_argument("--svg", action="store_true", help="also write SVG profile plots")
    p.set_defaults(func=_eval)

    p = sub.add_parser("gradcheck", help="finite-difference check of every loss")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=4, help="signal length of the test problem")
    p.set_defaults(func=_gradcheck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args)
    except BandganError as exc:
        print(f"bandgan {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
