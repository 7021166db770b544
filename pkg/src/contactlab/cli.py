"""Command line entry point: ``contactlab run|verify|list-models``."""
import argparse
import sys

from .errors import ConfigError
from .scenario import MODELS, load_scenario, run_scenario, validate_scenario, verify_paper_suite


def _print_result(result, stream=None):
    stream = sys.stdout if stream is None else stream
    for t in result.tasks:
        anchor = f"  [{t.paper_anchor}]" if t.paper_anchor else ""
        print(f"{t.index:3d} {t.kind:16s} {t.status.upper():5s}{anchor}", file=stream)
        if t.status == "error":
            print(f"      {t.metrics.get('error')}", file=stream)
    s = result.summary()
    print(f"{s['pass']}/{s['total']} passed, {s['fail']} failed, {s['error']} errors", file=stream)
    if result.report_path:
        print(f"report: {result.report_path}", file=stream)


def cmd_run(args):
    cfg = load_scenario(args.scenario)
    if args.seed is not None or args.format is not None:
        data = cfg.to_dict()
        if args.seed is not None:
            data["seed"] = args.seed
        if args.format is not None:
            data["output"]["format"] = args.format
        cfg = validate_scenario(data)
    result = run_scenario(cfg, out_dir=args.out)
    _print_result(result)
    return result.exit_code


def cmd_verify(args):
    result = verify_paper_suite(args.out, seed=args.seed)
    _print_result(result)
    return result.exit_code


def cmd_list_models(args):
    for name, (_, required, optional) in MODELS.items():
        params = list(required) + [f"[{p}]" for p in optional]
        print(f"{name:24s} {' '.join(params)}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="contactlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("scenario")
    run.add_argument("--out", default=None, help="output directory (overrides the scenario)")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--format", choices=("csv", "json"), default=None)
    run.set_defaults(func=cmd_run)

    verify = sub.add_parser("verify", help="run the built-in verification suite")
    verify.add_argument("--suite", choices=("paper",), default="paper")
    verify.add_argument("--out", default="verify-out")
    verify.add_argument("--seed", type=int, default=0)
    verify.set_defaults(func=cmd_verify)

    models = sub.add_parser("list-models", help="list available models and parameters")
    models.set_defaults(func=cmd_list_models)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
