"""Command-line entry point: ``rgflow {flow,lpa,expand} --config run.yaml --out dir``."""

from __future__ import annotations

import argparse
import sys

import yaml

from ..errors import SchemaViolation
from .config import parse_config
from .runner import EXIT_SCHEMA, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rgflow", description="Exact contraction algebra, coupling flows "
                                     "and grid solves of the local-potential flow.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("flow", "integrate the coupling flow"), ("lpa", "solve the potential flow on a grid"),
                       ("expand", "expand an observable in the contraction algebra")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", help="output directory (default: config 'out' or runs/<command>)")
        if name == "lpa":
            p.add_argument("--checkpoint-every", type=float, dest="checkpoint_every",
                           help="write a surface every this much k")
        if name == "expand":
            p.add_argument("--order", type=int, help="truncation order, overrides the config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
        if isinstance(data, dict):
            data.setdefault("command", args.command)
            if data["command"] != args.command:
                raise SchemaViolation([f"command: config says {data['command']!r} but the "
                                       f"{args.command!r} subcommand was used"])
        cfg = parse_config(data)
    except (OSError, yaml.YAMLError) as exc:
        print(f"rgflow: cannot read config: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except SchemaViolation as exc:
        for v in exc.violations:
            print(f"rgflow: config error: {v}", file=sys.stderr)
        return EXIT_SCHEMA
    out = args.out or cfg.get("out") or f"runs/{cfg.command}"
    manifest, code = run(cfg, out, checkpoint_every=getattr(args, "checkpoint_every", None),
                         order=getattr(args, "order", None))
    term = manifest["termination"]
    if code:
        print(f"rgflow: {term['cause']}: {term['message']}", file=sys.stderr)
    print(f"{cfg.command} -> {out} ({term['cause']}, exit {code})")
    return code


if __name__ == "__main__":
    sys.exit(main())
