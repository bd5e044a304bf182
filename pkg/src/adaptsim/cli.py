"""Command line interface.

    adaptsim generate --shops 5 --seed 7 --out market.model
    adaptsim simulate --case healing --shops 5 --rounds 100 --seed 7 --out run/
    adaptsim validate --model market.model --case healing
    adaptsim list engines

Exit codes: 0 on success, 1 for usage errors (bad flags, malformed or
unknown config keys), 2 for runtime faults (and for a validate run that
found violations).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .engines import ENGINE_NAMES, build_engine
from .kernel import SimulationConfig, run_simulation
from .marketplace import (
    CASE_NAMES,
    IssueKind,
    Thresholds,
    build_case,
    generate_architecture,
)
from .model import Role
from .report import summary_lines
from .snapshot import read_snapshot, write_snapshot


class UsageError(Exception):
    """Bad invocation or configuration; exits with code 1."""


DEFAULTS = {
    "shops": 2,
    "rounds": 10,
    "seed": 1,
    "scenario": "healing",
    "engine": "mape",
    "output_dir": None,
    "snapshot_rounds": [],
    "thresholds": {},
}

CONFIG_KEYS = set(DEFAULTS)


def load_config_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except json.JSONDecodeError as error:
        raise UsageError(f"config file {path} is not valid JSON: {error}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def parse_snapshot_rounds(text: str) -> list[int]:
    if not text.strip():
        return []
    try:
        rounds = [int(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"--snapshot-rounds expects comma-separated integers, got {text!r}") from None
    return rounds


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaptsim",
        description="Simulate failure injection and adaptation on a marketplace architecture.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a marketplace model and save it")
    gen.add_argument("--shops", type=int, default=DEFAULTS["shops"])
    gen.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    gen.add_argument("--name", default="marketplace")
    gen.add_argument("--out", required=True, help="snapshot file to write")
    gen.set_defaults(func=cmd_generate)

    simulate = sub.add_parser("simulate", help="run an adaptation simulation")
    simulate.add_argument("--config", help="JSON config file; flags override its values")
    simulate.add_argument("--case", choices=CASE_NAMES, dest="scenario")
    simulate.add_argument("--shops", type=int)
    simulate.add_argument("--rounds", type=int)
    simulate.add_argument("--seed", type=int)
    simulate.add_argument("--engine", choices=ENGINE_NAMES)
    simulate.add_argument("--out", dest="output_dir", help="report directory")
    simulate.add_argument(
        "--snapshot-rounds",
        help="comma-separated rounds after which to snapshot the model, e.g. 3,7",
    )
    simulate.add_argument("--timeout", type=float, default=60.0, help="engine timeout in seconds")
    simulate.set_defaults(func=cmd_simulate)

    validate = sub.add_parser("validate", help="check a saved model")
    validate.add_argument("--model", required=True, help="snapshot file to check")
    validate.add_argument(
        "--case",
        choices=CASE_NAMES,
        help="additionally run this case's validators",
    )
    validate.set_defaults(func=cmd_validate)

    lister = sub.add_parser("list", help="list available building blocks")
    lister.add_argument("what", choices=("engines", "scenarios", "issues"))
    lister.set_defaults(func=cmd_list)

    return parser


def cmd_generate(args: argparse.Namespace) -> int:
    if args.shops < 1:
        raise UsageError("--shops must be at least 1")
    rng = random.Random(args.seed)
    arch = generate_architecture(args.shops, rng, name=args.name)
    write_snapshot(arch, args.out)
    print(f"wrote {args.out}: {args.shops} shops, {len(arch.all_components())} components")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    settings = dict(DEFAULTS)
    if args.config:
        settings.update(load_config_file(args.config))
    for key in ("scenario", "shops", "rounds", "seed", "engine", "output_dir"):
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    if args.snapshot_rounds is not None:
        settings["snapshot_rounds"] = parse_snapshot_rounds(args.snapshot_rounds)

    if settings["engine"] not in ENGINE_NAMES:
        raise UsageError(f"unknown engine {settings['engine']!r}")
    if settings["scenario"] not in CASE_NAMES:
        raise UsageError(f"unknown scenario {settings['scenario']!r}")
    if not isinstance(settings["shops"], int) or settings["shops"] < 1:
        raise UsageError("shops must be a positive integer")
    if not isinstance(settings["rounds"], int) or settings["rounds"] < 0:
        raise UsageError("rounds must be a non-negative integer")
    if not isinstance(settings["snapshot_rounds"], list) or not all(
        isinstance(r, int) for r in settings["snapshot_rounds"]
    ):
        raise UsageError("snapshot_rounds must be a list of integers")
    try:
        thresholds = Thresholds.from_mapping(settings["thresholds"])
    except (ValueError, TypeError) as error:
        raise UsageError(str(error)) from None

    rng = random.Random(settings["seed"])
    arch = generate_architecture(settings["shops"], rng, thresholds)
    case = build_case(settings["scenario"], thresholds)
    engine = build_engine(settings["engine"], thresholds)
    config = SimulationConfig(
        rounds=settings["rounds"],
        scenario=case.scenario,
        injectors=case.injectors,
        validators=case.validators,
        utility=case.utility,
        seed=settings["seed"],
        snapshot_rounds=frozenset(settings["snapshot_rounds"]),
        output_dir=Path(settings["output_dir"]) if settings["output_dir"] else None,
        engine_timeout_s=args.timeout,
    )
    report = run_simulation(arch, engine, config, rng=rng)
    for line in summary_lines(report):
        print(line)
    if settings["output_dir"]:
        print(f"report written to {settings['output_dir']}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    arch = read_snapshot(args.model)
    thresholds = Thresholds()
    case = build_case(args.case, thresholds) if args.case else None
    from .marketplace import StructuralValidator

    validators = case.validators if case is not None else [StructuralValidator()]
    simulator = arch.handle(Role.SIMULATOR)
    violations = []
    for validator in validators:
        violations.extend(validator.validate(simulator))
    for violation in violations:
        print(f"{violation.validator}: {violation.subject_uid}: {violation.message}")
    if violations:
        print(f"{len(violations)} violation(s) in {args.model}")
        return 2
    print(f"{args.model} is valid ({len(arch.all_components())} components)")
    return 0


def cmd_list(args: argparse.Namespace) -> int:
    if args.what == "engines":
        for name in ENGINE_NAMES:
            print(name)
    elif args.what == "scenarios":
        for name in CASE_NAMES:
            print(name)
    else:
        for kind in IssueKind:
            print(kind.value)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except UsageError as error:
        print(f"usage error: {error}", file=sys.stderr)
        return 1
    except Exception as error:  # noqa: BLE001 - the CLI boundary reports faults as exit code 2
        print(f"error: {type(error).__name__}: {error}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
