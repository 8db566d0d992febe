"""Command-line front end.

    relidiag validate <model.json>
    relidiag diagnose <model.json> --time T --observe VAR=VALUE ... [--format text|json]
    relidiag replay <scenario.json> [--format text|json]
    relidiag serve [--host H] [--port N] [--state-dir DIR]

Exit codes: 0 success, 1 domain failure (invalid model, inconsistent
observation, bad event script), 2 unreadable or unparseable input.
Probabilities and costs print at 4 decimals; --format json emits full
precision.
"""

from __future__ import annotations

import argparse
import json
import sys

from .engine import assimilate, initial_belief, load_scenario
from .errors import DiagnosisError, InvalidParameterError, ModelFormatError
from .model import CAP_ENV_VAR, Observation, SystemModel, load_model, validate_model
from .report import (
    bundle_from_beliefs,
    bundle_to_dict,
    render_text,
    render_trajectory_text,
    scenario_bundles,
    trajectory_to_dict,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relidiag",
        description="Probabilistic diagnosis with reliability-derived priors "
        "and least-cost repair ranking.",
        epilog=f"Set {CAP_ENV_VAR} to override the exact-enumeration cap "
        "(default 2^20 candidates).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a model file, list violations")
    p_validate.add_argument("model")

    p_diag = sub.add_parser("diagnose", help="one-shot diagnosis of an observation")
    p_diag.add_argument("model")
    p_diag.add_argument("--time", type=float, required=True, help="observation time in hours")
    p_diag.add_argument(
        "--observe",
        nargs="+",
        action="append",
        required=True,
        metavar="VAR=VALUE",
        help="observed variable/value pairs; repeatable",
    )
    p_diag.add_argument("--format", choices=("text", "json"), default="text")

    p_replay = sub.add_parser("replay", help="replay a scenario event script")
    p_replay.add_argument("scenario")
    p_replay.add_argument("--format", choices=("text", "json"), default="text")

    p_serve = sub.add_parser("serve", help="run the HTTP session service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument(
        "--state-dir", default=None, help="directory for the append-only session journal"
    )
    return parser


def _parse_observe_value(model: SystemModel, name: str, raw: str):
    var = model.variables_by_name.get(name)
    if var is None:
        raise InvalidParameterError(f"unknown variable {name!r}")
    for value in var.domain:
        if str(value) == raw:
            return value
    raise InvalidParameterError(
        f"value {raw!r} not in domain of variable {name}: {list(var.domain)!r}"
    )


def _parse_assignments(model: SystemModel, pairs: list[list[str]]) -> dict:
    assignments = {}
    for item in (p for group in pairs for p in group):
        if "=" not in item:
            raise InvalidParameterError(f"--observe expects VAR=VALUE, got {item!r}")
        name, _, raw = item.partition("=")
        assignments[name] = _parse_observe_value(model, name, raw)
    return assignments


def _load_valid_model(path: str) -> SystemModel | None:
    """Load and validate; on violations print them and return None."""
    model = load_model(path)
    violations = validate_model(model)
    if violations:
        for line in violations:
            print(line, file=sys.stderr)
        return None
    return model


def cmd_validate(args) -> int:
    model = load_model(args.model)
    violations = validate_model(model)
    for line in violations:
        print(line)
    if violations:
        return 1
    print("ok")
    return 0


def cmd_diagnose(args) -> int:
    model = _load_valid_model(args.model)
    if model is None:
        return 1
    assignments = _parse_assignments(model, args.observe)
    obs = Observation(time=args.time, assignments=assignments)
    prior = initial_belief(model, args.time)
    posterior = assimilate(prior, obs)
    bundle = bundle_from_beliefs(prior, posterior)
    if args.format == "json":
        print(json.dumps(bundle_to_dict(bundle), indent=2))
    else:
        print(render_text(bundle), end="")
    return 0


def cmd_replay(args) -> int:
    scenario = load_scenario(args.scenario)
    violations = validate_model(scenario.model)
    if violations:
        for line in violations:
            print(line, file=sys.stderr)
        return 1
    steps = scenario_bundles(scenario.model, scenario.t0, scenario.events)
    if args.format == "json":
        print(json.dumps(trajectory_to_dict(steps), indent=2))
    else:
        print(render_trajectory_text(steps), end="")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(state_dir=args.state_dir), host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "validate": cmd_validate,
        "diagnose": cmd_diagnose,
        "replay": cmd_replay,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except (OSError, ModelFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DiagnosisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
