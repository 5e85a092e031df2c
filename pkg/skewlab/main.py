"""Command-line gateway: `python -m skewlab.main validate|run|list-experiments`."""
import argparse
import json
import logging
import sys

from .lab_9_harness.core import Lab9Harness, list_experiments
from .shared.utils import RunStatus

# Configure Logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("SKEWLAB-GATEWAY")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewlab", description="Numerical lab for SDEs driven by fBm with distributional drift.")
    verbs = parser.add_subparsers(dest="verb", required=True)

    check = verbs.add_parser("validate", help="schema and cross-field checks, runs nothing")
    check.add_argument("--config", required=True, help="YAML experiment config")

    run = verbs.add_parser("run", help="run one experiment and write its artifacts and manifest")
    run.add_argument("--config", required=True, help="YAML experiment config")
    run.add_argument("--out", required=True, help="output directory (relative paths live under SKEWLAB_OUTPUT_ROOT)")
    run.add_argument("--threads", type=int, default=1, help="cap on worker threads")
    run.add_argument("--seed-override", type=int, default=None, help="replace the config seed before hashing")

    verbs.add_parser("list-experiments", help="names and one-line summaries of the battery")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.verb == "list-experiments":
        for entry in list_experiments():
            print(f"{entry['name']:<20} {entry['summary']}")
        return 0

    if args.verb == "validate":
        report = Lab9Harness().validate(args.config)
        print(json.dumps(report, indent=2, default=str))
        return 0 if report["ok"] else RunStatus.ERROR.exit_code

    if args.threads < 1:
        logger.error("[SKEWLAB-GATEWAY] ❌ --threads must be >= 1")
        return RunStatus.ERROR.exit_code
    manifest, status = Lab9Harness(args.threads).run_file(args.config, args.out, args.seed_override)
    logger.info(f"[SKEWLAB-GATEWAY] {args.config} → {status.value} (exit {status.exit_code})")
    if status is not RunStatus.ERROR:
        print(json.dumps(manifest.get("metrics", {}), indent=2, sort_keys=True, default=str))
    return status.exit_code


if __name__ == "__main__":
    sys.exit(main())
