"""``translate-lab`` entry point."""

from __future__ import annotations

import argparse
import json
import sys

from ..errors import TranslateLabError
from .config import COMMANDS, fixture_dir, fixture_path, load_config
from .runner import overall_status, replay, run


def _parser():
    p = argparse.ArgumentParser(
        prog="translate-lab",
        description="Run a scenario, replay a report, or list the bundled fixtures.")
    p.add_argument("command", choices=COMMANDS + ("replay", "fixtures"))
    p.add_argument("report", nargs="?", help="report JSON (replay only)")
    p.add_argument("--config", help="key-value or JSON config; defaults to the bundled fixture")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for batched work")
    p.add_argument("--out", help="output directory (overrides the config)")
    return p


def _fail(exc: TranslateLabError) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc),
               "field": getattr(exc, "field", None), "exit_code": exc.exit_code}
    print(json.dumps(payload), file=sys.stderr)
    return exc.exit_code


def _summary(report):
    lines = [f"{report['command']}: {len(report['verdicts'])} checks, "
             f"wall time {report['wall_time']:.2f} s"]
    for name, v in sorted(report["verdicts"].items()):
        lines.append(f"  {v['status']:<14} {name}  ({v['trace']})")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.jobs < 1:
            from ..errors import ConfigurationError
            raise ConfigurationError("--jobs must be >= 1", field="jobs")
        if args.command == "fixtures":
            for path in sorted(fixture_dir().glob("*.cfg")):
                print(path)
            return 0
        if args.command == "replay":
            if not args.report:
                from ..errors import ConfigurationError
                raise ConfigurationError("replay needs a report path", field="report")
            report = replay(args.report, args.out, args.jobs)
            print(_summary(report))
            print("replay: metrics identical")
            return overall_status(report)
        cfg_path = args.config or fixture_path(args.command)
        cfg = load_config(cfg_path, args.command, args.out)
        report = run(cfg, args.jobs)
        print(_summary(report))
        return overall_status(report)
    except TranslateLabError as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
